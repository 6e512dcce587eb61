#pragma once

/// @file proxy.hpp
/// @brief Synthetic stand-in for model training.
///
/// Batch work advances a scalar global progress; losses decay and the
/// accuracy proxy saturates exponentially in that progress. This reproduces
/// relative convergence speed between strategies, not real accuracies.

#include <fedzero/core/random.hpp>
#include <fedzero/core/types.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fedzero {

struct ProxyConfig {
    double initial_loss = 2.3;
    /// k: decay rate of loss and growth rate of accuracy per unit of progress.
    double rate = 1.0 / 1500.0;
    double max_accuracy = 0.85;
    /// γ: bonus for rounds whose accepted clients cover more data weight.
    double diversity_bonus = 1.0;
    /// Log-scale spread of the fixed per-client loss level.
    double client_spread = 0.3;
    /// Log-scale jitter per round and per batch.
    double round_jitter = 0.1;
    double batch_jitter = 0.05;
    std::uint64_t seed = 0;
};

struct AcceptedWork {
    std::size_t client = 0;
    Batches batches = 0;
};

/// Interface so a real training backend can replace the proxy.
class TrainingBackend {
public:
    virtual ~TrainingBackend() = default;
    [[nodiscard]] virtual std::vector<double> local_train(std::size_t client, Batches batches,
                                                          std::int64_t round) const = 0;
    virtual void aggregate(std::span<const AcceptedWork> accepted) = 0;
    [[nodiscard]] virtual double accuracy() const = 0;
};

class ProxyModel final : public TrainingBackend {
public:
    ProxyModel(std::vector<double> data_weights, ProxyConfig cfg)
        : weights_(std::move(data_weights))
        , cfg_(cfg) {
        double sum = 0.0;
        for (double w : weights_) {
            if (!(w > 0.0)) throw std::invalid_argument("data weights must be positive");
            sum += w;
        }
        if (weights_.empty() || std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("data weights must sum to 1");
        if (!(cfg_.rate > 0.0) || !(cfg_.max_accuracy > 0.0) || cfg_.diversity_bonus < 0.0) {
            throw std::invalid_argument("invalid proxy configuration");
        }
        level_.reserve(weights_.size());
        for (std::size_t c = 0; c < weights_.size(); ++c) {
            Rng rng(mix_seed(cfg_.seed, 0x1e7e1ULL, c));
            level_.push_back(std::exp(cfg_.client_spread * standard_normal(rng)));
        }
    }

    /// Weights proportional to local sample counts.
    static std::vector<double> weights_from_samples(std::span<const std::int64_t> samples) {
        double total = 0.0;
        for (auto s : samples) total += static_cast<double>(s);
        std::vector<double> w;
        w.reserve(samples.size());
        for (auto s : samples) w.push_back(static_cast<double>(s) / total);
        return w;
    }

    [[nodiscard]] std::vector<double> local_train(std::size_t client, Batches batches,
                                                  std::int64_t round) const override {
        std::vector<double> out;
        if (batches <= 0) return out;
        out.reserve(static_cast<std::size_t>(batches));
        Rng rng(mix_seed(cfg_.seed, client, static_cast<std::uint64_t>(round)));
        const double base = cfg_.initial_loss * std::exp(-cfg_.rate * progress_) * level_.at(client) *
                            std::exp(cfg_.round_jitter * standard_normal(rng));
        for (Batches b = 0; b < batches; ++b) out.push_back(base * std::exp(cfg_.batch_jitter * standard_normal(rng)));
        return out;
    }

    void aggregate(std::span<const AcceptedWork> accepted) override {
        double coverage = 0.0;
        double work = 0.0;
        for (const auto& a : accepted) {
            coverage += weights_.at(a.client);
            work += weights_[a.client] * static_cast<double>(a.batches);
        }
        progress_ += work * (1.0 + cfg_.diversity_bonus * coverage);
    }

    [[nodiscard]] double accuracy() const override {
        return cfg_.max_accuracy * (1.0 - std::exp(-cfg_.rate * progress_));
    }

    [[nodiscard]] double progress() const noexcept { return progress_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] const ProxyConfig& config() const noexcept { return cfg_; }

private:
    std::vector<double> weights_;
    std::vector<double> level_;
    ProxyConfig cfg_;
    double progress_ = 0.0;
};

/// Mean of squared losses; 0 for an empty list.
inline double mean_squared(std::span<const double> losses) {
    if (losses.empty()) return 0.0;
    double s = 0.0;
    for (double l : losses) s += l * l;
    return s / static_cast<double>(losses.size());
}

} // namespace fedzero
