#pragma once

/// @file ledger.hpp
/// @brief Participation counts, blocklist and per-round utility weights.

#include <fedzero/core/random.hpp>
#include <fedzero/core/types.hpp>
#include <fedzero/fairness/utility.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fedzero {

/// Outcome of one client in a finished round, as seen by the ledger.
struct Contribution {
    std::size_t client = 0;
    bool accepted = false;
    Batches batches = 0;
    Energy energy = 0.0;
    /// Mean of squared per-batch losses; only read for accepted clients.
    double mean_squared_loss = 0.0;
};

class FairnessLedger {
public:
    FairnessLedger() = default;

    FairnessLedger(std::vector<std::int64_t> num_samples, double alpha, bool blocklist_enabled)
        : samples_(std::move(num_samples))
        , state_(samples_.size())
        , alpha_(alpha)
        , enabled_(blocklist_enabled) {
        if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    }

    [[nodiscard]] std::size_t size() const noexcept { return state_.size(); }
    [[nodiscard]] const ClientState& state(std::size_t c) const { return state_.at(c); }
    [[nodiscard]] const std::vector<ClientState>& states() const noexcept { return state_; }
    [[nodiscard]] double omega() const noexcept { return omega_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] bool blocklist_enabled() const noexcept { return enabled_; }

    [[nodiscard]] std::size_t blocklist_size() const {
        std::size_t n = 0;
        for (const auto& s : state_) n += s.blocklisted ? 1 : 0;
        return n;
    }

    /// Start-of-round update: ω becomes the mean participation, then each
    /// blocklisted client is released with probability P(c). Clients are
    /// visited in index order, one draw per blocklisted client.
    void round_tick(Rng& rng) {
        double sum = 0.0;
        for (const auto& s : state_) sum += static_cast<double>(s.rounds_participated);
        omega_ = state_.empty() ? 0.0 : sum / static_cast<double>(state_.size());
        for (auto& s : state_) {
            if (!s.blocklisted) continue;
            const double p = release_probability(static_cast<double>(s.rounds_participated), omega_, alpha_);
            if (uniform01(rng) < p) s.blocklisted = false;
        }
    }

    /// σ_c for client c; 0 while blocklisted.
    [[nodiscard]] double sigma(std::size_t c) const {
        const auto& s = state_.at(c);
        if (s.blocklisted) return 0.0;
        return statistical_utility(samples_[c], s.last_mean_squared_loss, s.rounds_participated);
    }

    [[nodiscard]] std::vector<double> sigmas() const {
        std::vector<double> out(state_.size());
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = sigma(c);
        return out;
    }

    /// Every participant accumulates the batches and energy it spent. Accepted
    /// clients also get p(c) + 1 and, with the blocklist on, are blocked.
    void record_participation(std::span<const Contribution> round) {
        for (const auto& r : round) {
            auto& s = state_.at(r.client);
            s.cumulative_energy += r.energy;
            s.cumulative_batches += r.batches;
            if (!r.accepted) continue;
            s.rounds_participated += 1;
            s.last_mean_squared_loss = r.mean_squared_loss;
            if (enabled_) s.blocklisted = true;
        }
    }

private:
    std::vector<std::int64_t> samples_;
    std::vector<ClientState> state_;
    double omega_ = 0.0;
    double alpha_ = 1.0;
    bool enabled_ = true;
};

} // namespace fedzero
