#pragma once

/// @file strategies.hpp
/// @brief FedZero and the comparison strategies behind one interface.

#include <fedzero/core/random.hpp>
#include <fedzero/core/scenario.hpp>
#include <fedzero/fairness/ledger.hpp>
#include <fedzero/runtime/round_runtime.hpp>
#include <fedzero/selection/filters.hpp>
#include <fedzero/selection/selector.hpp>
#include <fedzero/traces/resources.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fedzero {

enum class StrategyKind { fedzero, random, random_1_3n, random_fc, oort, oort_1_3n, oort_fc, upper_bound };

inline constexpr std::array<StrategyKind, 8> kAllStrategies{
    StrategyKind::fedzero, StrategyKind::random, StrategyKind::random_1_3n, StrategyKind::random_fc,
    StrategyKind::oort,    StrategyKind::oort_1_3n, StrategyKind::oort_fc,  StrategyKind::upper_bound};

inline std::string_view to_string(StrategyKind k) {
    switch (k) {
    case StrategyKind::fedzero: return "fedzero";
    case StrategyKind::random: return "random";
    case StrategyKind::random_1_3n: return "random_1_3n";
    case StrategyKind::random_fc: return "random_fc";
    case StrategyKind::oort: return "oort";
    case StrategyKind::oort_1_3n: return "oort_1_3n";
    case StrategyKind::oort_fc: return "oort_fc";
    case StrategyKind::upper_bound: return "upper_bound";
    }
    return "fedzero";
}

inline StrategyKind strategy_from_string(std::string_view s) {
    for (auto k : kAllStrategies) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown strategy: " + std::string(s));
}

inline bool is_oort(StrategyKind k) {
    return k == StrategyKind::oort || k == StrategyKind::oort_1_3n || k == StrategyKind::oort_fc;
}

inline bool is_over_selecting(StrategyKind k) {
    return k == StrategyKind::random_1_3n || k == StrategyKind::oort_1_3n;
}

inline bool uses_forecast_filter(StrategyKind k) {
    return k == StrategyKind::random_fc || k == StrategyKind::oort_fc;
}

struct StrategyParams {
    std::size_t n = 10;
    Timestep d_max = 60;
    /// Applied to n by the over-selecting baselines.
    double over_selection_factor = 1.3;
    /// Share of Oort's picks reserved for exploration.
    double exploration_fraction = 0.1;
    SelectionOptions selection;
};

/// Clients chosen for one round and how the runtime should treat them.
struct StrategySelection {
    std::vector<std::size_t> clients;
    std::optional<RoundPlan> plan;
    /// Participants that must reach m_min before the round may end early (0 = all).
    std::size_t required_completions = 0;
    bool unconstrained = false;
};

/// Read-only view a strategy may consult at round start t0.
struct SelectionContext {
    const Scenario& scenario;
    const ResourceTraces& traces;
    const FairnessLedger& ledger;
    Timestep t0;
};

/// Batches the client could compute right now: min(spare, floor(r / δ)).
inline Batches powered_capacity(const Scenario& s, const ResourceTraces& tr, std::size_t c, Timestep t) {
    const Energy r = tr.actual_excess_energy(s.domain_of(c), t);
    const Batches spare = tr.actual_spare_capacity(c, t);
    if (std::isinf(r)) return spare;
    const double e = std::floor(r / s.clients()[c].energy_per_batch);
    return std::min(spare, static_cast<Batches>(std::max(0.0, e)));
}

/// Clients with excess energy and spare capacity at t (instantaneous check).
inline std::vector<std::size_t> available_clients(const Scenario& s, const ResourceTraces& tr, Timestep t) {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < s.num_clients(); ++c) {
        if (powered_capacity(s, tr, c, t) >= 1) out.push_back(c);
    }
    return out;
}

/// Keeps clients expected to reach m_min within d_max under the forecasts,
/// using the same budget test as the selection engine.
inline std::vector<std::size_t> fc_filter(const Scenario& s, const ResourceTraces& tr, std::span<const std::size_t> clients,
                                          Timestep t0, Timestep d_max) {
    std::vector<std::vector<Energy>> energy(s.num_domains());
    std::vector<std::size_t> out;
    for (std::size_t c : clients) {
        const std::size_t p = s.domain_of(c);
        if (energy[p].empty()) energy[p] = tr.excess_energy_forecast(p, t0, d_max);
        SelectionClient sc;
        sc.delta = s.clients()[c].energy_per_batch;
        sc.m_min = s.clients()[c].min_batches;
        sc.spare = tr.spare_capacity_forecast(c, t0, d_max);
        if (passes_budget_filter(sc, energy[p], d_max)) out.push_back(c);
    }
    return out;
}

/// Uniform sample of min(k, |available|) clients, ascending.
inline std::vector<std::size_t> random_select(std::span<const std::size_t> available, std::size_t k, Rng& rng) {
    std::vector<std::size_t> pool(available.begin(), available.end());
    k = std::min(k, pool.size());
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

/// Oort-style guided pick: a share of k explores clients that never
/// contributed, the rest exploits the highest statistical × system utility.
/// Equal utilities are ordered randomly.
inline std::vector<std::size_t> oort_select(std::span<const std::size_t> available, std::size_t k,
                                            const FairnessLedger& ledger, std::span<const double> system_utility,
                                            double exploration_fraction, Rng& rng) {
    std::vector<std::size_t> pool(available.begin(), available.end());
    shuffle(std::span<std::size_t>(pool), rng);
    auto utility = [&](std::size_t c) { return ledger.sigma(c) * system_utility[c]; };
    std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) { return utility(a) > utility(b); });
    k = std::min(k, pool.size());
    const auto explore = static_cast<std::size_t>(std::floor(exploration_fraction * static_cast<double>(k) + 0.5));

    std::vector<std::size_t> picked;
    std::vector<bool> taken(pool.size(), false);
    auto explored = [&](std::size_t c) { return ledger.state(c).rounds_participated > 0; };
    for (std::size_t i = 0; i < pool.size() && picked.size() < k - explore; ++i) {
        if (explored(pool[i]) && utility(pool[i]) > 0.0) {
            picked.push_back(pool[i]);
            taken[i] = true;
        }
    }
    std::vector<std::size_t> fresh;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!taken[i] && !explored(pool[i])) fresh.push_back(i);
    }
    // Unexplored clients in random order.
    shuffle(std::span<std::size_t>(fresh), rng);
    for (std::size_t i : fresh) {
        if (picked.size() >= k) break;
        picked.push_back(pool[i]);
        taken[i] = true;
    }
    for (std::size_t i = 0; i < pool.size() && picked.size() < k; ++i) {
        if (!taken[i]) {
            picked.push_back(pool[i]);
            taken[i] = true;
        }
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

class SelectionStrategy {
public:
    SelectionStrategy(StrategyKind kind, StrategyParams params)
        : kind_(kind)
        , params_(params) {
        if (params_.n < 1 || params_.d_max < 1) throw std::invalid_argument("invalid strategy parameters");
    }

    [[nodiscard]] StrategyKind kind() const noexcept { return kind_; }
    [[nodiscard]] const StrategyParams& params() const noexcept { return params_; }

    /// Most clients this strategy may pick in one round.
    [[nodiscard]] std::size_t max_clients() const {
        if (!is_over_selecting(kind_)) return params_.n;
        return static_cast<std::size_t>(std::ceil(params_.over_selection_factor * static_cast<double>(params_.n) - 1e-9));
    }

    /// Clients for a round starting at ctx.t0, or nullopt to wait a timestep.
    std::optional<StrategySelection> select(const SelectionContext& ctx, Rng& rng) const {
        StrategySelection out;
        if (kind_ == StrategyKind::fedzero) {
            const auto sigma = ctx.ledger.sigmas();
            const auto input = make_selection_input(ctx.scenario, ctx.traces, sigma, ctx.t0, params_.n, params_.d_max);
            auto plan = select_round(input, params_.selection);
            if (!plan) return std::nullopt;
            out.clients = plan->selected;
            out.plan = std::move(plan);
            return out;
        }
        if (kind_ == StrategyKind::upper_bound) {
            std::vector<std::size_t> all(ctx.scenario.num_clients());
            for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
            if (all.size() < params_.n) return std::nullopt;
            out.clients = random_select(all, params_.n, rng);
            out.unconstrained = true;
            return out;
        }

        auto pool = available_clients(ctx.scenario, ctx.traces, ctx.t0);
        if (uses_forecast_filter(kind_)) pool = fc_filter(ctx.scenario, ctx.traces, pool, ctx.t0, params_.d_max);
        if (pool.size() < params_.n) return std::nullopt;
        const std::size_t k = max_clients();
        if (is_oort(kind_)) {
            std::vector<double> sys(ctx.scenario.num_clients(), 0.0);
            for (std::size_t c : pool) {
                const auto powered = powered_capacity(ctx.scenario, ctx.traces, c, ctx.t0);
                sys[c] = static_cast<double>(powered) / static_cast<double>(ctx.scenario.clients()[c].min_batches);
            }
            out.clients = oort_select(pool, k, ctx.ledger, sys, params_.exploration_fraction, rng);
        } else {
            out.clients = random_select(pool, k, rng);
        }
        if (is_over_selecting(kind_)) out.required_completions = params_.n;
        return out;
    }

private:
    StrategyKind kind_;
    StrategyParams params_;
};

} // namespace fedzero
