#pragma once

/// @file round_runtime.hpp
/// @brief Executes a round against the actual traces.

#include <fedzero/core/scenario.hpp>
#include <fedzero/core/types.hpp>
#include <fedzero/selection/types.hpp>
#include <fedzero/traces/resources.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace fedzero {

/// One participant's view of its domain controller in a single timestep.
struct ShareRequest {
    Energy delta = 1.0;
    Batches m_min = 0;
    Batches m_max = 0;
    Batches m_comp = 0;
    /// Actual spare capacity this timestep.
    Batches capacity = 0;
};

namespace detail {

/// Splits `energy` among `active` proportionally to `weight`, never pushing
/// a share above its cap; capped surplus is re-split until nothing changes.
/// Returns the energy left over.
inline Energy water_fill(Energy energy, std::vector<std::size_t> active, std::span<const double> weight,
                         std::span<const Energy> cap, std::span<Energy> share) {
    while (energy > 0.0 && !active.empty()) {
        double total = 0.0;
        for (auto i : active) total += weight[i];
        if (!(total > 0.0)) break;
        std::vector<std::size_t> next;
        Energy capped = 0.0;
        for (auto i : active) {
            if (share[i] + energy * weight[i] / total >= cap[i]) {
                capped += cap[i] - share[i];
            } else {
                next.push_back(i);
            }
        }
        if (next.size() == active.size()) {
            for (auto i : active) share[i] += energy * weight[i] / total;
            return 0.0;
        }
        for (auto i : active) {
            if (std::find(next.begin(), next.end(), i) == next.end()) share[i] = cap[i];
        }
        energy = std::max(0.0, energy - capped);
        active = std::move(next);
    }
    return energy;
}

/// Hands out energy left by flooring one batch at a time, largest unmet
/// share first. Clients below m_min are served before the rest.
inline void settle_remainder(std::span<const ShareRequest> req, std::span<const Energy> share,
                             std::span<Batches> step, std::span<Energy> used, Energy left) {
    for (int phase = 0; phase < 2; ++phase) {
        while (true) {
            std::size_t best = req.size();
            for (std::size_t j = 0; j < req.size(); ++j) {
                const auto& q = req[j];
                const Batches done = q.m_comp + step[j];
                if (phase == 0 && done >= q.m_min) continue;
                if (step[j] >= q.capacity || done >= q.m_max || q.delta > left) continue;
                if (best == req.size() || share[j] - used[j] > share[best] - used[best]) best = j;
            }
            if (best == req.size()) break;
            step[best] += 1;
            used[best] += req[best].delta;
            left -= req[best].delta;
        }
    }
}

} // namespace detail

/// Two-step split of a domain's energy for one timestep. Clients still
/// below m_min are served first, weighted by δ(m_min − m_comp); leftover
/// goes to clients below m_max, weighted by δ(m_max − m_comp). No share
/// exceeds δ · min(capacity, m_max − m_comp).
inline std::vector<Energy> attribute_power(std::span<const ShareRequest> req, Energy available) {
    if (!(available >= 0.0)) throw std::invalid_argument("available energy must be non-negative");
    const std::size_t n = req.size();
    std::vector<Energy> cap(n);
    std::vector<Energy> share(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Batches room = std::max<Batches>(0, std::min(req[i].capacity, req[i].m_max - req[i].m_comp));
        cap[i] = req[i].delta * static_cast<double>(room);
    }
    if (std::isinf(available)) return cap;

    std::vector<double> weight(n, 0.0);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) {
        if (req[i].m_comp < req[i].m_min && cap[i] > 0.0) {
            weight[i] = req[i].delta * static_cast<double>(req[i].m_min - req[i].m_comp);
            active.push_back(i);
        }
    }
    Energy left = detail::water_fill(available, active, weight, cap, share);

    active.clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (req[i].m_comp < req[i].m_max && share[i] < cap[i]) {
            weight[i] = req[i].delta * static_cast<double>(req[i].m_max - req[i].m_comp);
            active.push_back(i);
        }
    }
    detail::water_fill(left, active, weight, cap, share);
    return share;
}

/// Whole batches a client completes with its share this timestep.
inline Batches step_client(Energy share, Energy delta, Batches capacity, Batches m_comp, Batches m_max) {
    const double by_energy = std::isinf(share) ? static_cast<double>(std::numeric_limits<Batches>::max() / 4)
                                               : std::floor(share / delta);
    const auto e = static_cast<Batches>(std::max(0.0, by_energy));
    return std::max<Batches>(0, std::min({e, capacity, m_max - m_comp}));
}

struct RoundConfig {
    Timestep d_max = 60;
    /// Round ends once this many participants reached m_min (0 = all).
    std::size_t required_completions = 0;
    /// Hand out energy left by flooring one whole batch at a time.
    bool settle_remainder = true;
    /// Keep fractional batch progress across timesteps instead of discarding it.
    bool carry_fractional = false;
    /// Ignore energy and load: unlimited energy, full capacity.
    bool unconstrained = false;
    bool record_events = false;
};

struct StepEvent {
    Timestep t;
    std::size_t client;
    Energy share;
    Batches batches;
};

struct RoundResult {
    /// Scenario indices, ascending.
    std::vector<std::size_t> participants;
    std::vector<Batches> batches;
    std::vector<bool> accepted;
    /// Energy consumed by each participant.
    std::vector<Energy> energy;
    std::vector<std::size_t> discarded;
    Timestep start = 0;
    Timestep realized_duration = 0;
    /// Domain index -> energy consumed per timestep of the round.
    std::map<std::size_t, std::vector<Energy>> energy_consumed;
    std::size_t energy_violations = 0;
    std::size_t capacity_violations = 0;
    /// False when the round ran unconstrained and was not audited.
    bool audited = true;
    std::vector<StepEvent> events;

    [[nodiscard]] std::size_t num_accepted() const {
        return static_cast<std::size_t>(std::count(accepted.begin(), accepted.end(), true));
    }
    [[nodiscard]] Energy total_energy() const {
        Energy e = 0.0;
        for (Energy v : energy) e += v;
        return e;
    }
};

/// Runs a round from t0 with the given participants until the completion
/// condition or d_max. Reads only actual traces.
inline RoundResult run_round(const Scenario& scenario, const ResourceTraces& traces,
                             std::span<const std::size_t> participants, Timestep t0, const RoundConfig& cfg) {
    if (cfg.d_max < 1) throw std::invalid_argument("d_max must be >= 1");
    RoundResult res;
    res.start = t0;
    res.participants.assign(participants.begin(), participants.end());
    std::sort(res.participants.begin(), res.participants.end());
    const std::size_t n = res.participants.size();
    res.batches.assign(n, 0);
    res.accepted.assign(n, false);
    res.energy.assign(n, 0.0);
    res.audited = !cfg.unconstrained;
    const std::size_t required = cfg.required_completions == 0 ? n : std::min(cfg.required_completions, n);

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[scenario.domain_of(res.participants[i])].push_back(i);
    for (const auto& g : groups) res.energy_consumed[g.first] = {};

    std::vector<double> progress(n, 0.0);
    const auto& specs = scenario.clients();
    for (Timestep k = 0; k < cfg.d_max && n > 0; ++k) {
        const Timestep t = t0 + k;
        for (const auto& [domain, members] : groups) {
            const Energy r = cfg.unconstrained ? kUnlimitedEnergy : traces.actual_excess_energy(domain, t);
            std::vector<ShareRequest> req;
            req.reserve(members.size());
            for (auto i : members) {
                const auto& c = specs[res.participants[i]];
                const Batches cap = cfg.unconstrained ? c.max_capacity
                                                      : traces.actual_spare_capacity(res.participants[i], t);
                req.push_back({c.energy_per_batch, c.min_batches, c.max_batches, res.batches[i], cap});
            }
            const auto share = attribute_power(req, r);
            std::vector<Batches> step(members.size(), 0);
            std::vector<Energy> used(members.size(), 0.0);
            for (std::size_t j = 0; j < members.size(); ++j) {
                const auto& q = req[j];
                if (cfg.carry_fractional && std::isfinite(share[j])) {
                    const std::size_t i = members[j];
                    const double room = static_cast<double>(std::min(q.capacity, q.m_max - q.m_comp));
                    const double gain = std::min(share[j] / q.delta, room);
                    progress[i] += gain;
                    step[j] = std::min<Batches>(static_cast<Batches>(std::floor(progress[i] + 1e-9)) - q.m_comp,
                                                q.m_max - q.m_comp);
                    step[j] = std::max<Batches>(step[j], 0);
                    used[j] = gain * q.delta;
                } else {
                    step[j] = step_client(share[j], q.delta, q.capacity, q.m_comp, q.m_max);
                    used[j] = static_cast<double>(step[j]) * q.delta;
                }
            }
            if (cfg.settle_remainder && !cfg.carry_fractional && std::isfinite(r)) {
                Energy left = r;
                for (Energy u : used) left -= u;
                detail::settle_remainder(req, share, step, used, left);
            }
            Energy consumed = 0.0;
            for (std::size_t j = 0; j < members.size(); ++j) {
                const std::size_t i = members[j];
                if (step[j] > req[j].capacity) ++res.capacity_violations;
                res.batches[i] += step[j];
                res.energy[i] += used[j];
                consumed += used[j];
                if (cfg.record_events) res.events.push_back({t, res.participants[i], share[j], step[j]});
            }
            res.energy_consumed[domain].push_back(consumed);
            if (!cfg.unconstrained && consumed > r + 1e-9 * std::max(1.0, r)) ++res.energy_violations;
        }
        res.realized_duration = k + 1;
        std::size_t done = 0;
        for (std::size_t i = 0; i < n; ++i) {
            done += res.batches[i] >= specs[res.participants[i]].min_batches ? 1 : 0;
        }
        if (done >= required) break;
    }
    for (std::size_t i = 0; i < n; ++i) {
        res.accepted[i] = res.batches[i] >= specs[res.participants[i]].min_batches;
        if (!res.accepted[i]) res.discarded.push_back(res.participants[i]);
    }
    return res;
}

inline RoundResult run_round(const Scenario& scenario, const ResourceTraces& traces, const RoundPlan& plan,
                             Timestep t0, const RoundConfig& cfg) {
    return run_round(scenario, traces, plan.selected, t0, cfg);
}

} // namespace fedzero
