#pragma once

/// @file types.hpp
/// @brief Selection inputs, round plans and a solver-independent plan checker.

#include <fedzero/core/scenario.hpp>
#include <fedzero/core/types.hpp>
#include <fedzero/solver/mip.hpp>
#include <fedzero/traces/resources.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedzero {

/// One selectable client as seen by the selection engine.
struct SelectionClient {
    /// Scenario index; also the tie-break rank.
    std::size_t index = 0;
    /// Index into SelectionInput::energy.
    std::size_t domain = 0;
    double sigma = 0.0;
    Energy delta = 1.0;
    Batches m_min = 1;
    Batches m_max = 1;
    /// Forecast spare capacity for the next d_max timesteps.
    std::vector<Batches> spare;
};

struct SelectionInput {
    std::size_t n = 1;
    Timestep d_max = 1;
    /// Ascending by index.
    std::vector<SelectionClient> clients;
    /// Forecast excess energy per domain for the next d_max timesteps.
    std::vector<std::vector<Energy>> energy;

    void validate() const {
        if (n < 1) throw std::invalid_argument("n must be >= 1");
        if (d_max < 1) throw std::invalid_argument("d_max must be >= 1");
        const auto horizon = static_cast<std::size_t>(d_max);
        for (const auto& r : energy) {
            if (r.size() < horizon) throw std::invalid_argument("energy forecast shorter than d_max");
            for (double v : r) {
                if (!(v >= 0.0)) throw std::invalid_argument("energy forecast must be non-negative");
            }
        }
        for (std::size_t i = 0; i < clients.size(); ++i) {
            const auto& c = clients[i];
            if (i > 0 && clients[i - 1].index >= c.index) {
                throw std::invalid_argument("selection clients must be sorted by index");
            }
            if (c.domain >= energy.size()) throw std::invalid_argument("selection client references unknown domain");
            if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) throw std::invalid_argument("sigma must be >= 0");
            if (!(c.delta > 0.0)) throw std::invalid_argument("delta must be positive");
            if (c.m_min < 1 || c.m_max < c.m_min) throw std::invalid_argument("invalid batch bounds");
            if (c.spare.size() < horizon) throw std::invalid_argument("capacity forecast shorter than d_max");
            for (Batches s : c.spare) {
                if (s < 0) throw std::invalid_argument("spare capacity must be non-negative");
            }
        }
    }
};

/// Clients, expected batch schedule and duration of one round.
struct RoundPlan {
    /// Scenario indices, ascending.
    std::vector<std::size_t> selected;
    /// expected[i][t] for selected[i], t = 0 .. duration - 1.
    std::vector<std::vector<Batches>> expected;
    Timestep duration = 0;
    double objective = 0.0;
    /// Weakest solver status among the per-domain solves.
    solver::MipStatus status = solver::MipStatus::optimal;
    /// Duration search evaluations (feasibility checks).
    std::size_t evaluations = 0;
    std::size_t mip_solves = 0;
    /// The fast search failed to produce a solution and a linear scan took over.
    bool linear_fallback = false;

    [[nodiscard]] Batches total_expected(std::size_t i) const {
        Batches s = 0;
        for (Batches b : expected.at(i)) s += b;
        return s;
    }
};

/// Builds the selection view of a scenario at round start `t0`.
inline SelectionInput make_selection_input(const Scenario& scenario, const ResourceTraces& traces,
                                           std::span<const double> sigma, Timestep t0, std::size_t n,
                                           Timestep d_max) {
    if (sigma.size() != scenario.num_clients()) throw std::invalid_argument("one sigma per client required");
    SelectionInput in;
    in.n = n;
    in.d_max = d_max;
    in.energy.reserve(scenario.num_domains());
    for (std::size_t p = 0; p < scenario.num_domains(); ++p) {
        in.energy.push_back(traces.excess_energy_forecast(p, t0, d_max));
    }
    in.clients.reserve(scenario.num_clients());
    for (std::size_t c = 0; c < scenario.num_clients(); ++c) {
        const auto& spec = scenario.clients()[c];
        SelectionClient sc;
        sc.index = c;
        sc.domain = scenario.domain_of(c);
        sc.sigma = sigma[c];
        sc.delta = spec.energy_per_batch;
        sc.m_min = spec.min_batches;
        sc.m_max = spec.max_batches;
        sc.spare = traces.spare_capacity_forecast(c, t0, d_max);
        in.clients.push_back(std::move(sc));
    }
    return in;
}

/// Violations of the plan invariants against the forecasts in `input`;
/// empty when the plan is valid.
inline std::vector<std::string> check_plan(const SelectionInput& input, const RoundPlan& plan) {
    std::vector<std::string> errors;
    if (plan.duration < 1 || plan.duration > input.d_max) errors.push_back("duration outside [1, d_max]");
    if (plan.selected.size() != input.n) errors.push_back("selected count differs from n");
    if (plan.expected.size() != plan.selected.size()) {
        errors.push_back("schedule count differs from selected count");
        return errors;
    }
    std::vector<std::size_t> pos(plan.selected.size());
    for (std::size_t i = 0; i < plan.selected.size(); ++i) {
        if (i > 0 && plan.selected[i - 1] >= plan.selected[i]) errors.push_back("selected not strictly ascending");
        auto it = std::lower_bound(input.clients.begin(), input.clients.end(), plan.selected[i],
                                   [](const SelectionClient& c, std::size_t idx) { return c.index < idx; });
        if (it == input.clients.end() || it->index != plan.selected[i]) {
            errors.push_back("selected client " + std::to_string(plan.selected[i]) + " not in input");
            return errors;
        }
        pos[i] = static_cast<std::size_t>(it - input.clients.begin());
    }
    const auto d = static_cast<std::size_t>(std::max<Timestep>(plan.duration, 0));
    std::vector<std::vector<double>> used(input.energy.size(), std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < plan.selected.size(); ++i) {
        const auto& c = input.clients[pos[i]];
        const auto& row = plan.expected[i];
        const std::string who = "client " + std::to_string(c.index) + ": ";
        if (row.size() != d) {
            errors.push_back(who + "schedule length differs from duration");
            continue;
        }
        Batches total = 0;
        for (std::size_t t = 0; t < d; ++t) {
            if (row[t] < 0) errors.push_back(who + "negative batches");
            if (row[t] > c.spare[t]) errors.push_back(who + "exceeds spare capacity at t=" + std::to_string(t));
            total += row[t];
            used[c.domain][t] += static_cast<double>(row[t]) * c.delta;
        }
        if (total < c.m_min) errors.push_back(who + "below m_min");
        if (total > c.m_max) errors.push_back(who + "above m_max");
    }
    for (std::size_t p = 0; p < used.size(); ++p) {
        for (std::size_t t = 0; t < d; ++t) {
            const double r = input.energy[p][t];
            if (used[p][t] > r + 1e-9 * std::max(1.0, r)) {
                errors.push_back("domain " + std::to_string(p) + " over budget at t=" + std::to_string(t));
            }
        }
    }
    return errors;
}

} // namespace fedzero
