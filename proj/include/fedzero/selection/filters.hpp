#pragma once

/// @file filters.hpp
/// @brief Power-domain and client pre-filters applied before each duration's solve.

#include <fedzero/selection/types.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fedzero {

/// True if every r_t, t = 0 .. d - 1, is strictly positive.
inline bool domain_has_energy(std::span<const Energy> r, Timestep d) {
    const auto n = std::min(static_cast<std::size_t>(std::max<Timestep>(d, 0)), r.size());
    for (std::size_t t = 0; t < n; ++t) {
        if (!(r[t] > 0.0)) return false;
    }
    return static_cast<Timestep>(n) == d;
}

/// Domains that keep excess energy through the whole round.
inline std::vector<bool> filter_power_domains(const SelectionInput& input, Timestep d) {
    std::vector<bool> kept(input.energy.size());
    for (std::size_t p = 0; p < kept.size(); ++p) kept[p] = domain_has_energy(input.energy[p], d);
    return kept;
}

/// Σ_t min(spare_t, r_t / δ) over the first d timesteps.
inline double optimistic_budget(std::span<const Batches> spare, std::span<const Energy> r, Energy delta, Timestep d) {
    double sum = 0.0;
    for (std::size_t t = 0; t < static_cast<std::size_t>(d); ++t) {
        sum += std::min(static_cast<double>(spare[t]), r[t] / delta);
    }
    return sum;
}

/// True if the client could reach m_min in d timesteps with its domain's whole budget.
inline bool passes_budget_filter(const SelectionClient& c, std::span<const Energy> r, Timestep d) {
    return optimistic_budget(c.spare, r, c.delta, d) >= static_cast<double>(c.m_min);
}

/// Positions (into input.clients) of clients with σ > 0 in a kept domain that
/// pass the budget filter.
inline std::vector<std::size_t> filter_clients(const SelectionInput& input, const std::vector<bool>& kept_domains,
                                               Timestep d) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < input.clients.size(); ++i) {
        const auto& c = input.clients[i];
        if (!(c.sigma > 0.0) || !kept_domains[c.domain]) continue;
        if (passes_budget_filter(c, input.energy[c.domain], d)) out.push_back(i);
    }
    return out;
}

} // namespace fedzero
