#pragma once

// Exhaustive reference for the round-selection program on tiny instances.
// Shares no code with the library beyond the input struct.

#include <fedzero/core/random.hpp>
#include <fedzero/selection/types.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

using fedzero::Batches;
using fedzero::SelectionInput;
using fedzero::Timestep;

struct Shape {
    std::size_t max_domains = 2;
    std::size_t max_clients = 5;
    Timestep max_d = 4;
    std::size_t max_n = 2;
    /// Draws all clients at the maximum count.
    bool crowded = false;
};

inline SelectionInput random_instance(std::uint64_t seed, const Shape& shape = {}) {
    fedzero::Rng rng(fedzero::mix_seed(seed, 0xb7u));
    SelectionInput in;
    const std::size_t domains = 1 + fedzero::uniform_index(rng, shape.max_domains);
    const std::size_t clients = shape.crowded ? shape.max_clients : 1 + fedzero::uniform_index(rng, shape.max_clients);
    in.d_max = 1 + static_cast<Timestep>(fedzero::uniform_index(rng, static_cast<std::size_t>(shape.max_d)));
    in.n = 1 + fedzero::uniform_index(rng, std::min<std::size_t>(shape.max_n, clients));
    const auto h = static_cast<std::size_t>(in.d_max);
    for (std::size_t p = 0; p < domains; ++p) {
        std::vector<double> r(h);
        for (auto& v : r) v = fedzero::uniform01(rng) < 0.15 ? 0.0 : static_cast<double>(fedzero::uniform_index(rng, 13));
        in.energy.push_back(r);
    }
    const double sigmas[] = {0.0, 1.0, 1.0, 2.0, 3.0, 1.5, 0.5};
    for (std::size_t c = 0; c < clients; ++c) {
        fedzero::SelectionClient sc;
        sc.index = c;
        sc.domain = fedzero::uniform_index(rng, domains);
        sc.sigma = sigmas[fedzero::uniform_index(rng, 7)];
        sc.delta = static_cast<double>(1 + fedzero::uniform_index(rng, 3));
        sc.m_min = 1 + static_cast<Batches>(fedzero::uniform_index(rng, 5));
        sc.m_max = sc.m_min + static_cast<Batches>(fedzero::uniform_index(rng, static_cast<std::size_t>(7 - sc.m_min)));
        sc.spare.resize(h);
        for (auto& s : sc.spare) s = static_cast<Batches>(fedzero::uniform_index(rng, 7));
        in.clients.push_back(std::move(sc));
    }
    return in;
}

/// Clients that survive the energy, utility and budget filters at duration d.
inline std::vector<std::size_t> eligible(const SelectionInput& in, Timestep d) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < in.clients.size(); ++i) {
        const auto& c = in.clients[i];
        bool domain_ok = true;
        for (Timestep t = 0; t < d; ++t) domain_ok = domain_ok && in.energy[c.domain][t] > 0.0;
        if (!domain_ok || c.sigma <= 0.0) continue;
        double budget = 0.0;
        for (Timestep t = 0; t < d; ++t) {
            budget += std::min<double>(static_cast<double>(c.spare[t]), in.energy[c.domain][t] / c.delta);
        }
        if (budget >= static_cast<double>(c.m_min)) out.push_back(i);
    }
    return out;
}

/// Best objective over all n-subsets of `pool` and all integer schedules.
inline std::optional<double> best_objective(const SelectionInput& in, const std::vector<std::size_t>& pool, Timestep d) {
    const auto T = static_cast<std::size_t>(d);
    std::optional<double> best;
    std::vector<std::size_t> subset;
    std::vector<std::vector<double>> used(in.energy.size(), std::vector<double>(T, 0.0));

    // Walks (client slot, timestep) cells of the current subset.
    std::function<void(std::size_t, std::size_t, Batches, double)> cell =
        [&](std::size_t j, std::size_t t, Batches total, double value) {
            if (j == subset.size()) {
                if (!best || value > *best) best = value;
                return;
            }
            const auto& c = in.clients[subset[j]];
            if (t == T) {
                if (total < c.m_min || total > c.m_max) return;
                cell(j + 1, 0, 0, value + c.sigma * static_cast<double>(total));
                return;
            }
            for (Batches x = 0; x <= c.spare[t] && total + x <= c.m_max; ++x) {
                const double e = used[c.domain][t] + static_cast<double>(x) * c.delta;
                if (e > in.energy[c.domain][t]) break;
                used[c.domain][t] = e;
                cell(j, t + 1, total + x, value);
                used[c.domain][t] -= static_cast<double>(x) * c.delta;
            }
        };
    std::function<void(std::size_t)> choose = [&](std::size_t from) {
        if (subset.size() == in.n) {
            cell(0, 0, 0, 0.0);
            return;
        }
        for (std::size_t i = from; i < pool.size(); ++i) {
            subset.push_back(pool[i]);
            choose(i + 1);
            subset.pop_back();
        }
    };
    choose(0);
    return best;
}

struct Answer {
    Timestep d = 0;
    double objective = 0.0;
};

/// Linear scan over durations with exhaustive feasibility and optimum.
inline std::optional<Answer> solve(const SelectionInput& in) {
    for (Timestep d = 1; d <= in.d_max; ++d) {
        const auto pool = eligible(in, d);
        if (pool.size() < in.n) continue;
        if (auto v = best_objective(in, pool, d)) return Answer{d, *v};
    }
    return std::nullopt;
}

} // namespace oracle
