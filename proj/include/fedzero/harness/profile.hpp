#pragma once

/// @file profile.hpp
/// @brief Wall-clock profiling of FedZero selection on synthetic populations.

#include <fedzero/fairness/utility.hpp>
#include <fedzero/harness/environment.hpp>
#include <fedzero/selection/selector.hpp>

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fedzero {

struct ProfileOptions {
    std::size_t num_clients = 100;
    /// 0 picks one domain per ten clients.
    std::size_t num_domains = 0;
    /// d_max of the profiled selections.
    Timestep horizon = 60;
    std::size_t trials = 5;
    std::size_t clients_per_round = 10;
    std::uint64_t seed = 0;
};

struct ProfileResult {
    std::size_t num_clients = 0;
    std::size_t num_domains = 0;
    Timestep horizon = 0;
    std::vector<double> seconds;
    /// Trials that found a plan.
    std::size_t found = 0;

    [[nodiscard]] double median() const {
        if (seconds.empty()) return 0.0;
        auto s = seconds;
        std::sort(s.begin(), s.end());
        const std::size_t h = s.size() / 2;
        return s.size() % 2 == 1 ? s[h] : 0.5 * (s[h - 1] + s[h]);
    }
};

/// Each trial draws a fresh population and start time, then times one call
/// of select_round (building the forecast view is not timed).
inline ProfileResult profile_selection(const ProfileOptions& opt) {
    if (opt.num_clients == 0 || opt.trials == 0 || opt.horizon < 1) throw std::invalid_argument("invalid profile options");
    ProfileResult out;
    out.num_clients = opt.num_clients;
    out.num_domains = opt.num_domains == 0 ? std::max<std::size_t>(1, opt.num_clients / 10) : opt.num_domains;
    out.horizon = opt.horizon;
    const Timestep day = 1440;
    for (std::size_t trial = 0; trial < opt.trials; ++trial) {
        SyntheticOptions so;
        so.num_clients = opt.num_clients;
        so.num_domains = out.num_domains;
        so.days = static_cast<int>((opt.horizon + day - 1) / day);
        so.total_samples = static_cast<std::int64_t>(opt.num_clients) * 500;
        so.params.clients_per_round = static_cast<std::int64_t>(opt.clients_per_round);
        so.params.max_round_duration = opt.horizon;
        so.seed = mix_seed(opt.seed, trial);
        const auto env = synthetic_environment(so);
        Rng rng(mix_seed(opt.seed, trial, 0x9f0ULL));
        const Timestep t0 = static_cast<Timestep>(uniform_index(rng, static_cast<std::size_t>(day)));
        std::vector<double> sigma;
        sigma.reserve(opt.num_clients);
        for (const auto& c : env.scenario.clients()) {
            sigma.push_back(statistical_utility(c.num_samples, uniform(rng, 0.5, 2.0), 0));
        }
        const auto input = make_selection_input(env.scenario, env.traces, sigma, t0, opt.clients_per_round, opt.horizon);
        SelectionOptions sel;
        sel.relative_gap = so.params.mip_relative_gap;
        sel.time_limit_seconds = so.params.mip_time_limit_seconds;
        sel.node_limit = static_cast<std::size_t>(so.params.mip_node_limit);
        const auto started = std::chrono::steady_clock::now();
        const auto plan = select_round(input, sel);
        out.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
        if (plan) ++out.found;
    }
    return out;
}

} // namespace fedzero
