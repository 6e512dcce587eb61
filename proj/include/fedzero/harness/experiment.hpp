#pragma once

/// @file experiment.hpp
/// @brief The simulation loop: select, run the round, train, update the ledger.

#include <fedzero/baselines/strategies.hpp>
#include <fedzero/core/random.hpp>
#include <fedzero/fairness/ledger.hpp>
#include <fedzero/harness/environment.hpp>
#include <fedzero/runtime/round_runtime.hpp>
#include <fedzero/training/proxy.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace fedzero {

struct ExperimentOptions {
    int days = 7;
    std::uint64_t seed = 0;
    ProxyConfig proxy;
    double exploration_fraction = 0.1;
    /// Overrides the scenario's blocklist flag for FedZero when set.
    std::optional<bool> blocklist;
};

struct RoundRecord {
    std::int64_t index = 0;
    Timestep start = 0;
    Timestep duration = 0;
    /// Planned duration for FedZero rounds, 0 otherwise.
    Timestep planned_duration = 0;
    std::vector<std::size_t> selected;
    /// Batches computed by each selected client, aligned with `selected`.
    std::vector<Batches> batches;
    std::vector<std::size_t> accepted;
    std::vector<std::size_t> discarded;
    Batches accepted_batches = 0;
    /// All energy consumed, including discarded work.
    Energy energy = 0.0;
    /// Σ accepted batches × δ.
    Energy accepted_energy = 0.0;
    /// Energy per domain (index = domain).
    std::vector<Energy> domain_energy;
    double accuracy = 0.0;
    std::size_t blocklist_size = 0;
    std::size_t energy_violations = 0;
    std::size_t capacity_violations = 0;
    bool audited = true;
};

struct SelectionTiming {
    Timestep t = 0;
    double seconds = 0.0;
    bool found = false;
};

struct ExperimentMetrics {
    std::string strategy;
    std::uint64_t seed = 0;
    int days = 0;
    int timestep_minutes = 1;
    Timestep end = 0;
    std::vector<RoundRecord> rounds;
    std::vector<SelectionTiming> timings;
    std::vector<std::size_t> client_domain;
    std::vector<std::int64_t> participation;
    std::vector<std::int64_t> times_selected;
    std::vector<Batches> client_batches;
    std::vector<Energy> client_energy;

    [[nodiscard]] std::size_t num_domains() const {
        std::size_t n = 0;
        for (auto d : client_domain) n = std::max(n, d + 1);
        return n;
    }

    [[nodiscard]] Energy total_energy() const {
        Energy e = 0.0;
        for (const auto& r : rounds) e += r.energy;
        return e;
    }

    [[nodiscard]] std::size_t energy_violations() const {
        std::size_t v = 0;
        for (const auto& r : rounds) v += r.energy_violations;
        return v;
    }

    [[nodiscard]] std::size_t capacity_violations() const {
        std::size_t v = 0;
        for (const auto& r : rounds) v += r.capacity_violations;
        return v;
    }

    [[nodiscard]] bool audited() const {
        return std::all_of(rounds.begin(), rounds.end(), [](const RoundRecord& r) { return r.audited; });
    }

    /// Mean and population std of round durations in timesteps.
    [[nodiscard]] std::pair<double, double> duration_stats() const {
        std::vector<double> d;
        for (const auto& r : rounds) d.push_back(static_cast<double>(r.duration));
        return mean_std(d);
    }

    [[nodiscard]] double final_accuracy() const { return rounds.empty() ? 0.0 : rounds.back().accuracy; }

    [[nodiscard]] double best_accuracy() const {
        double best = 0.0;
        for (const auto& r : rounds) best = std::max(best, r.accuracy);
        return best;
    }

    /// Simulated timesteps until the end of the first round reaching `target`.
    [[nodiscard]] std::optional<Timestep> time_to_accuracy(double target) const {
        for (const auto& r : rounds) {
            if (r.accuracy >= target) return r.start + r.duration;
        }
        return std::nullopt;
    }

    /// Energy consumed up to and including the first round reaching `target`.
    [[nodiscard]] std::optional<Energy> energy_to_accuracy(double target) const {
        Energy e = 0.0;
        for (const auto& r : rounds) {
            e += r.energy;
            if (r.accuracy >= target) return e;
        }
        return std::nullopt;
    }

    /// Share of rounds each client contributed to, in percent.
    [[nodiscard]] std::vector<double> participation_percent() const {
        std::vector<double> out;
        const double n = std::max<double>(1.0, static_cast<double>(rounds.size()));
        for (auto p : participation) out.push_back(100.0 * static_cast<double>(p) / n);
        return out;
    }

    /// Coefficient of variation of p(c) across clients.
    [[nodiscard]] double participation_cv() const {
        std::vector<double> p(participation.begin(), participation.end());
        const auto [m, s] = mean_std(p);
        return m > 0.0 ? s / m : 0.0;
    }

    /// Mean and std of participation percent within each domain.
    [[nodiscard]] std::vector<std::pair<double, double>> domain_participation() const {
        const auto pct = participation_percent();
        std::vector<std::vector<double>> by(num_domains());
        for (std::size_t c = 0; c < pct.size(); ++c) by[client_domain[c]].push_back(pct[c]);
        std::vector<std::pair<double, double>> out;
        for (const auto& v : by) out.push_back(mean_std(v));
        return out;
    }

    static std::pair<double, double> mean_std(const std::vector<double>& v) {
        if (v.empty()) return {0.0, 0.0};
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return {m, std::sqrt(ss / static_cast<double>(v.size()))};
    }
};

inline StrategyParams strategy_params(const Scenario& s, const ExperimentOptions& opt) {
    StrategyParams p;
    p.n = s.params().clients_per_round;
    p.d_max = s.params().max_round_duration;
    p.over_selection_factor = s.params().over_selection_factor > 1.0 ? s.params().over_selection_factor : 1.3;
    p.exploration_fraction = opt.exploration_fraction;
    p.selection.relative_gap = s.params().mip_relative_gap;
    p.selection.time_limit_seconds = s.params().mip_time_limit_seconds;
    p.selection.node_limit = static_cast<std::size_t>(s.params().mip_node_limit);
    return p;
}

/// Simulates `opt.days` days. When the strategy finds no selection the clock
/// advances one timestep and selection is retried.
inline ExperimentMetrics run_experiment(const Environment& env, StrategyKind kind, const ExperimentOptions& opt) {
    const auto& sc = env.scenario;
    const std::size_t nc = sc.num_clients();
    ExperimentMetrics m;
    m.strategy = std::string(to_string(kind));
    m.seed = opt.seed;
    m.days = opt.days;
    m.timestep_minutes = sc.params().timestep_minutes;
    m.end = static_cast<Timestep>(opt.days) * 1440 / sc.params().timestep_minutes;
    m.client_domain.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) m.client_domain[c] = sc.domain_of(c);
    m.participation.assign(nc, 0);
    m.times_selected.assign(nc, 0);
    m.client_batches.assign(nc, 0);
    m.client_energy.assign(nc, 0.0);
    if (nc == 0) return m;

    std::vector<std::int64_t> samples;
    for (const auto& c : sc.clients()) samples.push_back(c.num_samples);
    const bool blocklist = kind == StrategyKind::fedzero && opt.blocklist.value_or(sc.params().blocklist);
    FairnessLedger ledger(samples, sc.params().alpha, blocklist);
    ProxyConfig pcfg = opt.proxy;
    pcfg.seed = mix_seed(opt.seed, 3);
    ProxyModel model(ProxyModel::weights_from_samples(samples), pcfg);
    const SelectionStrategy strategy(kind, strategy_params(sc, opt));
    Rng select_rng(mix_seed(opt.seed, 1));
    Rng ledger_rng(mix_seed(opt.seed, 2));

    Timestep t = 0;
    bool ticked = false;
    while (t < m.end) {
        if (!ticked) {
            ledger.round_tick(ledger_rng);
            ticked = true;
        }
        const auto started = std::chrono::steady_clock::now();
        const auto sel = strategy.select({sc, env.traces, ledger, t}, select_rng);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        m.timings.push_back({t, secs, sel.has_value()});
        if (!sel) {
            ++t;
            continue;
        }
        RoundConfig cfg;
        cfg.d_max = sc.params().max_round_duration;
        cfg.required_completions = sel->required_completions;
        cfg.unconstrained = sel->unconstrained;
        const auto res = run_round(sc, env.traces, sel->clients, t, cfg);

        RoundRecord rec;
        rec.index = static_cast<std::int64_t>(m.rounds.size());
        rec.start = t;
        rec.duration = res.realized_duration;
        rec.planned_duration = sel->plan ? sel->plan->duration : 0;
        rec.selected = res.participants;
        rec.batches = res.batches;
        rec.discarded = res.discarded;
        rec.domain_energy.assign(sc.num_domains(), 0.0);
        for (const auto& [p, used] : res.energy_consumed) {
            rec.domain_energy[p] = std::accumulate(used.begin(), used.end(), 0.0);
        }
        std::vector<Contribution> contributions;
        std::vector<AcceptedWork> work;
        for (std::size_t i = 0; i < res.participants.size(); ++i) {
            const std::size_t c = res.participants[i];
            Contribution ct{c, res.accepted[i], res.batches[i], res.energy[i], 0.0};
            rec.energy += res.energy[i];
            ++m.times_selected[c];
            if (res.accepted[i]) {
                const auto losses = model.local_train(c, res.batches[i], rec.index);
                ct.mean_squared_loss = mean_squared(losses);
                work.push_back({c, res.batches[i]});
                rec.accepted.push_back(c);
                rec.accepted_batches += res.batches[i];
                rec.accepted_energy += res.energy[i];
                ++m.participation[c];
            }
            m.client_batches[c] += res.batches[i];
            m.client_energy[c] += res.energy[i];
            contributions.push_back(ct);
        }
        model.aggregate(work);
        ledger.record_participation(contributions);
        rec.accuracy = model.accuracy();
        rec.blocklist_size = ledger.blocklist_size();
        rec.energy_violations = res.energy_violations;
        rec.capacity_violations = res.capacity_violations;
        rec.audited = res.audited;
        m.rounds.push_back(std::move(rec));
        t += res.realized_duration;
        ticked = false;
    }
    return m;
}

} // namespace fedzero
