#pragma once

/// @file output.hpp
/// @brief Metrics CSV files for one run and the cross-run report.

#include <fedzero/harness/experiment.hpp>
#include <fedzero/io/csv.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace fedzero {

/// Files written by write_results; timings.csv holds wall-clock values and is
/// the only file that differs between identical runs.
inline const std::vector<std::string>& deterministic_outputs() {
    static const std::vector<std::string> files{"rounds.csv", "round_energy.csv", "clients.csv", "domains.csv",
                                                "summary.csv"};
    return files;
}

namespace detail {

inline std::string join_ids(const std::vector<std::size_t>& v, const Scenario& s) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += s.clients()[v[i]].id;
    }
    return out;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw io::CsvError("cannot write " + p.string());
    return out;
}

} // namespace detail

inline void write_results(const std::filesystem::path& dir, const Scenario& s, const ExperimentMetrics& m) {
    std::filesystem::create_directories(dir);
    {
        auto f = detail::open_out(dir / "rounds.csv");
        io::CsvWriter w(f, {"round", "start", "duration", "planned_duration", "selected", "accepted", "discarded",
                            "num_selected", "num_accepted", "accepted_batches", "energy", "accepted_energy",
                            "accuracy", "blocklist_size", "energy_violations", "capacity_violations", "audited"});
        for (const auto& r : m.rounds) {
            w.row(r.index, r.start, r.duration, r.planned_duration, detail::join_ids(r.selected, s),
                  detail::join_ids(r.accepted, s), detail::join_ids(r.discarded, s), r.selected.size(),
                  r.accepted.size(), r.accepted_batches, r.energy, r.accepted_energy, r.accuracy, r.blocklist_size,
                  r.energy_violations, r.capacity_violations, r.audited);
        }
    }
    {
        auto f = detail::open_out(dir / "round_energy.csv");
        io::CsvWriter w(f, {"round", "domain", "energy"});
        for (const auto& r : m.rounds) {
            for (std::size_t p = 0; p < r.domain_energy.size(); ++p) {
                if (r.domain_energy[p] > 0.0) w.row(r.index, s.domains()[p].id, r.domain_energy[p]);
            }
        }
    }
    const auto pct = m.participation_percent();
    {
        auto f = detail::open_out(dir / "clients.csv");
        io::CsvWriter w(f, {"client", "domain", "participation", "participation_percent", "times_selected", "batches",
                            "energy"});
        for (std::size_t c = 0; c < s.num_clients(); ++c) {
            w.row(s.clients()[c].id, s.domains()[m.client_domain[c]].id, m.participation[c], pct[c],
                  m.times_selected[c], m.client_batches[c], m.client_energy[c]);
        }
    }
    {
        auto f = detail::open_out(dir / "domains.csv");
        io::CsvWriter w(f, {"domain", "clients", "mean_participation_percent", "std_participation_percent", "energy"});
        const auto dp = m.domain_participation();
        std::vector<Energy> energy(s.num_domains(), 0.0);
        for (const auto& r : m.rounds) {
            for (std::size_t p = 0; p < r.domain_energy.size(); ++p) energy[p] += r.domain_energy[p];
        }
        for (std::size_t p = 0; p < s.num_domains(); ++p) {
            const auto [mean, sd] = p < dp.size() ? dp[p] : std::pair{0.0, 0.0};
            w.row(s.domains()[p].id, s.members(p).size(), mean, sd, energy[p]);
        }
    }
    {
        auto f = detail::open_out(dir / "summary.csv");
        io::CsvWriter w(f, {"key", "value"});
        const auto [dmean, dstd] = m.duration_stats();
        w.row("strategy", m.strategy);
        w.row("seed", m.seed);
        w.row("days", m.days);
        w.row("timestep_minutes", m.timestep_minutes);
        w.row("end", m.end);
        w.row("rounds", m.rounds.size());
        w.row("total_energy", m.total_energy());
        w.row("mean_duration", dmean);
        w.row("std_duration", dstd);
        w.row("final_accuracy", m.final_accuracy());
        w.row("best_accuracy", m.best_accuracy());
        w.row("participation_cv", m.participation_cv());
        w.row("energy_violations", m.energy_violations());
        w.row("capacity_violations", m.capacity_violations());
        w.row("audited", m.audited());
    }
    {
        auto f = detail::open_out(dir / "timings.csv");
        io::CsvWriter w(f, {"t", "seconds", "found"});
        for (const auto& t : m.timings) w.row(t.t, t.seconds, t.found);
    }
}

/// One run directory as read back by the report.
struct RunSummary {
    std::filesystem::path dir;
    std::map<std::string, std::string> summary;
    /// (end of round, accuracy, cumulative energy) per round.
    std::vector<std::tuple<Timestep, double, Energy>> curve;

    [[nodiscard]] const std::string& strategy() const { return summary.at("strategy"); }
    [[nodiscard]] double number(const std::string& key) const { return io::parse_double(summary.at(key)); }
};

inline RunSummary read_run(const std::filesystem::path& dir) {
    RunSummary run;
    run.dir = dir;
    const auto s = io::read_csv(dir / "summary.csv");
    for (const auto& row : s.rows) run.summary[row.at(0)] = row.at(1);
    const auto r = io::read_csv(dir / "rounds.csv");
    const auto start = r.column("start");
    const auto dur = r.column("duration");
    const auto acc = r.column("accuracy");
    const auto en = r.column("energy");
    Energy cumulative = 0.0;
    for (const auto& row : r.rows) {
        cumulative += io::parse_double(row[en]);
        run.curve.emplace_back(io::parse_int(row[start]) + io::parse_int(row[dur]), io::parse_double(row[acc]),
                               cumulative);
    }
    return run;
}

/// Every directory below `root` (including itself) that holds a summary.csv, sorted by path.
inline std::vector<RunSummary> find_runs(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> dirs;
    if (std::filesystem::exists(root / "summary.csv")) dirs.push_back(root);
    for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
        if (e.is_directory() && std::filesystem::exists(e.path() / "summary.csv")) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<RunSummary> runs;
    for (const auto& d : dirs) runs.push_back(read_run(d));
    return runs;
}

/// Lowest best accuracy among the Random runs, so every Random run reaches it.
/// Falls back to all runs when there is no Random run.
inline double target_accuracy(const std::vector<RunSummary>& runs) {
    std::optional<double> random;
    std::optional<double> any;
    for (const auto& r : runs) {
        const double best = r.number("best_accuracy");
        any = any ? std::min(*any, best) : best;
        if (r.strategy() == "random") random = random ? std::min(*random, best) : best;
    }
    return random.value_or(any.value_or(0.0));
}

/// Writes report_summary.csv (one row per run) and report_curves.csv
/// (long format: run, strategy, seed, metric, x, y) into `out`. Participation
/// rows use the client's domain as x.
inline void write_report(const std::vector<RunSummary>& runs, double target, const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    {
        auto f = detail::open_out(out / "report_summary.csv");
        io::CsvWriter w(f, {"run", "strategy", "seed", "rounds", "mean_duration", "std_duration", "total_energy",
                            "final_accuracy", "participation_cv", "target_accuracy", "time_to_accuracy",
                            "energy_to_accuracy"});
        for (const auto& r : runs) {
            std::string tta;
            std::string eta;
            for (const auto& [t, acc, e] : r.curve) {
                if (acc >= target) {
                    tta = std::to_string(t);
                    eta = io::format_double(e);
                    break;
                }
            }
            w.row(r.dir.filename().string(), r.strategy(), r.summary.at("seed"), r.summary.at("rounds"),
                  r.summary.at("mean_duration"), r.summary.at("std_duration"), r.summary.at("total_energy"),
                  r.summary.at("final_accuracy"), r.summary.at("participation_cv"), target, tta, eta);
        }
    }
    auto f = detail::open_out(out / "report_curves.csv");
    io::CsvWriter w(f, {"run", "strategy", "seed", "metric", "x", "y"});
    for (const auto& r : runs) {
        const auto name = r.dir.filename().string();
        for (const auto& [t, acc, e] : r.curve) {
            w.row(name, r.strategy(), r.summary.at("seed"), "accuracy_over_time", t, acc);
            w.row(name, r.strategy(), r.summary.at("seed"), "accuracy_over_energy", e, acc);
        }
        const auto clients = io::read_csv(r.dir / "clients.csv");
        const auto dom = clients.column("domain");
        const auto pct = clients.column("participation_percent");
        for (const auto& row : clients.rows) {
            w.row(name, r.strategy(), r.summary.at("seed"), "participation_percent", row[dom], io::parse_double(row[pct]));
        }
    }
}

} // namespace fedzero
