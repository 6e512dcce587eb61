/// fedzero command-line tool: generate scenarios, run experiments, profile
/// selection and summarize result directories.

#include <fedzero/harness/environment.hpp>
#include <fedzero/harness/experiment.hpp>
#include <fedzero/harness/output.hpp>
#include <fedzero/harness/profile.hpp>
#include <fedzero/io/csv.hpp>
#include <fedzero/io/scenario_json.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fedzero;

namespace {

struct GenerateArgs {
    std::size_t clients = 100;
    std::size_t domains = 10;
    int days = 7;
    std::string layout = "global";
    double noise = 0.1;
    Timestep correlation = 60;
    std::int64_t n = 10;
    bool no_load = false;
    bool uniform = false;
    std::uint64_t seed = 0;
    std::string out;
};

struct RunArgs {
    std::string scenario;
    std::string strategy = "fedzero";
    std::uint64_t seed = 0;
    int days = 7;
    std::string out;
    std::string privileged;
    std::optional<bool> blocklist;
    bool perfect = false;
};

struct ProfileArgs {
    std::vector<std::size_t> clients{100};
    std::size_t domains = 0;
    std::vector<Timestep> horizon{60};
    std::size_t trials = 5;
    std::size_t n = 10;
    std::uint64_t seed = 0;
    std::string out;
};

struct ReportArgs {
    std::string in;
    std::string out;
    std::optional<double> target;
};

int generate(const GenerateArgs& a) {
    SyntheticOptions opt;
    opt.num_clients = a.clients;
    opt.num_domains = a.domains;
    opt.days = a.days;
    opt.layout = solar_layout_from_string(a.layout);
    opt.forecast_noise = a.noise;
    opt.forecast_correlation = a.correlation;
    opt.client_load = !a.no_load;
    if (a.uniform) {
        opt.client_class = ClientClass::mid;
        opt.sample_skew = 0.0;
    }
    opt.params.clients_per_round = a.n;
    opt.seed = a.seed;
    const auto doc = synthetic_document(opt);
    const fs::path out(a.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    io::save_scenario(out, doc);
    std::cout << "wrote " << out.string() << " (" << doc.scenario.num_clients() << " clients, "
              << doc.scenario.num_domains() << " domains)\n";
    return 0;
}

int run(const RunArgs& a) {
    auto doc = io::load_scenario(a.scenario);
    if (a.perfect) doc.scenario = doc.scenario.with_forecast({});
    auto env = make_environment(doc, fs::path(a.scenario).parent_path());
    if (!a.privileged.empty()) env = imbalanced_scenario(env, env.scenario.domain_index(a.privileged));
    ExperimentOptions opt;
    opt.days = a.days;
    opt.seed = a.seed;
    opt.blocklist = a.blocklist;
    const auto kind = strategy_from_string(a.strategy);
    const auto m = run_experiment(env, kind, opt);
    write_results(a.out, env.scenario, m);
    const auto [mean, sd] = m.duration_stats();
    std::cout << m.strategy << " seed " << m.seed << ": " << m.rounds.size() << " rounds, duration " << mean << " +- "
              << sd << " timesteps, energy " << m.total_energy() << ", final accuracy " << m.final_accuracy() << '\n';
    if (m.audited() && (m.energy_violations() > 0 || m.capacity_violations() > 0)) {
        std::cerr << "audit failed: " << m.energy_violations() << " energy, " << m.capacity_violations()
                  << " capacity violations\n";
        return 3;
    }
    return 0;
}

int profile(const ProfileArgs& a) {
    std::optional<std::ofstream> file;
    std::optional<io::CsvWriter> csv;
    if (!a.out.empty()) {
        const fs::path out(a.out);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        file.emplace(out);
        csv.emplace(*file, std::vector<std::string>{"clients", "domains", "horizon", "trials", "found",
                                                    "median_seconds", "min_seconds", "max_seconds"});
    }
    io::CsvWriter table(std::cout, {"clients", "domains", "horizon", "trials", "found", "median_seconds",
                                    "min_seconds", "max_seconds"});
    for (auto clients : a.clients) {
        for (auto horizon : a.horizon) {
            ProfileOptions opt;
            opt.num_clients = clients;
            opt.num_domains = a.domains;
            opt.horizon = horizon;
            opt.trials = a.trials;
            opt.clients_per_round = a.n;
            opt.seed = a.seed;
            const auto r = profile_selection(opt);
            const auto [lo, hi] = std::minmax_element(r.seconds.begin(), r.seconds.end());
            table.row(r.num_clients, r.num_domains, r.horizon, r.seconds.size(), r.found, r.median(), *lo, *hi);
            if (csv) csv->row(r.num_clients, r.num_domains, r.horizon, r.seconds.size(), r.found, r.median(), *lo, *hi);
        }
    }
    return 0;
}

int report(const ReportArgs& a) {
    const auto runs = find_runs(a.in);
    if (runs.empty()) {
        std::cerr << "no runs (summary.csv) under " << a.in << '\n';
        return 2;
    }
    const double target = a.target.value_or(target_accuracy(runs));
    const fs::path out = a.out.empty() ? fs::path(a.in) / "report" : fs::path(a.out);
    write_report(runs, target, out);
    std::cout << runs.size() << " runs, target accuracy " << target << ", wrote " << out.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-aware federated learning client selection simulator"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a synthetic scenario document");
    g->add_option("--clients", gen.clients, "Number of clients")->check(CLI::PositiveNumber);
    g->add_option("--domains", gen.domains, "Number of power domains")->check(CLI::PositiveNumber);
    g->add_option("--days", gen.days, "Days of traces to cover")->check(CLI::NonNegativeNumber);
    g->add_option("--layout", gen.layout, "Solar layout")->check(CLI::IsMember({"global", "co_located"}));
    g->add_option("--noise", gen.noise, "Forecast noise sigma (0 = perfect forecasts)")->check(CLI::NonNegativeNumber);
    g->add_option("--correlation", gen.correlation, "Forecast error correlation length in timesteps")
        ->check(CLI::PositiveNumber);
    g->add_option("--n", gen.n, "Clients per round")->check(CLI::PositiveNumber);
    g->add_flag("--no-load", gen.no_load, "Clients have no competing load");
    g->add_flag("--uniform", gen.uniform, "Identical mid-class clients with equal data");
    g->add_option("--seed", gen.seed, "Generator seed");
    g->add_option("--out", gen.out, "Output JSON file")->required();

    RunArgs ra;
    auto* r = app.add_subcommand("run", "Simulate one strategy on one scenario");
    r->add_option("--scenario", ra.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    r->add_option("--strategy", ra.strategy, "Strategy kind")
        ->check(CLI::IsMember({"fedzero", "random", "random_1_3n", "random_fc", "oort", "oort_1_3n", "oort_fc",
                               "upper_bound"}));
    r->add_option("--seed", ra.seed, "Experiment seed");
    r->add_option("--days", ra.days, "Simulated days")->check(CLI::NonNegativeNumber);
    r->add_option("--out", ra.out, "Output directory")->required();
    r->add_option("--privileged-domain", ra.privileged, "Give this domain unlimited energy and idle clients");
    r->add_option("--blocklist", ra.blocklist, "Override the scenario's FedZero blocklist flag (true/false)");
    r->add_flag("--perfect-forecasts", ra.perfect, "Replace forecast models by the actual traces");

    ProfileArgs pa;
    auto* p = app.add_subcommand("profile", "Time FedZero selection on synthetic populations");
    p->add_option("--clients", pa.clients, "Client counts")->check(CLI::PositiveNumber);
    p->add_option("--domains", pa.domains, "Power domains (0 = one per ten clients)");
    p->add_option("--horizon", pa.horizon, "Maximum round durations")->check(CLI::PositiveNumber);
    p->add_option("--trials", pa.trials, "Trials per size")->check(CLI::PositiveNumber);
    p->add_option("--n", pa.n, "Clients per round")->check(CLI::PositiveNumber);
    p->add_option("--seed", pa.seed, "Seed");
    p->add_option("--out", pa.out, "Also write the table to this CSV file");

    ReportArgs rep;
    auto* q = app.add_subcommand("report", "Summarize all runs below a directory");
    q->add_option("--in", rep.in, "Directory with run outputs")->required()->check(CLI::ExistingDirectory);
    q->add_option("--out", rep.out, "Report directory (default <in>/report)");
    q->add_option("--target", rep.target, "Target accuracy (default: weakest Random run's best)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*g) return generate(gen);
        if (*r) return run(ra);
        if (*p) return profile(pa);
        if (*q) return report(rep);
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error (" << e.field() << "): " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
