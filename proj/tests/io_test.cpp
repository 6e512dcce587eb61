#include "support/fixtures.hpp"

#include <fedzero/harness/environment.hpp>
#include <fedzero/io/csv.hpp>
#include <fedzero/io/scenario_json.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fedzero;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("fedzero_io_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST(TraceCsv, RoundTripsSamplesAndResolution) {
    const TraceSeries s(0, {0.0, 812.5, 1.0 / 3.0}, 5);
    std::stringstream buf;
    io::write_trace_csv(buf, s);
    EXPECT_EQ(io::parse_trace_csv(buf), s);
}

TEST(TraceCsv, ScalesOnLoad) {
    std::istringstream in("timestep,value\n0,800\n1,400\n");
    const auto s = io::parse_trace_csv(in, 5.0);
    EXPECT_EQ(s.samples(), (std::vector<double>{4000.0, 2000.0}));
    EXPECT_EQ(s.native_resolution(), 1);
}

TEST(TraceCsv, RejectsMalformedInput) {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return io::parse_trace_csv(in);
    };
    EXPECT_THROW(parse(""), io::CsvError);
    EXPECT_THROW(parse("t,v\n0,1\n"), io::CsvError);
    EXPECT_THROW(parse("timestep,value\n"), io::CsvError);
    EXPECT_THROW(parse("timestep,value\n0,1\n5,1\n7,1\n"), io::CsvError);
    EXPECT_THROW(parse("timestep,value\n0,abc\n"), io::CsvError);
    EXPECT_THROW(parse("timestep,value\n0,-2\n"), io::CsvError);
    EXPECT_THROW(parse("timestep,value\n3,1\n3,1\n"), io::CsvError);
}

TEST(CsvWriter, FormatsShortestRoundTrip) {
    std::ostringstream out;
    io::CsvWriter w(out, {"a", "b", "c", "d"});
    w.row(std::size_t{3}, 0.1, true, "x");
    EXPECT_EQ(out.str(), "a,b,c,d\n3,0.1,1,x\n");
    EXPECT_THROW(w.row(1, 2), io::CsvError);
    EXPECT_EQ(io::parse_double(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(ScenarioJson, RoundTripsThroughAFile) {
    SyntheticOptions opt;
    opt.num_clients = 12;
    opt.num_domains = 3;
    opt.days = 1;
    opt.seed = 5;
    const auto doc = synthetic_document(opt);
    const auto dir = scratch("roundtrip");
    io::save_scenario(dir / "s.json", doc);
    const auto back = io::load_scenario(dir / "s.json");
    EXPECT_EQ(back.scenario, doc.scenario);
    EXPECT_EQ(back.synthetic, doc.synthetic);
    io::save_scenario(dir / "t.json", back);
    std::ifstream a(dir / "s.json");
    std::ifstream b(dir / "t.json");
    std::stringstream sa;
    std::stringstream sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(ScenarioJson, ReportsValidationErrors) {
    io::Json j = io::to_json(synthetic_document({}));
    j["domains"][1]["client_ids"].push_back(j["domains"][0]["client_ids"][0]);
    try {
        (void)io::document_from_json(j);
        FAIL() << "expected ScenarioError";
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.kind(), ScenarioErrorKind::duplicate_client_in_multiple_domains);
    }
    j = io::to_json(synthetic_document({}));
    j["clients"][0]["max_capacity"] = "many";
    try {
        (void)io::document_from_json(j);
        FAIL() << "expected ScenarioError";
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.kind(), ScenarioErrorKind::invariant_violation);
        EXPECT_EQ(e.field(), "clients");
    }
}

TEST(ScenarioJson, LoadsTraceFilesRelativeToTheDocument) {
    const auto dir = scratch("traces");
    write_file(dir / "sun.csv", "timestep,value\n0,100\n5,200\n");
    write_file(dir / "load.csv", "timestep,value\n0,0.5\n1,0.5\n2,0.5\n3,1\n");
    write_file(dir / "s.json", R"({
  "params": {"timestep_minutes": 1, "clients_per_round": 1},
  "domains": [{"id": "home", "client_ids": ["a", "b"], "energy_trace": "sun.csv"},
              {"id": "lab", "client_ids": ["c"], "unlimited_energy": true}],
  "clients": [
    {"id": "a", "domain_id": "home", "max_capacity": 4, "energy_per_batch": 2.0,
     "min_batches": 1, "max_batches": 5, "num_samples": 10, "load_trace": "load.csv"},
    {"id": "b", "domain_id": "home", "max_capacity": 4, "energy_per_batch": 2.0,
     "min_batches": 1, "max_batches": 5, "num_samples": 10},
    {"id": "c", "domain_id": "lab", "max_capacity": 4, "energy_per_batch": 2.0,
     "min_batches": 1, "max_batches": 5, "num_samples": 10}
  ]
})");
    const auto env = load_environment(dir / "s.json");
    EXPECT_EQ(env.traces.actual_excess_energy(0, 7), 200.0);
    EXPECT_EQ(env.traces.actual_excess_energy(1, 1000000), kUnlimitedEnergy);
    EXPECT_EQ(env.traces.actual_spare_capacity(0, 0), 2);
    EXPECT_EQ(env.traces.actual_spare_capacity(0, 3), 0);
    EXPECT_EQ(env.traces.actual_spare_capacity(1, 3), 4);
    EXPECT_THROW((void)env.traces.actual_excess_energy(0, 10), TraceExhausted);
}

TEST(ScenarioJson, MissingEnergySourceIsAnError) {
    const auto dir = scratch("missing");
    write_file(dir / "s.json", R"({"domains": [{"id": "d", "client_ids": ["a"]}],
  "clients": [{"id": "a", "domain_id": "d", "max_capacity": 1, "energy_per_batch": 1,
               "min_batches": 1, "max_batches": 1, "num_samples": 1}]})");
    EXPECT_THROW((void)load_environment(dir / "s.json"), ScenarioError);
}

TEST(SyntheticEnvironment, BuildsAValidPopulation) {
    SyntheticOptions opt;
    opt.num_clients = 30;
    opt.num_domains = 4;
    opt.days = 1;
    opt.seed = 2;
    const auto env = synthetic_environment(opt);
    EXPECT_EQ(env.scenario.num_clients(), 30U);
    EXPECT_GE(env.traces.end(), 2 * 1440);
    std::int64_t total = 0;
    for (const auto& c : env.scenario.clients()) {
        total += c.num_samples;
        EXPECT_GE(c.num_samples, opt.params.batch_size);
        EXPECT_EQ(c.min_batches, batches_for_epochs(c.num_samples, opt.params.batch_size, 1));
        EXPECT_EQ(c.max_batches, batches_for_epochs(c.num_samples, opt.params.batch_size, 5));
    }
    EXPECT_NEAR(static_cast<double>(total), 50000.0, 50000.0 * 0.02);
    const auto again = synthetic_environment(opt);
    EXPECT_EQ(again.scenario, env.scenario);
    EXPECT_EQ(again.traces.excess_energy_forecast(1, 600, 60), env.traces.excess_energy_forecast(1, 600, 60));
}

TEST(ImbalancedScenario, OnlyThePrivilegedDomainChanges) {
    SyntheticOptions opt;
    opt.num_clients = 20;
    opt.num_domains = 4;
    opt.days = 1;
    const auto base = synthetic_environment(opt);
    const auto env = imbalanced_scenario(base, 2);
    for (Timestep t : {0, 700, 2000}) {
        EXPECT_EQ(env.traces.actual_excess_energy(2, t), kUnlimitedEnergy);
        for (std::size_t p : {0, 1, 3}) {
            EXPECT_EQ(env.traces.actual_excess_energy(p, t), base.traces.actual_excess_energy(p, t));
        }
        for (std::size_t c = 0; c < 20; ++c) {
            if (env.scenario.domain_of(c) == 2) {
                EXPECT_EQ(env.traces.actual_spare_capacity(c, t), env.scenario.clients()[c].max_capacity);
            } else {
                EXPECT_EQ(env.traces.actual_spare_capacity(c, t), base.traces.actual_spare_capacity(c, t));
            }
        }
    }
}
