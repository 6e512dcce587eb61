#include "support/fixtures.hpp"

#include <fedzero/core/client_presets.hpp>
#include <fedzero/traces/generators.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace fedzero;
using fixture::ClientDef;

namespace {

std::vector<ClientSpec> specs(std::size_t n, std::size_t domains) {
    std::vector<ClientSpec> out;
    for (std::size_t i = 0; i < n; ++i) {
        ClientSpec c;
        c.id = fixture::client_id(i);
        c.domain_id = "d" + std::to_string(i % domains);
        c.max_capacity = 5;
        c.energy_per_batch = 2.0;
        c.min_batches = 10;
        c.max_batches = 50;
        c.num_samples = 100;
        out.push_back(c);
    }
    return out;
}

std::vector<PowerDomain> domains_for(const std::vector<ClientSpec>& clients, std::size_t domains) {
    std::vector<PowerDomain> out(domains);
    for (std::size_t p = 0; p < domains; ++p) out[p].id = "d" + std::to_string(p);
    for (const auto& c : clients) out[std::stoul(c.domain_id.substr(1))].client_ids.push_back(c.id);
    return out;
}

ScenarioErrorKind error_kind(const std::vector<ClientSpec>& c, const std::vector<PowerDomain>& d) {
    try {
        (void)validate_scenario(c, d, {});
    } catch (const ScenarioError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected ScenarioError";
    return ScenarioErrorKind::invariant_violation;
}

} // namespace

TEST(ValidateScenario, AcceptsDisjointDomains) {
    const auto clients = specs(100, 10);
    const auto s = validate_scenario(clients, domains_for(clients, 10), {});
    EXPECT_EQ(s.num_clients(), 100U);
    std::vector<int> seen(100, 0);
    for (std::size_t p = 0; p < s.num_domains(); ++p) {
        for (auto c : s.members(p)) {
            ++seen[c];
            EXPECT_EQ(s.domain_of(c), p);
        }
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
}

TEST(ValidateScenario, RejectsClientInTwoDomains) {
    const auto clients = specs(4, 2);
    auto domains = domains_for(clients, 2);
    domains[1].client_ids.push_back(clients[0].id);
    EXPECT_EQ(error_kind(clients, domains), ScenarioErrorKind::duplicate_client_in_multiple_domains);
}

TEST(ValidateScenario, RejectsUnknownReferences) {
    auto clients = specs(4, 2);
    auto domains = domains_for(clients, 2);
    domains[0].client_ids.push_back("ghost");
    EXPECT_EQ(error_kind(clients, domains), ScenarioErrorKind::unknown_client_reference);
    domains = domains_for(clients, 2);
    clients[3].domain_id = "d9";
    EXPECT_EQ(error_kind(clients, domains), ScenarioErrorKind::unknown_domain_reference);
}

TEST(ValidateScenario, NamesTheViolatedField) {
    auto clients = specs(2, 1);
    clients[1].min_batches = 500;
    clients[1].max_batches = 100;
    try {
        (void)validate_scenario(clients, domains_for(clients, 1), {});
        FAIL() << "expected ScenarioError";
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.kind(), ScenarioErrorKind::invariant_violation);
        EXPECT_EQ(e.field(), "max_batches");
    }
    clients = specs(2, 1);
    SimulationParams p;
    p.max_round_duration = 0;
    EXPECT_THROW((void)validate_scenario(clients, domains_for(clients, 1), p), ScenarioError);
}

TEST(ClientPresets, EpochsMapToBatches) {
    EXPECT_EQ(batches_for_epochs(95, 10, 1), 10);
    EXPECT_EQ(batches_for_epochs(95, 10, 5), 50);
    EXPECT_EQ(batches_for_epochs(100, 10, 5), 50);
}

TEST(TraceSeries, HoldsSamplesAndRejectsOutOfRange) {
    const TraceSeries s(10, {1.0, 2.0}, 5);
    EXPECT_EQ(s.end(), 20);
    EXPECT_EQ(s.at(14), 1.0);
    EXPECT_EQ(s.at(15), 2.0);
    EXPECT_EQ(s.slice(13, 4), (std::vector<double>{1.0, 1.0, 2.0, 2.0}));
    EXPECT_THROW((void)s.at(20), TraceExhausted);
    EXPECT_THROW((void)s.at(9), TraceExhausted);
    EXPECT_THROW((void)s.slice(18, 3), TraceExhausted);
    EXPECT_THROW(TraceSeries(0, {-1.0}), std::invalid_argument);
}

TEST(Forecast, PerfectModelIsIdentity) {
    const auto env = fixture::make_env({{0}}, {{800.0, 800.0, 0.0}});
    EXPECT_EQ(env.traces.excess_energy_forecast(0, 0, 3), (std::vector<double>{800.0, 800.0, 0.0}));
    EXPECT_THROW((void)env.traces.excess_energy_forecast(0, 1, 3), TraceExhausted);
}

TEST(Forecast, NoiseHasUnitMeanAcrossSeeds) {
    const TraceSeries actual(0, {100.0, 100.0});
    ForecastModel m{ForecastKind::multiplicative_noise, 0.1, 0.0, 7, 1};
    const auto one = m.apply(actual, 0);
    for (double v : one.samples()) {
        EXPECT_GT(v, 0.0);
        EXPECT_TRUE(std::isfinite(v));
    }
    double sum = 0.0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) {
        m.seed = static_cast<std::uint64_t>(s);
        const auto fc = m.apply(actual, 0);
        for (double v : fc.samples()) sum += v;
    }
    EXPECT_NEAR(sum / (2.0 * seeds), 100.0, 2.0);
}

TEST(Forecast, IsDeterministicPerSeed) {
    const TraceSeries actual(0, std::vector<double>(50, 10.0));
    const ForecastModel m{ForecastKind::multiplicative_noise, 0.3, 0.1, 11, 20};
    EXPECT_EQ(m.apply(actual, 4), m.apply(actual, 4));
    EXPECT_NE(m.apply(actual, 4), m.apply(actual, 5));
}

TEST(Forecast, SpareCapacityIsClampedToCapacity) {
    ForecastConfig fc;
    fc.capacity = {ForecastKind::multiplicative_noise, 0.8, 0.5, 3, 1};
    std::vector<double> load(200);
    for (std::size_t i = 0; i < load.size(); ++i) load[i] = static_cast<double>(i % 10) / 10.0;
    const auto env = fixture::make_env({{0, 11, 1.0, 1, 10, 100, load}}, {std::vector<double>(200, 1.0)}, {}, fc);
    for (auto v : env.traces.spare_capacity_forecast(0, 0, 200)) {
        EXPECT_GE(v, 0);
        EXPECT_LE(v, 11);
    }
}

TEST(Forecast, SpareCapacityExamples) {
    const auto env = fixture::make_env({{0, 11}, {0, 11, 1.0, 1, 10, 100, {1.0, 1.0, 1.0}}, {0, 10, 1.0, 1, 10, 100, {0.25, 0.5, 0.99}}},
                                       {{1.0, 1.0, 1.0}});
    EXPECT_EQ(env.traces.spare_capacity_forecast(0, 0, 3), (std::vector<Batches>{11, 11, 11}));
    EXPECT_EQ(env.traces.spare_capacity_forecast(1, 0, 3), (std::vector<Batches>{0, 0, 0}));
    EXPECT_EQ(env.traces.spare_capacity_forecast(2, 0, 3), (std::vector<Batches>{7, 5, 0}));
    EXPECT_EQ(env.traces.actual_spare_capacity(2, 1), 5);
}

TEST(Forecast, NoLoadForecastModeAssumesFullCapacity) {
    ForecastConfig fc;
    fc.capacity_forecasts = false;
    const auto env = fixture::make_env({{0, 11, 1.0, 1, 10, 100, {1.0, 1.0}}}, {{1.0, 1.0}}, {}, fc);
    EXPECT_EQ(env.traces.spare_capacity_forecast(0, 0, 2), (std::vector<Batches>{11, 11}));
    EXPECT_EQ(env.traces.actual_spare_capacity(0, 0), 0);
}

namespace {

SolarOptions solar(SolarLayout layout) {
    SolarOptions o;
    o.layout = layout;
    o.num_domains = 10;
    o.days = 2;
    o.seed = 21;
    return o;
}

Timestep peak_time(const TraceSeries& s) {
    const auto& v = s.samples();
    return static_cast<Timestep>(std::max_element(v.begin(), v.end()) - v.begin()) * s.native_resolution();
}

} // namespace

TEST(SolarGenerator, CoLocatedDomainsShareAPhase) {
    const auto sc = generate_solar_scenario(solar(SolarLayout::co_located));
    for (auto off : sc.phase_offsets) EXPECT_EQ(off, 0);
    for (const auto& tr : sc.traces) {
        // Night hours: midnight to 4:00.
        for (double v : tr.slice(0, 240)) EXPECT_EQ(v, 0.0);
    }
}

TEST(SolarGenerator, GlobalDomainsCoverTheDay) {
    const auto sc = generate_solar_scenario(solar(SolarLayout::global));
    std::vector<Timestep> offsets(sc.phase_offsets);
    std::sort(offsets.begin(), offsets.end());
    EXPECT_EQ(std::unique(offsets.begin(), offsets.end()), offsets.end());
    for (Timestep t = 0; t < 1440; ++t) {
        const bool lit = std::any_of(sc.traces.begin(), sc.traces.end(), [&](const TraceSeries& s) { return s.at(t) > 0.0; });
        EXPECT_TRUE(lit) << t;
    }
    EXPECT_NE(peak_time(sc.traces[0]), peak_time(sc.traces[5]));
}

TEST(SolarGenerator, PeaksAtPeakWattsTimesStep) {
    for (int minutes : {1, 5}) {
        auto o = solar(SolarLayout::global);
        o.timestep_minutes = minutes;
        for (const auto& tr : generate_solar_scenario(o).traces) {
            EXPECT_DOUBLE_EQ(*std::max_element(tr.samples().begin(), tr.samples().end()), 800.0 * minutes);
        }
    }
}

TEST(SolarGenerator, HoldsFiveMinuteSamples) {
    const auto tr = generate_solar_scenario(solar(SolarLayout::co_located)).traces[0];
    EXPECT_EQ(tr.native_resolution(), 5);
    for (Timestep t = 0; t < tr.end(); t += 5) {
        for (Timestep k = 1; k < 5; ++k) EXPECT_EQ(tr.at(t), tr.at(t + k));
    }
}

TEST(LoadGenerator, StaysWithinUnitInterval) {
    LoadOptions o;
    o.num_clients = 5;
    o.days = 1;
    for (const auto& tr : generate_load_traces(o)) {
        EXPECT_EQ(tr.end(), 1440);
        for (double v : tr.samples()) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}
