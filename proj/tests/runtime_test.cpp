#include "support/fixtures.hpp"

#include <fedzero/core/random.hpp>
#include <fedzero/runtime/round_runtime.hpp>
#include <fedzero/selection/selector.hpp>

#include <gtest/gtest.h>

#include <numeric>

using namespace fedzero;
using fixture::ClientDef;

namespace {

double sum(const std::vector<Energy>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

struct RandomRound {
    fixture::Env env;
    std::vector<std::size_t> participants;
};

RandomRound random_round(std::uint64_t seed, bool with_load) {
    Rng rng(seed);
    const std::size_t domains = 1 + uniform_index(rng, 2);
    const std::size_t clients = 1 + uniform_index(rng, 5);
    const Timestep steps = 6;
    std::vector<ClientDef> defs;
    for (std::size_t c = 0; c < clients; ++c) {
        ClientDef d;
        d.domain = uniform_index(rng, domains);
        d.capacity = 1 + static_cast<Batches>(uniform_index(rng, 5));
        d.delta = 0.5 + 0.5 * static_cast<double>(uniform_index(rng, 4));
        d.m_min = 1 + static_cast<Batches>(uniform_index(rng, 6));
        d.m_max = d.m_min + static_cast<Batches>(uniform_index(rng, 5));
        if (with_load) {
            for (Timestep t = 0; t < steps; ++t) d.load.push_back(uniform01(rng) < 0.3 ? uniform01(rng) : 0.0);
        }
        defs.push_back(d);
    }
    std::vector<std::vector<double>> energy(domains);
    for (auto& e : energy) {
        for (Timestep t = 0; t < steps; ++t) e.push_back(std::round(uniform(rng, 0, 12) * 2) / 2);
    }
    RandomRound r{fixture::make_env(defs, energy), {}};
    for (std::size_t c = 0; c < clients; ++c) {
        if (uniform01(rng) < 0.8) r.participants.push_back(c);
    }
    return r;
}

} // namespace

TEST(AttributePower, SingleClientGetsMinOfEnergyAndCaps) {
    const std::vector<ShareRequest> one{{2.0, 3, 8, 0, 5}};
    EXPECT_DOUBLE_EQ(attribute_power(one, 7.0)[0], 7.0);
    EXPECT_DOUBLE_EQ(attribute_power(one, 50.0)[0], 10.0);
    const std::vector<ShareRequest> near_max{{2.0, 3, 8, 6, 5}};
    EXPECT_DOUBLE_EQ(attribute_power(near_max, 50.0)[0], 4.0);
}

TEST(AttributePower, SymmetricClientsSplitEvenly) {
    const std::vector<ShareRequest> two{{1.0, 4, 8, 0, 10}, {1.0, 4, 8, 0, 10}};
    const auto s = attribute_power(two, 4.0);
    EXPECT_DOUBLE_EQ(s[0], 2.0);
    EXPECT_DOUBLE_EQ(s[1], 2.0);
}

TEST(AttributePower, ClientsBelowMinimumAreServedFirst) {
    const std::vector<ShareRequest> req{{1.0, 4, 8, 5, 10}, {1.0, 4, 8, 0, 10}};
    const auto s = attribute_power(req, 3.0);
    EXPECT_DOUBLE_EQ(s[0], 0.0);
    EXPECT_DOUBLE_EQ(s[1], 3.0);
}

TEST(AttributePower, WeightsByRemainingEnergyToThreshold) {
    // Remaining δ(m_min − m_comp): 2·3 = 6 and 1·2 = 2 -> 3:1 split of 4.
    const std::vector<ShareRequest> req{{2.0, 3, 10, 0, 10}, {1.0, 2, 10, 0, 10}};
    const auto s = attribute_power(req, 4.0);
    EXPECT_DOUBLE_EQ(s[0], 3.0);
    EXPECT_DOUBLE_EQ(s[1], 1.0);
}

TEST(AttributePower, RedistributesCappedSurplus) {
    // Second client can take only 1 batch; its surplus flows to the first.
    const std::vector<ShareRequest> req{{1.0, 5, 10, 0, 10}, {1.0, 5, 10, 0, 1}};
    const auto s = attribute_power(req, 6.0);
    EXPECT_DOUBLE_EQ(s[1], 1.0);
    EXPECT_DOUBLE_EQ(s[0], 5.0);
}

TEST(AttributePower, ZeroEnergyGivesZeroShares) {
    const std::vector<ShareRequest> req{{1.0, 5, 10, 0, 10}, {1.0, 5, 10, 3, 10}};
    for (double s : attribute_power(req, 0.0)) EXPECT_EQ(s, 0.0);
    EXPECT_THROW(attribute_power(req, -1.0), std::invalid_argument);
}

TEST(AttributePower, NeverExceedsBudgetOrCaps) {
    Rng rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<ShareRequest> req;
        const std::size_t n = 1 + uniform_index(rng, 6);
        for (std::size_t i = 0; i < n; ++i) {
            ShareRequest q;
            q.delta = uniform(rng, 0.1, 3.0);
            q.m_min = 1 + static_cast<Batches>(uniform_index(rng, 8));
            q.m_max = q.m_min + static_cast<Batches>(uniform_index(rng, 8));
            q.m_comp = static_cast<Batches>(uniform_index(rng, static_cast<std::size_t>(q.m_max) + 1));
            q.capacity = static_cast<Batches>(uniform_index(rng, 6));
            req.push_back(q);
        }
        const double r = uniform(rng, 0, 30);
        const auto s = attribute_power(req, r);
        EXPECT_LE(sum(s), r * (1 + 1e-12) + 1e-12);
        for (std::size_t i = 0; i < n; ++i) {
            const auto room = std::min(req[i].capacity, req[i].m_max - req[i].m_comp);
            EXPECT_LE(s[i], req[i].delta * static_cast<double>(room) + 1e-9);
            EXPECT_GE(s[i], 0.0);
        }
    }
}

TEST(StepClient, AppliesEnergyCapacityAndMaximum) {
    EXPECT_EQ(step_client(10.0, 1.0, 4, 0, 20), 4);
    EXPECT_EQ(step_client(2.5, 1.0, 10, 0, 20), 2);
    EXPECT_EQ(step_client(5.0, 1.0, 10, 20, 20), 0);
    EXPECT_EQ(step_client(kUnlimitedEnergy, 1.0, 10, 15, 20), 5);
}

TEST(RunRound, EndsWhenEveryParticipantReachedMinimum) {
    const auto env = fixture::make_env({{0, 2, 1.0, 4, 10}, {0, 2, 1.0, 2, 10}}, {std::vector<double>(10, 4.0)});
    RoundConfig cfg;
    cfg.d_max = 10;
    const std::vector<std::size_t> who{0, 1};
    const auto r = run_round(env.scenario, env.traces, who, 0, cfg);
    EXPECT_EQ(r.realized_duration, 2);
    EXPECT_TRUE(r.accepted[0]);
    EXPECT_TRUE(r.accepted[1]);
    EXPECT_TRUE(r.discarded.empty());
    EXPECT_EQ(r.batches[0], 4);
    EXPECT_EQ(r.batches[1], 4);
    EXPECT_EQ(r.energy_consumed.at(0), (std::vector<Energy>{4.0, 4.0}));
    EXPECT_DOUBLE_EQ(r.total_energy(), 8.0);
}

TEST(RunRound, DiscardsEveryoneWithoutEnergy) {
    const auto env = fixture::make_env({{0, 2, 1.0, 1, 10}, {1, 2, 1.0, 1, 10}},
                                       {std::vector<double>(10, 0.0), std::vector<double>(10, 0.0)});
    RoundConfig cfg;
    cfg.d_max = 5;
    const std::vector<std::size_t> who{0, 1};
    const auto r = run_round(env.scenario, env.traces, who, 2, cfg);
    EXPECT_EQ(r.realized_duration, 5);
    EXPECT_EQ(r.num_accepted(), 0U);
    EXPECT_EQ(r.discarded, who);
    EXPECT_DOUBLE_EQ(r.total_energy(), 0.0);
}

TEST(RunRound, DomainsAreIsolated) {
    const std::vector<ClientDef> defs{{0, 3, 1.0, 6, 6}, {1, 3, 1.0, 6, 6}};
    const auto full = fixture::make_env(defs, {std::vector<double>(8, 3.0), std::vector<double>(8, 3.0)});
    const auto halved = fixture::make_env(defs, {std::vector<double>(8, 1.5), std::vector<double>(8, 3.0)});
    RoundConfig cfg;
    cfg.d_max = 8;
    const std::vector<std::size_t> who{0, 1};
    const auto a = run_round(full.scenario, full.traces, who, 0, cfg);
    const auto b = run_round(halved.scenario, halved.traces, who, 0, cfg);
    EXPECT_EQ(a.realized_duration, 2);
    EXPECT_GT(b.realized_duration, 2);
    EXPECT_EQ(a.energy_consumed.at(1), (std::vector<Energy>{3.0, 3.0}));
    const auto& other = b.energy_consumed.at(1);
    EXPECT_EQ(std::vector<Energy>(other.begin(), other.begin() + 2), (std::vector<Energy>{3.0, 3.0}));
    EXPECT_EQ(a.batches[1], 6);
    EXPECT_EQ(b.batches[1], 6);
    EXPECT_LT(b.energy_consumed.at(0).front(), 3.0);
}

TEST(RunRound, OverSelectionEndsAfterRequiredCompletions) {
    const auto env = fixture::make_env({{0, 5, 1.0, 5, 5}, {1, 1, 1.0, 5, 5}},
                                       {std::vector<double>(10, 5.0), std::vector<double>(10, 5.0)});
    RoundConfig cfg;
    cfg.d_max = 10;
    cfg.required_completions = 1;
    const std::vector<std::size_t> who{0, 1};
    const auto r = run_round(env.scenario, env.traces, who, 0, cfg);
    EXPECT_EQ(r.realized_duration, 1);
    EXPECT_EQ(r.num_accepted(), 1U);
    EXPECT_EQ(r.discarded, (std::vector<std::size_t>{1}));
}

TEST(RunRound, UnconstrainedIgnoresEnergyAndIsNotAudited) {
    const auto env = fixture::make_env({{0, 4, 1.0, 8, 8, 100, std::vector<double>(10, 1.0)}},
                                       {std::vector<double>(10, 0.0)});
    RoundConfig cfg;
    cfg.d_max = 10;
    cfg.unconstrained = true;
    const std::vector<std::size_t> who{0};
    const auto r = run_round(env.scenario, env.traces, who, 0, cfg);
    EXPECT_FALSE(r.audited);
    EXPECT_EQ(r.realized_duration, 2);
    EXPECT_TRUE(r.accepted[0]);
}

TEST(RunRound, CarryFractionalKeepsPartialProgress) {
    const auto env = fixture::make_env({{0, 10, 1.0, 3, 3}}, {std::vector<double>(10, 0.5)});
    RoundConfig cfg;
    cfg.d_max = 10;
    const std::vector<std::size_t> who{0};
    EXPECT_EQ(run_round(env.scenario, env.traces, who, 0, cfg).num_accepted(), 0U);
    cfg.carry_fractional = true;
    const auto r = run_round(env.scenario, env.traces, who, 0, cfg);
    EXPECT_EQ(r.realized_duration, 6);
    EXPECT_TRUE(r.accepted[0]);
}

TEST(RunRound, SettlesRemainderLeftByFlooring) {
    // Proportional split gives 1.5 each; flooring alone would compute 1 + 1.
    const auto env = fixture::make_env({{0, 5, 1.0, 2, 2}, {0, 5, 1.0, 2, 2}}, {std::vector<double>(4, 3.0)});
    RoundConfig cfg;
    cfg.d_max = 4;
    cfg.record_events = true;
    const std::vector<std::size_t> who{0, 1};
    const auto r = run_round(env.scenario, env.traces, who, 0, cfg);
    EXPECT_EQ(r.energy_consumed.at(0).front(), 3.0);
    EXPECT_EQ(r.realized_duration, 2);
    EXPECT_FALSE(r.events.empty());
    cfg.settle_remainder = false;
    const auto plain = run_round(env.scenario, env.traces, who, 0, cfg);
    EXPECT_EQ(plain.energy_consumed.at(0).front(), 2.0);
}

TEST(RunRound, AuditsHoldOnRandomInstances) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto rr = random_round(seed, true);
        RoundConfig cfg;
        cfg.d_max = 6;
        cfg.record_events = true;
        const auto r = run_round(rr.env.scenario, rr.env.traces, rr.participants, 0, cfg);
        EXPECT_EQ(r.energy_violations, 0U);
        EXPECT_EQ(r.capacity_violations, 0U);
        EXPECT_LE(r.realized_duration, cfg.d_max);
        for (const auto& [p, used] : r.energy_consumed) {
            for (std::size_t k = 0; k < used.size(); ++k) {
                EXPECT_LE(used[k], rr.env.traces.actual_excess_energy(p, static_cast<Timestep>(k)) + 1e-9);
            }
        }
        for (const auto& e : r.events) {
            EXPECT_LE(e.batches, rr.env.traces.actual_spare_capacity(e.client, e.t));
        }
        for (std::size_t i = 0; i < r.participants.size(); ++i) {
            const auto& spec = rr.env.scenario.clients()[r.participants[i]];
            EXPECT_LE(r.batches[i], spec.max_batches);
            EXPECT_EQ(r.accepted[i], r.batches[i] >= spec.min_batches);
        }
    }
}

namespace {

bool one_participant_per_domain(const Scenario& sc, std::span<const std::size_t> who) {
    std::vector<bool> seen(sc.num_domains(), false);
    for (auto c : who) {
        if (seen[sc.domain_of(c)]) return false;
        seen[sc.domain_of(c)] = true;
    }
    return true;
}

fixture::Env boosted_env(const fixture::Env& env, std::uint64_t seed) {
    Rng rng(seed);
    TraceBundle bundle;
    for (std::size_t p = 0; p < env.scenario.num_domains(); ++p) {
        auto s = env.traces.energy_actual_trace(p);
        for (double& v : s.samples()) v += std::round(uniform(rng, 0, 4) * 2) / 2;
        bundle.energy.push_back(s);
    }
    for (std::size_t c = 0; c < env.scenario.num_clients(); ++c) {
        std::vector<double> load;
        const auto cap = static_cast<double>(env.scenario.clients()[c].max_capacity);
        for (Timestep t = 0; t < 6; ++t) {
            load.push_back(1.0 - static_cast<double>(env.traces.actual_spare_capacity(c, t)) / cap);
        }
        bundle.utilization.emplace_back(TraceSeries(0, load));
    }
    return {env.scenario, ResourceTraces(env.scenario, std::move(bundle))};
}

} // namespace

TEST(RunRound, PerfectForecastPlansAreRealizedWithoutSharing) {
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 1500; ++seed) {
        const auto rr = random_round(seed + 777, false);
        const auto& sc = rr.env.scenario;
        const std::vector<double> sigma(sc.num_clients(), 1.0);
        const std::size_t n = std::min<std::size_t>(2, sc.num_clients());
        const auto input = make_selection_input(sc, rr.env.traces, sigma, 0, n, 6);
        const auto plan = select_round(input);
        if (!plan || !one_participant_per_domain(sc, plan->selected)) continue;
        ++checked;
        RoundConfig cfg;
        cfg.d_max = 6;
        const auto r = run_round(sc, rr.env.traces, *plan, 0, cfg);
        EXPECT_EQ(r.realized_duration, plan->duration) << "seed " << seed;
        EXPECT_EQ(r.num_accepted(), plan->selected.size()) << "seed " << seed;
    }
    EXPECT_GT(checked, 200U);
}

TEST(RunRound, ProportionalSharingCanMissAFeasiblePlan) {
    // The plan serves client 0 first because it has one batch of capacity per
    // step; the proportional split at t0 cannot see that and favors client 1.
    const auto env = fixture::make_env({{0, 1, 2.0, 4, 5}, {0, 5, 1.0, 6, 7}}, {{2.5, 9.5, 1.5, 0.5, 7, 9}});
    const std::vector<double> sigma{1.0, 1.0};
    const auto input = make_selection_input(env.scenario, env.traces, sigma, 0, 2, 6);
    const auto plan = select_round(input);
    ASSERT_TRUE(plan);
    EXPECT_EQ(plan->duration, 6);
    RoundConfig cfg;
    cfg.d_max = 6;
    const auto r = run_round(env.scenario, env.traces, *plan, 0, cfg);
    EXPECT_EQ(r.num_accepted(), 1U);
    EXPECT_EQ(r.discarded, (std::vector<std::size_t>{0}));
}

TEST(RunRound, MoreEnergyNeverDelaysALoneParticipant) {
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 1500; ++seed) {
        const auto rr = random_round(seed + 4242, true);
        if (!one_participant_per_domain(rr.env.scenario, rr.participants)) continue;
        ++checked;
        const auto more = boosted_env(rr.env, seed);
        for (std::size_t c : rr.participants) {
            RoundConfig cfg;
            cfg.d_max = 6;
            const std::vector<std::size_t> who{c};
            const auto base = run_round(rr.env.scenario, rr.env.traces, who, 0, cfg);
            const auto boosted = run_round(more.scenario, more.traces, who, 0, cfg);
            EXPECT_LE(boosted.realized_duration, base.realized_duration) << "seed " << seed;
            if (base.accepted[0]) {
                EXPECT_TRUE(boosted.accepted[0]) << "seed " << seed;
            } else {
                EXPECT_GE(boosted.batches[0], base.batches[0]) << "seed " << seed;
            }
        }
    }
    EXPECT_GT(checked, 300U);
}

TEST(RunRound, MoreEnergyCanEndARoundWithFewerBatches) {
    // Base: nothing at t0, 10 batches at t1. Boosted: m_min reached at t0, round ends.
    const std::vector<ClientDef> defs{{0, 10, 1.0, 5, 10}};
    const auto base = fixture::make_env(defs, {{0.0, 10.0, 10.0}});
    const auto more = fixture::make_env(defs, {{5.0, 10.0, 10.0}});
    RoundConfig cfg;
    cfg.d_max = 3;
    const std::vector<std::size_t> who{0};
    const auto a = run_round(base.scenario, base.traces, who, 0, cfg);
    const auto b = run_round(more.scenario, more.traces, who, 0, cfg);
    EXPECT_EQ(a.batches[0], 10);
    EXPECT_EQ(b.batches[0], 5);
    EXPECT_LT(b.realized_duration, a.realized_duration);
}
