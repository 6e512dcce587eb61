#pragma once

#include <fedzero/core/scenario.hpp>
#include <fedzero/traces/resources.hpp>

#include <optional>
#include <string>
#include <vector>

namespace fixture {

using namespace fedzero;

struct ClientDef {
    std::size_t domain = 0;
    Batches capacity = 10;
    Energy delta = 1.0;
    Batches m_min = 1;
    Batches m_max = 10;
    std::int64_t samples = 100;
    /// Utilization per timestep; empty means always idle.
    std::vector<double> load = {};
};

struct Env {
    Scenario scenario;
    ResourceTraces traces;
};

inline std::string client_id(std::size_t i) {
    std::string s = std::to_string(i);
    return "c" + std::string(4 - std::min<std::size_t>(4, s.size()), '0') + s;
}

/// Scenario with one energy series (W·min per timestep) per domain.
inline Env make_env(const std::vector<ClientDef>& defs, const std::vector<std::vector<double>>& energy,
                    SimulationParams params = {}, ForecastConfig forecast = {}) {
    std::vector<PowerDomain> domains(energy.size());
    for (std::size_t p = 0; p < energy.size(); ++p) domains[p].id = "d" + std::to_string(p);
    std::vector<ClientSpec> clients;
    for (std::size_t i = 0; i < defs.size(); ++i) {
        ClientSpec c;
        c.id = client_id(i);
        c.domain_id = domains[defs[i].domain].id;
        c.max_capacity = defs[i].capacity;
        c.energy_per_batch = defs[i].delta;
        c.min_batches = defs[i].m_min;
        c.max_batches = defs[i].m_max;
        c.num_samples = defs[i].samples;
        domains[defs[i].domain].client_ids.push_back(c.id);
        clients.push_back(c);
    }
    Env env;
    env.scenario = validate_scenario(clients, domains, params, forecast);
    TraceBundle bundle;
    for (const auto& e : energy) bundle.energy.emplace_back(0, e);
    for (const auto& d : defs) {
        if (d.load.empty()) {
            bundle.utilization.emplace_back(std::nullopt);
        } else {
            bundle.utilization.emplace_back(TraceSeries(0, d.load));
        }
    }
    env.traces = ResourceTraces(env.scenario, std::move(bundle));
    return env;
}

} // namespace fixture
