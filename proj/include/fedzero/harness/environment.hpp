#pragma once

/// @file environment.hpp
/// @brief Scenario plus traces, synthetic populations and the imbalanced variant.

#include <fedzero/core/client_presets.hpp>
#include <fedzero/core/random.hpp>
#include <fedzero/core/scenario.hpp>
#include <fedzero/io/scenario_json.hpp>
#include <fedzero/traces/generators.hpp>
#include <fedzero/traces/resources.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fedzero {

struct Environment {
    Scenario scenario;
    ResourceTraces traces;
};

inline Environment make_environment(const io::ScenarioDocument& doc, const std::filesystem::path& base_dir = ".") {
    return {doc.scenario, ResourceTraces(doc.scenario, io::load_traces(doc, base_dir))};
}

inline Environment load_environment(const std::filesystem::path& scenario_file) {
    const auto doc = io::load_scenario(scenario_file);
    return make_environment(doc, scenario_file.parent_path());
}

/// Knobs for a generated population and its traces.
struct SyntheticOptions {
    std::size_t num_clients = 100;
    std::size_t num_domains = 10;
    /// Simulated days the traces must cover; one extra day is generated for lookahead.
    int days = 7;
    SolarLayout layout = SolarLayout::global;
    double peak_watts = 800.0;
    double cloudiness = 0.5;
    Workload workload = Workload::densenet121;
    /// Total samples split across clients by Dirichlet(sample_skew); a skew
    /// of 0 splits them evenly.
    std::int64_t total_samples = 50000;
    double sample_skew = 0.5;
    /// Every client gets this class instead of a random one.
    std::optional<ClientClass> client_class;
    int min_epochs = 1;
    int max_epochs = 5;
    bool client_load = true;
    /// σ of multiplicative forecast noise for energy and load (0 = perfect).
    double forecast_noise = 0.1;
    /// Correlation length of the forecast error in timesteps.
    Timestep forecast_correlation = 60;
    SimulationParams params;
    std::uint64_t seed = 0;
};

inline std::string padded_id(const char* prefix, std::size_t i, std::size_t width) {
    std::string s = std::to_string(i);
    if (s.size() < width) s.insert(0, width - s.size(), '0');
    return prefix + s;
}

/// Clients get a random class, a Dirichlet share of the samples and a domain
/// (round-robin); traces are described by synthetic settings.
inline io::ScenarioDocument synthetic_document(const SyntheticOptions& opt) {
    if (opt.num_clients == 0 || opt.num_domains == 0) throw std::invalid_argument("need clients and domains");
    Rng rng(mix_seed(opt.seed, 0xc11e47ULL));
    const auto share = opt.sample_skew > 0.0
        ? dirichlet(rng, opt.num_clients, opt.sample_skew)
        : std::vector<double>(opt.num_clients, 1.0 / static_cast<double>(opt.num_clients));
    const std::size_t cw = std::to_string(opt.num_clients - 1).size();
    const std::size_t dw = std::to_string(opt.num_domains - 1).size();
    std::vector<PowerDomain> domains(opt.num_domains);
    for (std::size_t p = 0; p < opt.num_domains; ++p) domains[p].id = padded_id("domain_", p, dw);
    std::vector<ClientSpec> clients;
    clients.reserve(opt.num_clients);
    const int bs = opt.params.batch_size;
    for (std::size_t c = 0; c < opt.num_clients; ++c) {
        const auto drawn = static_cast<ClientClass>(uniform_index(rng, 3));
        const auto cls = opt.client_class.value_or(drawn);
        const auto cap = capability_of(cls, opt.workload, bs, opt.params.timestep_minutes);
        ClientSpec spec;
        spec.id = padded_id("client_", c, cw);
        spec.domain_id = domains[c % opt.num_domains].id;
        spec.max_capacity = cap.max_capacity;
        spec.energy_per_batch = cap.energy_per_batch;
        spec.num_samples = std::max<std::int64_t>(
            bs, std::llround(share[c] * static_cast<double>(opt.total_samples)));
        spec.min_batches = batches_for_epochs(spec.num_samples, bs, opt.min_epochs);
        spec.max_batches = batches_for_epochs(spec.num_samples, bs, opt.max_epochs);
        domains[c % opt.num_domains].client_ids.push_back(spec.id);
        clients.push_back(std::move(spec));
    }
    ForecastConfig forecast;
    if (opt.forecast_noise > 0.0) {
        forecast.energy = {ForecastKind::multiplicative_noise, opt.forecast_noise, 0.0, mix_seed(opt.seed, 0xe1ULL),
                           opt.forecast_correlation};
        forecast.capacity = {ForecastKind::multiplicative_noise, opt.forecast_noise, 0.0,
                             mix_seed(opt.seed, 0xca9ULL), opt.forecast_correlation};
    }
    io::ScenarioDocument doc{validate_scenario(std::move(clients), std::move(domains), opt.params, forecast), {}};
    SolarOptions solar;
    solar.layout = opt.layout;
    solar.days = opt.days + 1;
    solar.peak_watts = opt.peak_watts;
    solar.cloudiness = opt.cloudiness;
    solar.seed = mix_seed(opt.seed, 0x5014ULL);
    doc.synthetic.solar = solar;
    if (opt.client_load) {
        LoadOptions load;
        load.days = opt.days + 1;
        load.seed = mix_seed(opt.seed, 0x10adULL);
        doc.synthetic.load = load;
    }
    return doc;
}

inline Environment synthetic_environment(const SyntheticOptions& opt) { return make_environment(synthetic_document(opt)); }

/// Gives one domain unlimited excess energy and makes its clients fully idle.
inline Environment imbalanced_scenario(const Environment& base, std::size_t privileged_domain) {
    Environment env = base;
    env.traces.make_unlimited(privileged_domain, env.scenario.members(privileged_domain));
    return env;
}

} // namespace fedzero
