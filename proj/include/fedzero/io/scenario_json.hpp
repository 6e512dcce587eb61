#pragma once

/// @file scenario_json.hpp
/// @brief Scenario documents: params, forecast settings, clients, domains and
/// trace sources, stored as JSON. Trace paths are relative to the document.

#include <fedzero/core/scenario.hpp>
#include <fedzero/io/csv.hpp>
#include <fedzero/traces/generators.hpp>
#include <fedzero/traces/resources.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedzero::io {

using Json = nlohmann::ordered_json;

/// Generator settings for domains or clients that name no trace file.
struct SyntheticTraces {
    std::optional<SolarOptions> solar;
    std::optional<LoadOptions> load;

    friend bool operator==(const SyntheticTraces& a, const SyntheticTraces& b) {
        auto same_solar = [](const SolarOptions& x, const SolarOptions& y) {
            return x.layout == y.layout && x.days == y.days && x.peak_watts == y.peak_watts && x.seed == y.seed &&
                   x.sample_minutes == y.sample_minutes && x.cloudiness == y.cloudiness &&
                   x.daylight_hours == y.daylight_hours;
        };
        auto same_load = [](const LoadOptions& x, const LoadOptions& y) {
            return x.days == y.days && x.seed == y.seed && x.mean_busy_minutes == y.mean_busy_minutes &&
                   x.mean_idle_minutes == y.mean_idle_minutes;
        };
        if (a.solar.has_value() != b.solar.has_value() || a.load.has_value() != b.load.has_value()) return false;
        return (!a.solar || same_solar(*a.solar, *b.solar)) && (!a.load || same_load(*a.load, *b.load));
    }
};

struct ScenarioDocument {
    Scenario scenario;
    SyntheticTraces synthetic;
};

namespace detail {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

inline Json to_json(const ForecastModel& m) {
    return Json{{"kind", std::string(to_string(m.kind))},
                {"noise_sigma", m.noise_sigma},
                {"bias", m.bias},
                {"seed", m.seed},
                {"correlation_steps", m.correlation_steps}};
}

inline ForecastModel forecast_model_from_json(const Json& j) {
    ForecastModel m;
    m.kind = forecast_kind_from_string(get_or<std::string>(j, "kind", "perfect"));
    m.noise_sigma = get_or(j, "noise_sigma", 0.0);
    m.bias = get_or(j, "bias", 0.0);
    m.seed = get_or<std::uint64_t>(j, "seed", 0);
    m.correlation_steps = get_or<Timestep>(j, "correlation_steps", 1);
    return m;
}

} // namespace detail

inline Json to_json(const SimulationParams& p) {
    return Json{{"timestep_minutes", p.timestep_minutes},
                {"clients_per_round", p.clients_per_round},
                {"max_round_duration", p.max_round_duration},
                {"batch_size", p.batch_size},
                {"alpha", p.alpha},
                {"blocklist", p.blocklist},
                {"seed", p.seed},
                {"over_selection_factor", p.over_selection_factor},
                {"mip_relative_gap", p.mip_relative_gap},
                {"mip_time_limit_seconds", p.mip_time_limit_seconds},
                {"mip_node_limit", p.mip_node_limit}};
}

inline SimulationParams params_from_json(const Json& j) {
    SimulationParams p;
    p.timestep_minutes = detail::get_or(j, "timestep_minutes", p.timestep_minutes);
    p.clients_per_round = detail::get_or(j, "clients_per_round", p.clients_per_round);
    p.max_round_duration = detail::get_or(j, "max_round_duration", p.max_round_duration);
    p.batch_size = detail::get_or(j, "batch_size", p.batch_size);
    p.alpha = detail::get_or(j, "alpha", p.alpha);
    p.blocklist = detail::get_or(j, "blocklist", p.blocklist);
    p.seed = detail::get_or(j, "seed", p.seed);
    p.over_selection_factor = detail::get_or(j, "over_selection_factor", p.over_selection_factor);
    p.mip_relative_gap = detail::get_or(j, "mip_relative_gap", p.mip_relative_gap);
    p.mip_time_limit_seconds = detail::get_or(j, "mip_time_limit_seconds", p.mip_time_limit_seconds);
    p.mip_node_limit = detail::get_or(j, "mip_node_limit", p.mip_node_limit);
    return p;
}

inline Json to_json(const ForecastConfig& f) {
    return Json{{"energy", detail::to_json(f.energy)},
                {"capacity", detail::to_json(f.capacity)},
                {"capacity_forecasts", f.capacity_forecasts}};
}

inline ForecastConfig forecast_from_json(const Json& j) {
    ForecastConfig f;
    if (j.contains("energy")) f.energy = detail::forecast_model_from_json(j.at("energy"));
    if (j.contains("capacity")) f.capacity = detail::forecast_model_from_json(j.at("capacity"));
    f.capacity_forecasts = detail::get_or(j, "capacity_forecasts", true);
    return f;
}

inline Json to_json(const SyntheticTraces& s) {
    Json j = Json::object();
    if (s.solar) {
        j["solar"] = Json{{"layout", std::string(to_string(s.solar->layout))},
                          {"days", s.solar->days},
                          {"peak_watts", s.solar->peak_watts},
                          {"seed", s.solar->seed},
                          {"sample_minutes", s.solar->sample_minutes},
                          {"cloudiness", s.solar->cloudiness},
                          {"daylight_hours", s.solar->daylight_hours}};
    }
    if (s.load) {
        j["load"] = Json{{"days", s.load->days},
                         {"seed", s.load->seed},
                         {"mean_busy_minutes", s.load->mean_busy_minutes},
                         {"mean_idle_minutes", s.load->mean_idle_minutes}};
    }
    return j;
}

inline SyntheticTraces synthetic_from_json(const Json& j) {
    SyntheticTraces s;
    if (j.contains("solar")) {
        const auto& o = j.at("solar");
        SolarOptions opt;
        opt.layout = solar_layout_from_string(detail::get_or<std::string>(o, "layout", "global"));
        opt.days = detail::get_or(o, "days", opt.days);
        opt.peak_watts = detail::get_or(o, "peak_watts", opt.peak_watts);
        opt.seed = detail::get_or(o, "seed", opt.seed);
        opt.sample_minutes = detail::get_or(o, "sample_minutes", opt.sample_minutes);
        opt.cloudiness = detail::get_or(o, "cloudiness", opt.cloudiness);
        opt.daylight_hours = detail::get_or(o, "daylight_hours", opt.daylight_hours);
        s.solar = opt;
    }
    if (j.contains("load")) {
        const auto& o = j.at("load");
        LoadOptions opt;
        opt.days = detail::get_or(o, "days", opt.days);
        opt.seed = detail::get_or(o, "seed", opt.seed);
        opt.mean_busy_minutes = detail::get_or(o, "mean_busy_minutes", opt.mean_busy_minutes);
        opt.mean_idle_minutes = detail::get_or(o, "mean_idle_minutes", opt.mean_idle_minutes);
        s.load = opt;
    }
    return s;
}

inline Json to_json(const ScenarioDocument& doc) {
    const auto& s = doc.scenario;
    Json clients = Json::array();
    for (const auto& c : s.clients()) {
        clients.push_back(Json{{"id", c.id},
                               {"domain_id", c.domain_id},
                               {"max_capacity", c.max_capacity},
                               {"energy_per_batch", c.energy_per_batch},
                               {"min_batches", c.min_batches},
                               {"max_batches", c.max_batches},
                               {"num_samples", c.num_samples},
                               {"load_trace", c.load_trace},
                               {"load_forecast", c.load_forecast}});
    }
    Json domains = Json::array();
    for (const auto& d : s.domains()) {
        domains.push_back(Json{{"id", d.id},
                               {"client_ids", d.client_ids},
                               {"energy_trace", d.energy_trace},
                               {"energy_forecast", d.energy_forecast},
                               {"unlimited_energy", d.unlimited_energy}});
    }
    Json j{{"params", to_json(s.params())}, {"forecast", to_json(s.forecast())}};
    if (doc.synthetic.solar || doc.synthetic.load) j["synthetic"] = to_json(doc.synthetic);
    j["domains"] = std::move(domains);
    j["clients"] = std::move(clients);
    return j;
}

/// Parses and validates a document. JSON type errors are reported as
/// invariant violations naming the offending section.
inline ScenarioDocument document_from_json(const Json& j) {
    std::string section = "document";
    try {
        section = "params";
        const auto params = params_from_json(j.value("params", Json::object()));
        section = "forecast";
        const auto forecast = forecast_from_json(j.value("forecast", Json::object()));
        section = "synthetic";
        const auto synthetic = synthetic_from_json(j.value("synthetic", Json::object()));
        section = "clients";
        std::vector<ClientSpec> clients;
        for (const auto& c : j.at("clients")) {
            ClientSpec spec;
            spec.id = c.at("id").get<std::string>();
            spec.domain_id = c.at("domain_id").get<std::string>();
            spec.max_capacity = c.at("max_capacity").get<Batches>();
            spec.energy_per_batch = c.at("energy_per_batch").get<double>();
            spec.min_batches = c.at("min_batches").get<Batches>();
            spec.max_batches = c.at("max_batches").get<Batches>();
            spec.num_samples = c.at("num_samples").get<std::int64_t>();
            spec.load_trace = detail::get_or<std::string>(c, "load_trace", "");
            spec.load_forecast = detail::get_or<std::string>(c, "load_forecast", "");
            clients.push_back(std::move(spec));
        }
        section = "domains";
        std::vector<PowerDomain> domains;
        for (const auto& d : j.at("domains")) {
            PowerDomain dom;
            dom.id = d.at("id").get<std::string>();
            dom.client_ids = d.at("client_ids").get<std::vector<std::string>>();
            dom.energy_trace = detail::get_or<std::string>(d, "energy_trace", "");
            dom.energy_forecast = detail::get_or<std::string>(d, "energy_forecast", "");
            dom.unlimited_energy = detail::get_or(d, "unlimited_energy", false);
            domains.push_back(std::move(dom));
        }
        return {validate_scenario(std::move(clients), std::move(domains), params, forecast), synthetic};
    } catch (const Json::exception& e) {
        throw ScenarioError(ScenarioErrorKind::invariant_violation, section, section + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(ScenarioErrorKind::invariant_violation, section, section + ": " + e.what());
    }
}

inline ScenarioDocument load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ScenarioError(ScenarioErrorKind::invariant_violation, "document", path.string() + ": " + e.what());
    }
    return document_from_json(j);
}

inline void save_scenario(const std::filesystem::path& path, const ScenarioDocument& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario " + path.string());
    out << to_json(doc).dump(2) << '\n';
}

/// Reads trace files named by the scenario (relative to `base_dir`) and
/// generates the rest from the synthetic settings. Energy files hold watts
/// and are converted to watt-minutes per timestep.
inline TraceBundle load_traces(const ScenarioDocument& doc, const std::filesystem::path& base_dir) {
    const auto& s = doc.scenario;
    const double watts_to_energy = s.params().timestep_minutes;
    auto resolve = [&](const std::string& p) { return base_dir / p; };
    TraceBundle b;
    std::optional<SolarScenario> solar;
    if (doc.synthetic.solar) {
        auto opt = *doc.synthetic.solar;
        opt.num_domains = s.num_domains();
        opt.timestep_minutes = s.params().timestep_minutes;
        if (opt.num_domains > 0) solar = generate_solar_scenario(opt);
    }
    std::vector<TraceSeries> load;
    if (doc.synthetic.load) {
        auto opt = *doc.synthetic.load;
        opt.num_clients = s.num_clients();
        opt.timestep_minutes = s.params().timestep_minutes;
        load = generate_load_traces(opt);
    }
    for (std::size_t p = 0; p < s.num_domains(); ++p) {
        const auto& d = s.domains()[p];
        if (!d.energy_trace.empty()) {
            b.energy.push_back(read_trace_csv(resolve(d.energy_trace), watts_to_energy));
        } else if (d.unlimited_energy) {
            b.energy.emplace_back();
        } else if (solar) {
            b.energy.push_back(solar->traces[p]);
        } else {
            throw ScenarioError(ScenarioErrorKind::invariant_violation, "energy_trace",
                                "domain '" + d.id + "' has no energy trace and no synthetic solar settings");
        }
        b.energy_forecast.push_back(d.energy_forecast.empty()
                                        ? std::nullopt
                                        : std::optional(read_trace_csv(resolve(d.energy_forecast), watts_to_energy)));
    }
    for (std::size_t c = 0; c < s.num_clients(); ++c) {
        const auto& spec = s.clients()[c];
        if (!spec.load_trace.empty()) {
            b.utilization.emplace_back(read_trace_csv(resolve(spec.load_trace)));
        } else if (!load.empty()) {
            b.utilization.emplace_back(load[c]);
        } else {
            b.utilization.emplace_back(std::nullopt);
        }
        b.utilization_forecast.push_back(spec.load_forecast.empty()
                                             ? std::nullopt
                                             : std::optional(read_trace_csv(resolve(spec.load_forecast))));
    }
    return b;
}

} // namespace fedzero::io
