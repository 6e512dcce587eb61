#pragma once

/// @file generators.hpp
/// @brief Synthetic solar excess-energy and client-load traces.

#include <fedzero/core/random.hpp>
#include <fedzero/traces/trace_series.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fedzero {

enum class SolarLayout {
    /// Domains spread over time zones; diurnal peaks staggered evenly over the day.
    global,
    /// Domains in one region; peaks aligned, weather differs per domain.
    co_located,
};

inline std::string_view to_string(SolarLayout l) {
    return l == SolarLayout::global ? "global" : "co_located";
}

inline SolarLayout solar_layout_from_string(std::string_view s) {
    if (s == "global") return SolarLayout::global;
    if (s == "co_located") return SolarLayout::co_located;
    throw std::invalid_argument("unknown solar layout: " + std::string(s));
}

struct SolarOptions {
    SolarLayout layout = SolarLayout::global;
    std::size_t num_domains = 10;
    int days = 7;
    double peak_watts = 800.0;
    std::uint64_t seed = 0;
    int timestep_minutes = 1;
    /// Source data resolution; values are held constant within a sample.
    int sample_minutes = 5;
    /// 0 = clear sky; 1 = heavily overcast days possible.
    double cloudiness = 0.5;
    double daylight_hours = 15.0;
};

struct SolarScenario {
    /// Excess energy per domain in watt-minutes per timestep.
    std::vector<TraceSeries> traces;
    /// Shift of each domain's local solar noon relative to domain 0, in timesteps.
    std::vector<Timestep> phase_offsets;
};

/// Diurnal solar production per domain, scaled so each domain peaks at
/// exactly `peak_watts`.
inline SolarScenario generate_solar_scenario(const SolarOptions& opt) {
    if (opt.num_domains == 0 || opt.days < 0 || opt.timestep_minutes < 1 || opt.sample_minutes < 1) {
        throw std::invalid_argument("invalid solar generator options");
    }
    if (opt.daylight_hours <= 0.0 || opt.daylight_hours > 24.0) {
        throw std::invalid_argument("daylight_hours must be in (0, 24]");
    }
    const Timestep resolution = std::max(1, opt.sample_minutes / opt.timestep_minutes);
    const double sample_len_min = static_cast<double>(resolution * opt.timestep_minutes);
    const auto total_minutes = static_cast<double>(opt.days) * 1440.0;
    const auto num_samples = static_cast<std::size_t>(std::ceil(total_minutes / sample_len_min));
    const double sunrise = 12.0 - opt.daylight_hours / 2.0;
    const double cloudiness = std::clamp(opt.cloudiness, 0.0, 0.8);

    SolarScenario out;
    for (std::size_t p = 0; p < opt.num_domains; ++p) {
        const double offset_min = opt.layout == SolarLayout::global
            ? 1440.0 * static_cast<double>(p) / static_cast<double>(opt.num_domains)
            : 0.0;
        out.phase_offsets.push_back(static_cast<Timestep>(std::llround(offset_min / opt.timestep_minutes)));

        Rng rng(mix_seed(opt.seed, 0x501a7ULL, p));
        std::vector<double> values(num_samples, 0.0);
        // Hour-scale cloud process; rho chosen for roughly one-hour memory.
        const double rho = std::exp(-sample_len_min / 60.0);
        double z = standard_normal(rng);
        int current_day = -1;
        double day_factor = 1.0;
        for (std::size_t i = 0; i < num_samples; ++i) {
            const double minute = static_cast<double>(i) * sample_len_min;
            const int day = static_cast<int>(minute / 1440.0);
            if (day != current_day) {
                current_day = day;
                day_factor = 1.0 - cloudiness * uniform01(rng);
            }
            z = rho * z + std::sqrt(1.0 - rho * rho) * standard_normal(rng);
            // Local clock shifted so domain p reaches noon `offset_min` later.
            double local = std::fmod(minute - offset_min, 1440.0);
            if (local < 0.0) local += 1440.0;
            const double hour = local / 60.0;
            const double phase = (hour - sunrise) / opt.daylight_hours;
            if (phase <= 0.0 || phase >= 1.0) {
                continue;
            }
            const double clear = std::pow(std::sin(std::numbers::pi * phase), 1.3);
            const double passing = 1.0 - 0.6 * cloudiness / (1.0 + std::exp(-1.5 * z));
            values[i] = clear * day_factor * passing;
        }
        const double max_v = *std::max_element(values.begin(), values.end());
        const double scale = max_v > 0.0 ? opt.peak_watts * opt.timestep_minutes / max_v : 0.0;
        for (double& v : values) {
            v *= scale;
        }
        out.traces.emplace_back(0, std::move(values), resolution);
    }
    return out;
}

struct LoadOptions {
    std::size_t num_clients = 100;
    int days = 7;
    std::uint64_t seed = 0;
    int timestep_minutes = 1;
    double mean_busy_minutes = 90.0;
    double mean_idle_minutes = 150.0;
};

/// Utilization in [0,1] per client: alternating idle and busy episodes with
/// exponentially distributed lengths, busy levels drawn per episode.
inline std::vector<TraceSeries> generate_load_traces(const LoadOptions& opt) {
    if (opt.days < 0 || opt.timestep_minutes < 1) {
        throw std::invalid_argument("invalid load generator options");
    }
    const auto steps = static_cast<std::size_t>(opt.days) * 1440 / static_cast<std::size_t>(opt.timestep_minutes);
    std::vector<TraceSeries> out;
    out.reserve(opt.num_clients);
    for (std::size_t c = 0; c < opt.num_clients; ++c) {
        Rng rng(mix_seed(opt.seed, 0x10adULL, c));
        // Some machines are busier than others.
        const double busyness = uniform(rng, 0.3, 1.7);
        const double busy_mean = opt.mean_busy_minutes * busyness / opt.timestep_minutes;
        const double idle_mean = opt.mean_idle_minutes / busyness / opt.timestep_minutes;
        std::vector<double> values(steps, 0.0);
        bool busy = uniform01(rng) < busy_mean / (busy_mean + idle_mean);
        std::size_t t = 0;
        while (t < steps) {
            const double mean = busy ? busy_mean : idle_mean;
            const auto len = static_cast<std::size_t>(1.0 + -std::log(1.0 - uniform01(rng)) * mean);
            const double level = busy ? uniform(rng, 0.4, 1.0) : uniform(rng, 0.0, 0.15);
            for (std::size_t k = 0; k < len && t < steps; ++k, ++t) {
                values[t] = std::clamp(level + 0.05 * standard_normal(rng), 0.0, 1.0);
            }
            busy = !busy;
        }
        out.emplace_back(0, std::move(values), 1);
    }
    return out;
}

} // namespace fedzero
