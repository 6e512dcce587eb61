#pragma once

/// @file forecast_model.hpp
/// @brief Error models that turn an actual trace into its forecast.

#include <fedzero/core/random.hpp>
#include <fedzero/traces/trace_series.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fedzero {

enum class ForecastKind { perfect, trace_pair, multiplicative_noise };

inline std::string_view to_string(ForecastKind kind) {
    switch (kind) {
    case ForecastKind::perfect: return "perfect";
    case ForecastKind::trace_pair: return "trace_pair";
    case ForecastKind::multiplicative_noise: return "multiplicative_noise";
    }
    return "perfect";
}

inline ForecastKind forecast_kind_from_string(std::string_view s) {
    if (s == "perfect") return ForecastKind::perfect;
    if (s == "trace_pair") return ForecastKind::trace_pair;
    if (s == "multiplicative_noise") return ForecastKind::multiplicative_noise;
    throw std::invalid_argument("unknown forecast kind: " + std::string(s));
}

/// Log-normal multiplicative error with unit mean, optional bias and AR(1)
/// correlation between consecutive samples.
///
/// Each sample is multiplied by exp(σ·z − σ²/2 + bias) where z is a stationary
/// standard-normal AR(1) process with correlation exp(−resolution / correlation_steps).
/// A correlation of one timestep or less yields independent errors.
struct ForecastModel {
    ForecastKind kind = ForecastKind::perfect;
    double noise_sigma = 0.0;
    double bias = 0.0;
    std::uint64_t seed = 0;
    Timestep correlation_steps = 1;

    friend bool operator==(const ForecastModel&, const ForecastModel&) = default;

    /// Forecast for `actual`; `stream` separates the noise of distinct series.
    [[nodiscard]] TraceSeries apply(const TraceSeries& actual, std::uint64_t stream) const {
        if (kind != ForecastKind::multiplicative_noise || (noise_sigma == 0.0 && bias == 0.0)) {
            return actual;
        }
        if (noise_sigma < 0.0) {
            throw std::invalid_argument("forecast noise_sigma must be >= 0");
        }
        Rng rng(mix_seed(seed, stream));
        const double rho = correlation_steps <= 1
            ? 0.0
            : std::exp(-static_cast<double>(actual.native_resolution()) /
                       static_cast<double>(correlation_steps));
        const double innovation = std::sqrt(1.0 - rho * rho);
        TraceSeries out = actual;
        double z = standard_normal(rng);
        bool first = true;
        for (double& v : out.samples()) {
            if (!first) {
                z = rho * z + innovation * standard_normal(rng);
            }
            first = false;
            if (std::isinf(v)) {
                continue;
            }
            v *= std::exp(noise_sigma * z - 0.5 * noise_sigma * noise_sigma + bias);
        }
        return out;
    }
};

/// Forecast settings for one scenario.
struct ForecastConfig {
    ForecastModel energy;
    ForecastModel capacity;
    /// When false, selection assumes every client is fully idle (spare = m_c).
    bool capacity_forecasts = true;

    friend bool operator==(const ForecastConfig&, const ForecastConfig&) = default;
};

} // namespace fedzero
