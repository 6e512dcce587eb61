#pragma once

/// @file utility.hpp
/// @brief Statistical client utility and blocklist release probability.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace fedzero {

/// σ_c = |B_c| · sqrt(mean of squared losses) once the client has
/// participated; 1 before that.
inline double statistical_utility(std::int64_t num_samples, double mean_squared_loss, std::int64_t participations) {
    if (participations < 1) return 1.0;
    if (num_samples <= 0 || !(mean_squared_loss >= 0.0)) {
        throw std::invalid_argument("statistical utility needs positive samples and a loss history");
    }
    return static_cast<double>(num_samples) * std::sqrt(mean_squared_loss);
}

/// Overload taking the raw per-batch losses.
inline double statistical_utility(std::int64_t num_samples, std::span<const double> losses,
                                  std::int64_t participations) {
    if (participations < 1) return 1.0;
    if (losses.empty()) throw std::invalid_argument("participated client without loss history");
    double sq = 0.0;
    for (double l : losses) sq += l * l;
    return statistical_utility(num_samples, sq / static_cast<double>(losses.size()), participations);
}

/// P(c) = (p(c) − ω)^(−α) if p(c) > ω, else 1; clamped to [0, 1].
inline double release_probability(double participations, double omega, double alpha) {
    const double excess = participations - omega;
    if (!(excess > 0.0)) return 1.0;
    return std::clamp(std::pow(excess, -alpha), 0.0, 1.0);
}

} // namespace fedzero
