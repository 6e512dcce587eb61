#pragma once

/// @file trace_series.hpp
/// @brief Piecewise-constant time series sampled at a native resolution.

#include <fedzero/core/types.hpp>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fedzero {

/// Raised when a lookup falls outside the covered window of a trace.
class TraceExhausted : public std::out_of_range {
public:
    TraceExhausted(Timestep t, Timestep begin, Timestep end)
        : std::out_of_range("trace lookup at timestep " + std::to_string(t) + " outside [" +
                            std::to_string(begin) + ", " + std::to_string(end) + ")")
        , timestep_(t) {}

    [[nodiscard]] Timestep timestep() const noexcept { return timestep_; }

private:
    Timestep timestep_;
};

/// Non-negative series where each stored sample covers `native_resolution`
/// timesteps and is held constant within that period.
class TraceSeries {
public:
    TraceSeries() = default;

    TraceSeries(Timestep start, std::vector<double> values, Timestep native_resolution = 1)
        : start_(start)
        , resolution_(native_resolution)
        , values_(std::move(values)) {
        if (resolution_ < 1) {
            throw std::invalid_argument("trace native_resolution must be >= 1");
        }
        for (double v : values_) {
            if (!(v >= 0.0)) {
                throw std::invalid_argument("trace values must be non-negative");
            }
        }
    }

    /// Constant series covering [start, start + length).
    static TraceSeries constant(Timestep start, Timestep length, double value) {
        return TraceSeries(start, std::vector<double>(static_cast<std::size_t>(length), value), 1);
    }

    [[nodiscard]] Timestep start() const noexcept { return start_; }
    [[nodiscard]] Timestep end() const noexcept {
        return start_ + static_cast<Timestep>(values_.size()) * resolution_;
    }
    [[nodiscard]] Timestep native_resolution() const noexcept { return resolution_; }
    [[nodiscard]] const std::vector<double>& samples() const noexcept { return values_; }
    [[nodiscard]] std::vector<double>& samples() noexcept { return values_; }
    [[nodiscard]] bool covers(Timestep t) const noexcept { return t >= start_ && t < end(); }

    [[nodiscard]] double at(Timestep t) const {
        if (!covers(t)) {
            throw TraceExhausted(t, start_, end());
        }
        return values_[static_cast<std::size_t>((t - start_) / resolution_)];
    }

    /// Values for timesteps [t0, t0 + length).
    [[nodiscard]] std::vector<double> slice(Timestep t0, Timestep length) const {
        if (length > 0 && (!covers(t0) || !covers(t0 + length - 1))) {
            throw TraceExhausted(covers(t0) ? t0 + length - 1 : t0, start_, end());
        }
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(std::max<Timestep>(length, 0)));
        for (Timestep t = t0; t < t0 + length; ++t) {
            out.push_back(values_[static_cast<std::size_t>((t - start_) / resolution_)]);
        }
        return out;
    }

    /// Multiply every sample (used for unit conversions).
    [[nodiscard]] TraceSeries scaled(double factor) const {
        TraceSeries out = *this;
        for (double& v : out.values_) {
            v *= factor;
        }
        return out;
    }

    friend bool operator==(const TraceSeries&, const TraceSeries&) = default;

private:
    Timestep start_ = 0;
    Timestep resolution_ = 1;
    std::vector<double> values_;
};

} // namespace fedzero
