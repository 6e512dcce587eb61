#pragma once

/// @file client_presets.hpp
/// @brief Small/mid/large client classes and their conversion to (m_c, δ_c).

#include <fedzero/core/types.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fedzero {

enum class ClientClass { small, mid, large };
enum class Workload { densenet121, efficientnet_b1, lstm, kwt1 };

struct ClientClassProfile {
    ClientClass cls;
    double max_power_watts;
    /// Samples per minute for DenseNet-121, EfficientNet-B1, LSTM, KWT-1.
    std::array<double, 4> samples_per_minute;
};

// Roughly T4 / V100 / A100 power envelopes with downscaled throughput.
inline constexpr std::array<ClientClassProfile, 3> kClientClasses{{
    {ClientClass::small, 70.0, {110.0, 118.0, 276.0, 87.0}},
    {ClientClass::mid, 300.0, {384.0, 411.0, 956.0, 303.0}},
    {ClientClass::large, 700.0, {742.0, 795.0, 1856.0, 586.0}},
}};

inline std::string_view to_string(ClientClass c) {
    switch (c) {
    case ClientClass::small: return "small";
    case ClientClass::mid: return "mid";
    case ClientClass::large: return "large";
    }
    return "small";
}

inline Workload workload_from_string(std::string_view s) {
    if (s == "densenet121") return Workload::densenet121;
    if (s == "efficientnet_b1") return Workload::efficientnet_b1;
    if (s == "lstm") return Workload::lstm;
    if (s == "kwt1") return Workload::kwt1;
    throw std::invalid_argument("unknown workload: " + std::string(s));
}

struct ClientCapability {
    Batches max_capacity;    ///< batches per timestep
    Energy energy_per_batch; ///< watt-minutes per batch
};

/// Converts a class preset into per-timestep capacity and per-batch energy.
inline ClientCapability capability_of(ClientClass cls, Workload workload, int batch_size, int timestep_minutes) {
    const auto& profile = kClientClasses[static_cast<std::size_t>(cls)];
    const double samples = profile.samples_per_minute[static_cast<std::size_t>(workload)];
    const auto capacity = static_cast<Batches>(std::floor(samples * timestep_minutes / batch_size));
    if (capacity < 1) {
        throw std::invalid_argument("batch size exceeds per-timestep throughput");
    }
    return {capacity, profile.max_power_watts * batch_size / samples};
}

/// m_min / m_max for whole local epochs.
inline Batches batches_for_epochs(std::int64_t num_samples, int batch_size, int epochs) {
    return ((num_samples + batch_size - 1) / batch_size) * epochs;
}

} // namespace fedzero
