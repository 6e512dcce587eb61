#pragma once

/// @file types.hpp
/// @brief Scalar aliases and the static description of clients, power domains
/// and simulation parameters.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fedzero {

/// Simulation time in timesteps of `SimulationParams::timestep_minutes`.
using Timestep = std::int64_t;
/// Number of mini-batches (atomic units of training work).
using Batches = std::int64_t;
/// Energy in watt-minutes.
using Energy = double;

inline constexpr Energy kUnlimitedEnergy = std::numeric_limits<double>::infinity();

/// Static capabilities of one federated learning client.
struct ClientSpec {
    std::string id;
    std::string domain_id;
    /// m_c: batches the client can compute per timestep when fully idle.
    Batches max_capacity = 0;
    /// δ_c: watt-minutes per batch.
    Energy energy_per_batch = 0.0;
    /// m_c^min: batches required for the round contribution to count.
    Batches min_batches = 0;
    /// m_c^max: cap on batches per round.
    Batches max_batches = 0;
    /// |B_c|: local training samples.
    std::int64_t num_samples = 0;
    /// Utilization trace (CSV, fraction in [0,1]); empty means always idle.
    std::string load_trace;
    /// Utilization forecast (CSV); only read by the `trace_pair` forecast kind.
    std::string load_forecast;

    friend bool operator==(const ClientSpec&, const ClientSpec&) = default;
};

/// Disjoint group of clients sharing one excess-energy budget.
struct PowerDomain {
    std::string id;
    std::vector<std::string> client_ids;
    /// Actual excess power trace (CSV, watts).
    std::string energy_trace;
    /// Forecast trace (CSV, watts); only read by the `trace_pair` forecast kind.
    std::string energy_forecast;
    /// Domain never runs out of energy; trace paths are ignored.
    bool unlimited_energy = false;

    friend bool operator==(const PowerDomain&, const PowerDomain&) = default;
};

struct SimulationParams {
    int timestep_minutes = 1;
    /// n: clients selected per round.
    std::size_t clients_per_round = 10;
    /// d^max in timesteps.
    Timestep max_round_duration = 60;
    int batch_size = 10;
    /// α: blocklist release exponent.
    double alpha = 1.0;
    bool blocklist = true;
    std::uint64_t seed = 0;
    /// 1.0 for FedZero; the 1.3n baselines override it.
    double over_selection_factor = 1.0;
    /// Relative optimality gap accepted by the selection MIP (0 = exact).
    double mip_relative_gap = 0.01;
    double mip_time_limit_seconds = 30.0;
    /// Branch-and-bound nodes per domain solve; the best incumbent is used past it.
    std::int64_t mip_node_limit = 2000;

    friend bool operator==(const SimulationParams&, const SimulationParams&) = default;
};

/// Mutable per-client history, owned by the experiment control loop.
struct ClientState {
    /// p(c): accepted round contributions so far.
    std::int64_t rounds_participated = 0;
    bool blocklisted = false;
    /// Mean of squared per-batch losses from the last accepted round.
    double last_mean_squared_loss = 0.0;
    Batches cumulative_batches = 0;
    Energy cumulative_energy = 0.0;

    friend bool operator==(const ClientState&, const ClientState&) = default;
};

} // namespace fedzero
