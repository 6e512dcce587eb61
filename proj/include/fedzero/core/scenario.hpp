#pragma once

/// @file scenario.hpp
/// @brief Validated bundle of clients, power domains and parameters.

#include <fedzero/core/types.hpp>
#include <fedzero/traces/forecast_model.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fedzero {

enum class ScenarioErrorKind {
    duplicate_client_in_multiple_domains,
    unknown_domain_reference,
    unknown_client_reference,
    invariant_violation,
};

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(ScenarioErrorKind kind, std::string field, const std::string& detail)
        : std::runtime_error(detail)
        , kind_(kind)
        , field_(std::move(field)) {}

    [[nodiscard]] ScenarioErrorKind kind() const noexcept { return kind_; }
    /// Offending field or identifier.
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    ScenarioErrorKind kind_;
    std::string field_;
};

/// Immutable, validated scenario. Clients are stored in ascending id order,
/// so a client's index doubles as its tie-break rank.
class Scenario {
public:
    Scenario() = default;

    [[nodiscard]] const SimulationParams& params() const noexcept { return params_; }
    [[nodiscard]] const ForecastConfig& forecast() const noexcept { return forecast_; }
    [[nodiscard]] const std::vector<ClientSpec>& clients() const noexcept { return clients_; }
    [[nodiscard]] const std::vector<PowerDomain>& domains() const noexcept { return domains_; }
    [[nodiscard]] std::size_t num_clients() const noexcept { return clients_.size(); }
    [[nodiscard]] std::size_t num_domains() const noexcept { return domains_.size(); }

    /// Index of the domain that owns client `c`.
    [[nodiscard]] std::size_t domain_of(std::size_t c) const { return domain_of_.at(c); }
    /// Client indices of domain `p`, ascending.
    [[nodiscard]] const std::vector<std::size_t>& members(std::size_t p) const { return members_.at(p); }

    [[nodiscard]] std::size_t client_index(std::string_view id) const {
        auto it = client_lookup_.find(std::string(id));
        if (it == client_lookup_.end()) {
            throw ScenarioError(ScenarioErrorKind::unknown_client_reference, std::string(id),
                                "unknown client '" + std::string(id) + "'");
        }
        return it->second;
    }

    [[nodiscard]] std::size_t domain_index(std::string_view id) const {
        auto it = domain_lookup_.find(std::string(id));
        if (it == domain_lookup_.end()) {
            throw ScenarioError(ScenarioErrorKind::unknown_domain_reference, std::string(id),
                                "unknown power domain '" + std::string(id) + "'");
        }
        return it->second;
    }

    /// Copy with different parameters (re-validated).
    [[nodiscard]] Scenario with_params(SimulationParams params) const;
    [[nodiscard]] Scenario with_forecast(ForecastConfig forecast) const;

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.params_ == b.params_ && a.forecast_ == b.forecast_ && a.clients_ == b.clients_ &&
               a.domains_ == b.domains_;
    }

    friend Scenario validate_scenario(std::vector<ClientSpec>, std::vector<PowerDomain>, SimulationParams,
                                      ForecastConfig);

private:
    SimulationParams params_;
    ForecastConfig forecast_;
    std::vector<ClientSpec> clients_;
    std::vector<PowerDomain> domains_;
    std::vector<std::size_t> domain_of_;
    std::vector<std::vector<std::size_t>> members_;
    std::unordered_map<std::string, std::size_t> client_lookup_;
    std::unordered_map<std::string, std::size_t> domain_lookup_;
};

namespace detail {

[[noreturn]] inline void invariant(const std::string& field, const std::string& what) {
    throw ScenarioError(ScenarioErrorKind::invariant_violation, field, "invariant violated: " + what);
}

inline void check_client(const ClientSpec& c) {
    const std::string who = "client '" + c.id + "': ";
    if (c.id.empty()) invariant("id", "client id must not be empty");
    if (c.max_capacity <= 0) invariant("max_capacity", who + "max_capacity must be positive");
    if (!(c.energy_per_batch > 0.0) || !std::isfinite(c.energy_per_batch)) {
        invariant("energy_per_batch", who + "energy_per_batch must be positive");
    }
    if (c.min_batches <= 0) invariant("min_batches", who + "min_batches must be positive");
    if (c.max_batches < c.min_batches) invariant("max_batches", who + "min_batches <= max_batches");
    if (c.num_samples <= 0) invariant("num_samples", who + "num_samples must be positive");
}

inline void check_params(const SimulationParams& p) {
    if (p.timestep_minutes < 1) invariant("timestep_minutes", "timestep_minutes must be >= 1");
    if (p.clients_per_round < 1) invariant("clients_per_round", "n must be >= 1");
    if (p.max_round_duration < 1) invariant("max_round_duration", "d_max must be >= 1");
    if (p.batch_size < 1) invariant("batch_size", "batch_size must be >= 1");
    if (!(p.alpha >= 0.0)) invariant("alpha", "alpha must be >= 0");
    if (!(p.over_selection_factor >= 1.0)) {
        invariant("over_selection_factor", "over_selection_factor must be >= 1");
    }
    if (!(p.mip_relative_gap >= 0.0)) invariant("mip_relative_gap", "mip_relative_gap must be >= 0");
    if (!(p.mip_time_limit_seconds > 0.0)) {
        invariant("mip_time_limit_seconds", "mip_time_limit_seconds must be positive");
    }
    if (p.mip_node_limit < 1) invariant("mip_node_limit", "mip_node_limit must be >= 1");
}

} // namespace detail

/// Validate and canonicalize a scenario.
///
/// Throws ScenarioError when a client is listed by two domains, a client names
/// an unknown domain, a domain lists an unknown client, or any type invariant
/// (including "every client belongs to exactly its own domain") fails.
inline Scenario validate_scenario(std::vector<ClientSpec> clients, std::vector<PowerDomain> domains,
                                  SimulationParams params, ForecastConfig forecast = {}) {
    detail::check_params(params);
    for (const auto& c : clients) {
        detail::check_client(c);
    }

    std::stable_sort(clients.begin(), clients.end(),
                     [](const ClientSpec& a, const ClientSpec& b) { return a.id < b.id; });

    Scenario s;
    for (std::size_t i = 0; i < clients.size(); ++i) {
        if (!s.client_lookup_.emplace(clients[i].id, i).second) {
            detail::invariant("id", "duplicate client id '" + clients[i].id + "'");
        }
    }
    for (std::size_t p = 0; p < domains.size(); ++p) {
        if (domains[p].id.empty()) detail::invariant("id", "domain id must not be empty");
        if (!s.domain_lookup_.emplace(domains[p].id, p).second) {
            detail::invariant("id", "duplicate domain id '" + domains[p].id + "'");
        }
    }

    constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
    s.domain_of_.assign(clients.size(), kUnassigned);
    s.members_.assign(domains.size(), {});
    for (std::size_t p = 0; p < domains.size(); ++p) {
        for (const auto& cid : domains[p].client_ids) {
            auto it = s.client_lookup_.find(cid);
            if (it == s.client_lookup_.end()) {
                throw ScenarioError(ScenarioErrorKind::unknown_client_reference, cid,
                                    "domain '" + domains[p].id + "' lists unknown client '" + cid + "'");
            }
            if (s.domain_of_[it->second] != kUnassigned) {
                throw ScenarioError(ScenarioErrorKind::duplicate_client_in_multiple_domains, cid,
                                    "client '" + cid + "' appears in more than one domain");
            }
            s.domain_of_[it->second] = p;
            s.members_[p].push_back(it->second);
        }
        std::sort(s.members_[p].begin(), s.members_[p].end());
    }
    for (std::size_t i = 0; i < clients.size(); ++i) {
        auto it = s.domain_lookup_.find(clients[i].domain_id);
        if (it == s.domain_lookup_.end()) {
            throw ScenarioError(ScenarioErrorKind::unknown_domain_reference, clients[i].domain_id,
                                "client '" + clients[i].id + "' references unknown domain '" +
                                    clients[i].domain_id + "'");
        }
        if (s.domain_of_[i] != it->second) {
            detail::invariant("client_ids", "client '" + clients[i].id + "' is not listed by its domain '" +
                                                clients[i].domain_id + "'");
        }
    }

    s.params_ = params;
    s.forecast_ = forecast;
    s.clients_ = std::move(clients);
    s.domains_ = std::move(domains);
    return s;
}

inline Scenario Scenario::with_params(SimulationParams params) const {
    return validate_scenario(clients_, domains_, params, forecast_);
}

inline Scenario Scenario::with_forecast(ForecastConfig forecast) const {
    return validate_scenario(clients_, domains_, params_, forecast);
}

} // namespace fedzero
