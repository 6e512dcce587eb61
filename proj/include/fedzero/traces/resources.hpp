#pragma once

/// @file resources.hpp
/// @brief Actual and forecasted excess energy per domain and spare capacity per client.

#include <fedzero/core/scenario.hpp>
#include <fedzero/traces/forecast_model.hpp>
#include <fedzero/traces/trace_series.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fedzero {

/// Raw traces for one scenario before forecasts are derived.
struct TraceBundle {
    /// Excess energy per domain in watt-minutes per timestep.
    std::vector<TraceSeries> energy;
    /// Utilization fraction per client; nullopt means always idle.
    std::vector<std::optional<TraceSeries>> utilization;
    /// Only consulted when a forecast model has kind `trace_pair`.
    std::vector<std::optional<TraceSeries>> energy_forecast;
    std::vector<std::optional<TraceSeries>> utilization_forecast;
};

/// Read-only provider of ground truth and forecasts. Selection strategies read
/// the forecast side; the round runtime reads the actual side.
class ResourceTraces {
public:
    ResourceTraces() = default;

    ResourceTraces(const Scenario& scenario, TraceBundle bundle) {
        const auto& cfg = scenario.forecast();
        const std::size_t np = scenario.num_domains();
        const std::size_t nc = scenario.num_clients();
        if (bundle.energy.size() != np) {
            throw std::invalid_argument("expected one energy trace per power domain");
        }
        bundle.utilization.resize(nc);
        bundle.energy_forecast.resize(np);
        bundle.utilization_forecast.resize(nc);

        unlimited_.resize(np);
        for (std::size_t p = 0; p < np; ++p) {
            unlimited_[p] = scenario.domains()[p].unlimited_energy;
            energy_forecast_.push_back(derive(cfg.energy, bundle.energy[p], bundle.energy_forecast[p], p));
            energy_actual_.push_back(std::move(bundle.energy[p]));
        }

        capacity_.reserve(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            capacity_.push_back(scenario.clients()[c].max_capacity);
            std::optional<TraceSeries> avail;
            if (bundle.utilization[c]) {
                avail = to_availability(*bundle.utilization[c]);
            }
            std::optional<TraceSeries> avail_fc;
            if (avail) {
                std::optional<TraceSeries> pair;
                if (bundle.utilization_forecast[c]) {
                    pair = to_availability(*bundle.utilization_forecast[c]);
                }
                avail_fc = derive(cfg.capacity, *avail, pair, 1'000'003ULL + c);
            }
            availability_actual_.push_back(std::move(avail));
            availability_forecast_.push_back(std::move(avail_fc));
        }
        capacity_forecasts_ = cfg.capacity_forecasts;
    }

    [[nodiscard]] std::size_t num_domains() const noexcept { return energy_actual_.size(); }
    [[nodiscard]] std::size_t num_clients() const noexcept { return capacity_.size(); }

    [[nodiscard]] bool unlimited(std::size_t domain) const { return unlimited_.at(domain); }

    /// First timestep not covered by every finite trace.
    [[nodiscard]] Timestep end() const {
        Timestep e = std::numeric_limits<Timestep>::max();
        for (std::size_t p = 0; p < energy_actual_.size(); ++p) {
            if (!unlimited_[p]) e = std::min({e, energy_actual_[p].end(), energy_forecast_[p].end()});
        }
        for (std::size_t c = 0; c < capacity_.size(); ++c) {
            if (availability_actual_[c]) e = std::min(e, availability_actual_[c]->end());
            if (availability_forecast_[c]) e = std::min(e, availability_forecast_[c]->end());
        }
        return e;
    }

    /// r_{p,t} for t = t0 .. t0 + horizon - 1.
    [[nodiscard]] std::vector<Energy> excess_energy_forecast(std::size_t domain, Timestep t0, Timestep horizon) const {
        check_horizon(horizon);
        if (unlimited_.at(domain)) {
            return std::vector<Energy>(static_cast<std::size_t>(horizon), kUnlimitedEnergy);
        }
        return energy_forecast_[domain].slice(t0, horizon);
    }

    /// m^spare_{c,t} in [0, m_c] for t = t0 .. t0 + horizon - 1.
    [[nodiscard]] std::vector<Batches> spare_capacity_forecast(std::size_t client, Timestep t0, Timestep horizon) const {
        check_horizon(horizon);
        const Batches cap = capacity_.at(client);
        std::vector<Batches> out(static_cast<std::size_t>(horizon), cap);
        const auto& fc = availability_forecast_[client];
        if (!capacity_forecasts_ || !fc) {
            return out;
        }
        const auto values = fc->slice(t0, horizon);
        for (std::size_t i = 0; i < values.size(); ++i) {
            out[i] = to_batches(cap, values[i]);
        }
        return out;
    }

    [[nodiscard]] Energy actual_excess_energy(std::size_t domain, Timestep t) const {
        if (unlimited_.at(domain)) {
            return kUnlimitedEnergy;
        }
        return energy_actual_[domain].at(t);
    }

    [[nodiscard]] Batches actual_spare_capacity(std::size_t client, Timestep t) const {
        const Batches cap = capacity_.at(client);
        const auto& a = availability_actual_[client];
        return a ? to_batches(cap, a->at(t)) : cap;
    }

    /// Replace one domain with an unlimited budget and make its clients idle.
    void make_unlimited(std::size_t domain, const std::vector<std::size_t>& members) {
        unlimited_.at(domain) = true;
        for (std::size_t c : members) {
            availability_actual_.at(c).reset();
            availability_forecast_.at(c).reset();
        }
    }

    [[nodiscard]] const TraceSeries& energy_actual_trace(std::size_t domain) const { return energy_actual_.at(domain); }
    [[nodiscard]] const TraceSeries& energy_forecast_trace(std::size_t domain) const {
        return energy_forecast_.at(domain);
    }

    /// Spare fraction 1 - utilization, clamped to [0, 1].
    static TraceSeries to_availability(const TraceSeries& utilization) {
        TraceSeries out = utilization;
        for (double& v : out.samples()) {
            v = std::clamp(1.0 - v, 0.0, 1.0);
        }
        return out;
    }

private:
    static Batches to_batches(Batches cap, double fraction) {
        const double v = std::floor(static_cast<double>(cap) * std::clamp(fraction, 0.0, 1.0) + 1e-9);
        return std::clamp<Batches>(static_cast<Batches>(v), 0, cap);
    }

    static void check_horizon(Timestep horizon) {
        if (horizon < 1) {
            throw std::invalid_argument("forecast horizon must be >= 1");
        }
    }

    static TraceSeries derive(const ForecastModel& model, const TraceSeries& actual,
                              const std::optional<TraceSeries>& pair, std::uint64_t stream) {
        if (model.kind == ForecastKind::trace_pair) {
            if (!pair) {
                throw std::invalid_argument("trace_pair forecast requested but no forecast trace given");
            }
            return *pair;
        }
        return model.apply(actual, stream);
    }

    std::vector<bool> unlimited_;
    std::vector<TraceSeries> energy_actual_;
    std::vector<TraceSeries> energy_forecast_;
    std::vector<Batches> capacity_;
    std::vector<std::optional<TraceSeries>> availability_actual_;
    std::vector<std::optional<TraceSeries>> availability_forecast_;
    bool capacity_forecasts_ = true;
};

} // namespace fedzero
