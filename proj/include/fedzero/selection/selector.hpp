#pragma once

/// @file selector.hpp
/// @brief Round selection: duration search, feasibility and the cross-domain optimum.

#include <fedzero/selection/domain_problem.hpp>
#include <fedzero/selection/filters.hpp>
#include <fedzero/selection/types.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace fedzero {

enum class DurationSearch {
    /// Gallop then bisect inside each interval where the kept domain set is constant.
    segmented,
    linear,
};

struct SelectionOptions {
    /// Relative optimality gap per domain solve (0 = exact).
    double relative_gap = 0.0;
    double time_limit_seconds = 30.0;
    /// Branch-and-bound nodes per domain solve; unlike the time limit this
    /// cutoff is deterministic.
    std::size_t node_limit = 2'000'000;
    DurationSearch search = DurationSearch::segmented;
};

namespace detail {

inline solver::MipStatus weaker(solver::MipStatus a, solver::MipStatus b) {
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

/// Per-domain programs for one candidate duration.
class DurationProblem {
public:
    DurationProblem(const SelectionInput& input, std::span<const std::size_t> eligible, Timestep d)
        : input_(&input)
        , d_(d) {
        std::vector<std::vector<std::size_t>> by_domain(input.energy.size());
        for (std::size_t pos : eligible) by_domain[input.clients[pos].domain].push_back(pos);
        for (std::size_t p = 0; p < by_domain.size(); ++p) {
            if (by_domain[p].empty()) continue;
            DomainProblem dp(input, p, by_domain[p], d);
            if (dp.size() == 0) continue;
            domains_.push_back(std::move(dp));
        }
        lo_.resize(domains_.size());
        hi_.resize(domains_.size());
        for (std::size_t i = 0; i < domains_.size(); ++i) {
            lo_[i] = std::min(domains_[i].kappa_lower(), input.n);
            hi_[i] = std::min(domains_[i].size(), input.n);
        }
    }

    [[nodiscard]] const std::vector<DomainProblem>& domains() const noexcept { return domains_; }
    [[nodiscard]] std::size_t kappa_lo(std::size_t i) const { return lo_[i]; }
    [[nodiscard]] std::size_t kappa_hi(std::size_t i) const { return hi_[i]; }
    [[nodiscard]] Timestep duration() const noexcept { return d_; }

    /// True if n members can reach their thresholds at once, across all domains.
    bool feasible(const SelectionOptions& opt, solver::MipStatus& status) {
        const std::size_t n = input_->n;
        auto sum = [](const std::vector<std::size_t>& v) {
            std::size_t s = 0;
            for (auto x : v) s += x;
            return s;
        };
        if (sum(lo_) >= n) return true;
        if (sum(hi_) < n) return false;
        for (std::size_t i = 0; i < domains_.size(); ++i) hi_[i] = std::min(hi_[i], domains_[i].kappa_upper());
        if (sum(hi_) < n) return false;
        for (std::size_t i = 0; i < domains_.size(); ++i) {
            if (lo_[i] == hi_[i]) continue;
            const auto [k, st] = domains_[i].kappa_exact(hi_[i], {opt.relative_gap, opt.time_limit_seconds, opt.node_limit});
            status = weaker(status, st == solver::MipStatus::infeasible ? solver::MipStatus::optimal : st);
            lo_[i] = std::max(lo_[i], k);
            if (st == solver::MipStatus::optimal || st == solver::MipStatus::infeasible) hi_[i] = lo_[i];
            if (sum(lo_) >= n) return true;
            if (sum(hi_) < n) return false;
        }
        return sum(lo_) >= n;
    }

private:
    const SelectionInput* input_;
    Timestep d_;
    std::vector<DomainProblem> domains_;
    std::vector<std::size_t> lo_;
    std::vector<std::size_t> hi_;
};

struct DpState {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> ranks;
    std::size_t take = 0;
};

inline bool better(double v, const std::vector<std::size_t>& ranks, const DpState& cur) {
    if (!std::isfinite(cur.value)) return std::isfinite(v);
    const double tol = 1e-9 * std::max(1.0, std::abs(cur.value));
    if (v > cur.value + tol) return true;
    if (v < cur.value - tol) return false;
    return ranks < cur.ranks;
}

} // namespace detail

/// Optimal selection of exactly n clients among `eligible` (positions into
/// input.clients) for duration d; nullopt if infeasible.
inline std::optional<RoundPlan> solve_selection_mip(const SelectionInput& input, std::span<const std::size_t> eligible,
                                                   Timestep d, const SelectionOptions& opt = {}) {
    if (d < 1 || d > input.d_max) throw std::invalid_argument("duration outside [1, d_max]");
    detail::DurationProblem problem(input, eligible, d);
    const auto& doms = problem.domains();
    const std::size_t n = input.n;
    const std::size_t np = doms.size();
    const DomainSolveOptions dso{opt.relative_gap, opt.time_limit_seconds, opt.node_limit};

    enum class Kind { exact, bound, infeasible };
    struct Entry {
        Kind kind = Kind::bound;
        double value = 0.0;
        DomainSolution solution;
        std::vector<std::size_t> ranks;
    };
    std::vector<std::vector<Entry>> table(np);
    std::size_t mip_solves = 0;
    solver::MipStatus status = solver::MipStatus::optimal;

    auto ranks_of = [&](const std::vector<std::size_t>& positions) {
        std::vector<std::size_t> r;
        for (auto pos : positions) r.push_back(input.clients[pos].index);
        return r;
    };
    auto make_exact = [&](std::size_t p, std::size_t k) {
        Entry& e = table[p][k];
        e.solution = doms[p].solve(k, dso);
        if (k >= 2) ++mip_solves;
        if (!e.solution.found) {
            status = detail::weaker(status, e.solution.status == solver::MipStatus::infeasible
                                                ? solver::MipStatus::optimal
                                                : e.solution.status);
            // Feasible sets are closed under removal, so larger counts fail too.
            for (std::size_t kk = k; kk < table[p].size(); ++kk) table[p][kk].kind = Kind::infeasible;
            return;
        }
        status = detail::weaker(status, e.solution.status);
        e.kind = Kind::exact;
        e.value = e.solution.value;
        e.ranks = ranks_of(e.solution.chosen);
    };

    for (std::size_t p = 0; p < np; ++p) {
        const std::size_t kmax = std::min(n, doms[p].size());
        table[p].resize(kmax + 1);
        for (std::size_t k = 0; k <= kmax; ++k) {
            Entry& e = table[p][k];
            if (k <= 1) {
                make_exact(p, k);
                continue;
            }
            e.kind = Kind::bound;
            e.value = doms[p].upper_bound(k);
            std::vector<std::size_t> pos;
            for (auto m : doms[p].top_by_single(k)) pos.push_back(doms[p].members()[m].pos);
            e.ranks = ranks_of(pos);
        }
    }

    while (true) {
        // dp[p][s]: best over the first p domains using s clients.
        std::vector<std::vector<detail::DpState>> dp(np + 1, std::vector<detail::DpState>(n + 1));
        dp[0][0].value = 0.0;
        for (std::size_t p = 0; p < np; ++p) {
            for (std::size_t s = 0; s <= n; ++s) {
                if (!std::isfinite(dp[p][s].value)) continue;
                for (std::size_t k = 0; k < table[p].size() && s + k <= n; ++k) {
                    const Entry& e = table[p][k];
                    if (e.kind == Kind::infeasible) continue;
                    const double v = dp[p][s].value + e.value;
                    std::vector<std::size_t> ranks;
                    ranks.reserve(dp[p][s].ranks.size() + e.ranks.size());
                    std::merge(dp[p][s].ranks.begin(), dp[p][s].ranks.end(), e.ranks.begin(), e.ranks.end(),
                               std::back_inserter(ranks));
                    auto& target = dp[p + 1][s + k];
                    if (detail::better(v, ranks, target)) {
                        target.value = v;
                        target.ranks = std::move(ranks);
                        target.take = k;
                    }
                }
            }
        }
        if (!std::isfinite(dp[np][n].value)) return std::nullopt;

        std::vector<std::size_t> take(np);
        std::size_t s = n;
        for (std::size_t p = np; p-- > 0;) {
            take[p] = dp[p + 1][s].take;
            s -= take[p];
        }
        bool all_exact = true;
        for (std::size_t p = 0; p < np; ++p) {
            if (table[p][take[p]].kind != Kind::exact) {
                all_exact = false;
                make_exact(p, take[p]);
            }
        }
        if (!all_exact) continue;

        RoundPlan plan;
        plan.duration = d;
        plan.status = status;
        plan.mip_solves = mip_solves;
        std::vector<std::pair<std::size_t, std::vector<Batches>>> rows;
        for (std::size_t p = 0; p < np; ++p) {
            const auto& sol = table[p][take[p]].solution;
            plan.objective += sol.value;
            for (std::size_t j = 0; j < sol.chosen.size(); ++j) {
                rows.emplace_back(input.clients[sol.chosen[j]].index, sol.schedule[j]);
            }
        }
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [idx, row] : rows) {
            plan.selected.push_back(idx);
            plan.expected.push_back(std::move(row));
        }
        return plan;
    }
}

/// Filters plus feasibility of the selection program at duration d.
class FeasibilityOracle {
public:
    FeasibilityOracle(const SelectionInput& input, SelectionOptions opt)
        : input_(&input)
        , opt_(opt) {}

    bool operator()(Timestep d) {
        if (auto it = cache_.find(d); it != cache_.end()) return it->second;
        ++evaluations_;
        const auto eligible = filter_clients(*input_, filter_power_domains(*input_, d), d);
        bool ok = eligible.size() >= input_->n;
        if (ok) {
            detail::DurationProblem problem(*input_, eligible, d);
            ok = problem.feasible(opt_, status_);
        }
        cache_.emplace(d, ok);
        return ok;
    }

    [[nodiscard]] std::size_t evaluations() const noexcept { return evaluations_; }
    [[nodiscard]] solver::MipStatus status() const noexcept { return status_; }

private:
    const SelectionInput* input_;
    SelectionOptions opt_;
    std::map<Timestep, bool> cache_;
    std::size_t evaluations_ = 0;
    solver::MipStatus status_ = solver::MipStatus::optimal;
};

/// Smallest d in [1, d_max] at which the filtered program is feasible, scanning upwards.
inline std::optional<Timestep> duration_linear_scan(FeasibilityOracle& feasible, Timestep from, Timestep d_max) {
    for (Timestep d = from; d <= d_max; ++d) {
        if (feasible(d)) return d;
    }
    return std::nullopt;
}

/// Same result as the linear scan with O(log d) evaluations per interval of
/// constant domain survival.
inline std::optional<Timestep> duration_search(const SelectionInput& input, FeasibilityOracle& feasible) {
    const Timestep d_max = input.d_max;
    // A domain survives the energy filter exactly for d <= its first zero index.
    std::vector<Timestep> cuts;
    for (const auto& r : input.energy) {
        for (Timestep t = 0; t < d_max; ++t) {
            if (!(r[static_cast<std::size_t>(t)] > 0.0)) {
                if (t >= 1) cuts.push_back(t);
                break;
            }
        }
    }
    cuts.push_back(d_max);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Timestep lo = 1;
    for (Timestep hi : cuts) {
        if (hi < lo) continue;
        Timestep bad = lo - 1;
        Timestep step = 1;
        Timestep probe = lo;
        while (true) {
            if (feasible(probe)) {
                Timestep good = probe;
                while (good - bad > 1) {
                    const Timestep mid = bad + (good - bad) / 2;
                    if (feasible(mid)) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                return good;
            }
            bad = probe;
            if (probe == hi) break;
            probe = std::min(hi, lo + 2 * step - 1);
            step *= 2;
        }
        lo = hi + 1;
    }
    return std::nullopt;
}

/// Minimal feasible duration and the optimal clients for it; nullopt means
/// wait one timestep and retry.
inline std::optional<RoundPlan> select_round(const SelectionInput& input, const SelectionOptions& opt = {}) {
    input.validate();
    FeasibilityOracle feasible(input, opt);
    auto d = opt.search == DurationSearch::linear ? duration_linear_scan(feasible, 1, input.d_max)
                                                  : duration_search(input, feasible);
    bool fallback = false;
    while (d) {
        const auto eligible = filter_clients(input, filter_power_domains(input, *d), *d);
        if (auto plan = solve_selection_mip(input, eligible, *d, opt)) {
            plan->evaluations = feasible.evaluations();
            plan->status = detail::weaker(plan->status, feasible.status());
            plan->linear_fallback = fallback;
            return plan;
        }
        fallback = true;
        d = duration_linear_scan(feasible, *d + 1, input.d_max);
    }
    return std::nullopt;
}

/// Dumps each domain's k-member program at duration d, separated by comment lines.
inline void write_selection_lp(std::ostream& os, const SelectionInput& input, Timestep d, std::size_t k) {
    const auto eligible = filter_clients(input, filter_power_domains(input, d), d);
    detail::DurationProblem problem(input, eligible, d);
    for (std::size_t i = 0; i < problem.domains().size(); ++i) {
        os << "\\ domain program " << i << '\n';
        problem.domains()[i].write_lp(os, k);
    }
}

} // namespace fedzero
