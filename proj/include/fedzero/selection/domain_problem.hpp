#pragma once

/// @file domain_problem.hpp
/// @brief The selection program restricted to a single power domain.
///
/// Domains share no constraint except the cardinality row, so the global
/// program decomposes into one program per domain and count k_p. Timesteps
/// whose energy row cannot bind are merged into one aggregate variable per
/// client.

#include <fedzero/selection/types.hpp>
#include <fedzero/solver/mip.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace fedzero {

struct DomainSolveOptions {
    double relative_gap = 0.0;
    double time_limit_seconds = 30.0;
    std::size_t node_limit = 2'000'000;
};

struct DomainSolution {
    bool found = false;
    double value = 0.0;
    /// Positions into SelectionInput::clients, ascending.
    std::vector<std::size_t> chosen;
    /// schedule[i][t] for chosen[i], t = 0 .. d - 1.
    std::vector<std::vector<Batches>> schedule;
    solver::MipStatus status = solver::MipStatus::infeasible;
};

class DomainProblem {
public:
    struct Member {
        std::size_t pos;
        double sigma;
        Energy delta;
        Batches m_min;
        Batches m_max;
        std::vector<Batches> u;
        Batches total_u;
        Batches cap;
        double single;
    };

    using Alloc = std::vector<std::vector<Batches>>;

    DomainProblem(const SelectionInput& input, std::size_t domain, std::span<const std::size_t> candidates, Timestep d)
        : d_(static_cast<std::size_t>(d))
        , r_(input.energy.at(domain).begin(), input.energy.at(domain).begin() + d) {
        for (std::size_t pos : candidates) {
            const auto& c = input.clients[pos];
            Member m{pos, c.sigma, c.delta, c.m_min, c.m_max, std::vector<Batches>(d_), 0, 0, 0.0};
            for (std::size_t t = 0; t < d_; ++t) {
                m.u[t] = std::min(c.spare[t], fit(r_[t], c.delta));
                m.total_u += m.u[t];
            }
            if (m.total_u < m.m_min) continue;
            m.cap = std::min(m.m_max, m.total_u);
            m.single = m.sigma * static_cast<double>(m.cap);
            members_.push_back(std::move(m));
        }
        tight_.assign(d_, false);
        for (std::size_t t = 0; t < d_; ++t) {
            double demand = 0.0;
            for (const auto& m : members_) demand += m.delta * static_cast<double>(m.u[t]);
            if (std::isfinite(r_[t]) && demand > r_[t] + 1e-9 * std::max(1.0, r_[t])) {
                tight_[t] = true;
                effective_energy_ += r_[t];
            } else {
                effective_energy_ += demand;
            }
        }
        by_single_.resize(members_.size());
        std::iota(by_single_.begin(), by_single_.end(), std::size_t{0});
        std::stable_sort(by_single_.begin(), by_single_.end(),
                         [&](std::size_t a, std::size_t b) { return members_[a].single > members_[b].single; });
        for (const auto& m : members_) max_ratio_ = std::max(max_ratio_, m.sigma / m.delta);
    }

    [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
    [[nodiscard]] const std::vector<Member>& members() const noexcept { return members_; }
    [[nodiscard]] Timestep duration() const noexcept { return static_cast<Timestep>(d_); }

    /// Upper bound on the best value with exactly k members.
    [[nodiscard]] double upper_bound(std::size_t k) const {
        if (k > members_.size()) return -std::numeric_limits<double>::infinity();
        double top = 0.0;
        for (std::size_t i = 0; i < k; ++i) top += members_[by_single_[i]].single;
        return std::min(top, max_ratio_ * effective_energy_);
    }

    /// Member positions (into members()) of the k best single values, ties by rank.
    [[nodiscard]] std::vector<std::size_t> top_by_single(std::size_t k) const {
        std::vector<std::size_t> out(by_single_.begin(), by_single_.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Largest set size the greedy allocator can bring to m_min simultaneously.
    [[nodiscard]] std::size_t kappa_lower() const {
        std::size_t best = 0;
        for (int order = 0; order < 3 && best < members_.size(); ++order) {
            std::vector<std::size_t> idx(members_.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            auto key = [&](std::size_t i) {
                const auto& m = members_[i];
                switch (order) {
                case 0: return m.delta * static_cast<double>(m.m_min);
                case 1: return static_cast<double>(m.total_u - m.m_min);
                default: return static_cast<double>(m.m_min) / static_cast<double>(m.total_u);
                }
            };
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
            std::vector<double> res = r_;
            std::size_t count = 0;
            std::vector<Batches> row(d_);
            for (std::size_t i : idx) {
                std::vector<double> trial = res;
                std::fill(row.begin(), row.end(), 0);
                if (fill(members_[i], trial, row, members_[i].m_min) >= members_[i].m_min) {
                    res = std::move(trial);
                    ++count;
                }
            }
            best = std::max(best, count);
        }
        return best;
    }

    /// Member count bounded by the cheapest thresholds that fit the usable energy.
    [[nodiscard]] std::size_t kappa_upper() const {
        std::vector<double> need;
        need.reserve(members_.size());
        for (const auto& m : members_) need.push_back(m.delta * static_cast<double>(m.m_min));
        std::sort(need.begin(), need.end());
        double sum = 0.0;
        std::size_t k = 0;
        for (double v : need) {
            sum += v;
            if (sum > effective_energy_ * (1.0 + 1e-12) + 1e-9) break;
            ++k;
        }
        return k;
    }

    /// min(cap, largest number of members that can all reach m_min), solved exactly.
    /// Returns the incumbent count if the solver stops early.
    [[nodiscard]] std::pair<std::size_t, solver::MipStatus> kappa_exact(std::size_t cap,
                                                                       const DomainSolveOptions& opt) const {
        Model model = build(false, cap);
        solver::MipOptions mo;
        mo.integral_objective = true;
        mo.time_limit_seconds = opt.time_limit_seconds;
        mo.node_limit = opt.node_limit;
        mo.heuristic = [&](std::span<const double> x, std::span<const double>, std::span<const double>)
            -> std::optional<std::vector<double>> {
            std::vector<std::size_t> idx(members_.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::stable_sort(idx.begin(), idx.end(),
                             [&](std::size_t a, std::size_t b) { return x[model.b[a]] > x[model.b[b]]; });
            std::vector<double> res = r_;
            std::vector<std::size_t> chosen;
            std::vector<Batches> row(d_);
            Alloc alloc;
            for (std::size_t i : idx) {
                if (chosen.size() >= cap) break;
                std::vector<double> trial = res;
                std::fill(row.begin(), row.end(), 0);
                if (fill(members_[i], trial, row, members_[i].m_min) >= members_[i].m_min) {
                    res = std::move(trial);
                    chosen.push_back(i);
                    alloc.push_back(row);
                }
            }
            return to_vector(model, chosen, alloc);
        };
        const auto r = solver::solve_mip(model.mip, mo);
        if (!r.has_solution()) return {0, r.status};
        return {static_cast<std::size_t>(std::llround(r.objective)), r.status};
    }

    /// Best selection of exactly k members.
    [[nodiscard]] DomainSolution solve(std::size_t k, const DomainSolveOptions& opt) const {
        DomainSolution out;
        if (k > members_.size()) return out;
        if (k == 0) {
            out.found = true;
            out.status = solver::MipStatus::optimal;
            return out;
        }
        if (k == 1) return single(by_single_.front());

        const auto top = top_by_single(k);
        if (auto alloc = greedy(top, nullptr)) {
            const double v = value_of(top, *alloc);
            if (v >= upper_bound(k) * (1.0 - 1e-12)) return finish(top, *alloc, solver::MipStatus::optimal);
        }

        Model model = build(true, k);
        solver::MipOptions mo;
        mo.relative_gap = opt.relative_gap;
        mo.time_limit_seconds = opt.time_limit_seconds;
        mo.node_limit = opt.node_limit;
        bool integral = true;
        for (const auto& m : members_) integral = integral && m.sigma == std::floor(m.sigma);
        mo.integral_objective = integral;
        mo.branch = [&](std::span<const double> x, std::span<const double>, std::span<const double>)
            -> std::optional<solver::BranchChoice> {
            for (std::size_t i = 0; i < members_.size(); ++i) {
                const double v = x[model.b[i]];
                if (std::abs(v - std::round(v)) > 1e-6) return solver::BranchChoice{model.b[i], 0.5, true};
            }
            return std::nullopt;
        };
        mo.prefer = [&](std::span<const double> a, std::span<const double> b) {
            for (std::size_t i = 0; i < members_.size(); ++i) {
                const bool ai = a[model.b[i]] > 0.5;
                const bool bi = b[model.b[i]] > 0.5;
                if (ai != bi) return ai;
            }
            return false;
        };
        mo.heuristic = [&](std::span<const double> x, std::span<const double>, std::span<const double>)
            -> std::optional<std::vector<double>> { return lp_rounding(model, x, k); };
        const auto r = solver::solve_mip(model.mip, mo);
        if (!r.has_solution()) {
            out.status = r.status;
            return out;
        }
        return from_vector(model, r.values, r.status);
    }

    /// Greedy allocation for the given members: thresholds first, then fill by σ/δ.
    /// `hint` (member-major, d columns) seeds the allocation when given.
    [[nodiscard]] std::optional<Alloc> greedy(std::span<const std::size_t> set, const Alloc* hint) const {
        std::vector<double> res = r_;
        Alloc alloc(set.size(), std::vector<Batches>(d_, 0));
        if (hint) {
            for (std::size_t j = 0; j < set.size(); ++j) {
                const auto& m = members_[set[j]];
                Batches total = 0;
                for (std::size_t t = 0; t < d_; ++t) {
                    Batches a = std::clamp<Batches>((*hint)[j][t], 0, m.u[t]);
                    a = std::min({a, fit(res[t], m.delta), m.m_max - total});
                    alloc[j][t] = a;
                    total += a;
                    consume(res[t], a, m.delta);
                }
            }
        }
        std::vector<std::size_t> order(set.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& ma = members_[set[a]];
            const auto& mb = members_[set[b]];
            return ma.total_u - ma.m_min < mb.total_u - mb.m_min;
        });
        for (std::size_t j : order) {
            const auto& m = members_[set[j]];
            if (fill(m, res, alloc[j], m.m_min) < m.m_min) return std::nullopt;
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& ma = members_[set[a]];
            const auto& mb = members_[set[b]];
            return ma.sigma / ma.delta > mb.sigma / mb.delta;
        });
        for (std::size_t j : order) {
            const auto& m = members_[set[j]];
            fill(m, res, alloc[j], m.m_max);
        }
        return alloc;
    }

    /// Writes the k-member program in CPLEX LP format.
    void write_lp(std::ostream& os, std::size_t k) const {
        const Model model = build(true, k);
        solver::write_lp_format(os, model.mip.lp, model.mip.integer);
    }

private:
    struct Model {
        solver::MipProblem mip;
        std::vector<std::size_t> b;
        std::vector<std::size_t> y;
        /// Per member: (timestep, variable) for tight timesteps.
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> x;
    };

    static Batches fit(double energy, Energy delta) {
        if (std::isinf(energy)) return std::numeric_limits<Batches>::max() / 4;
        const double v = std::floor(energy / delta + 1e-9);
        return v <= 0.0 ? 0 : static_cast<Batches>(v);
    }

    static void consume(double& energy, Batches a, Energy delta) {
        if (std::isinf(energy) || a == 0) return;
        energy = std::max(0.0, energy - static_cast<double>(a) * delta);
    }

    /// Adds batches to `row` in ascending time until the row totals `target`.
    Batches fill(const Member& m, std::vector<double>& res, std::vector<Batches>& row, Batches target) const {
        Batches total = std::accumulate(row.begin(), row.end(), Batches{0});
        for (std::size_t t = 0; t < d_ && total < target; ++t) {
            const Batches a = std::min({m.u[t] - row[t], fit(res[t], m.delta), target - total});
            if (a <= 0) continue;
            row[t] += a;
            total += a;
            consume(res[t], a, m.delta);
        }
        return total;
    }

    Model build(bool value_objective, std::size_t k) const {
        Model model;
        auto& lp = model.mip.lp;
        const std::size_t n = members_.size();
        for (std::size_t i = 0; i < n; ++i) {
            model.b.push_back(lp.add_variable(0.0, 1.0, value_objective ? 0.0 : 1.0, "b" + std::to_string(i)));
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& m = members_[i];
            Batches slack_cap = 0;
            for (std::size_t t = 0; t < d_; ++t) {
                if (!tight_[t]) slack_cap += m.u[t];
            }
            model.y.push_back(lp.add_variable(0.0, static_cast<double>(std::min(slack_cap, m.cap)),
                                              value_objective ? m.sigma : 0.0, "y" + std::to_string(i)));
        }
        model.x.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& m = members_[i];
            for (std::size_t t = 0; t < d_; ++t) {
                if (!tight_[t] || m.u[t] == 0) continue;
                const auto v = lp.add_variable(0.0, static_cast<double>(std::min(m.u[t], m.cap)),
                                               value_objective ? m.sigma : 0.0,
                                               "x" + std::to_string(i) + "_" + std::to_string(t));
                model.x[i].emplace_back(t, v);
            }
        }
        for (std::size_t t = 0; t < d_; ++t) {
            if (!tight_[t]) continue;
            std::vector<solver::LinearTerm> terms;
            for (std::size_t i = 0; i < n; ++i) {
                for (const auto& [tt, v] : model.x[i]) {
                    if (tt == t) terms.push_back({v, members_[i].delta});
                }
            }
            if (terms.empty()) continue;
            // Rounded copies of the row scaled by 1/δ_j for each distinct δ_j.
            std::vector<double> deltas;
            for (const auto& term : terms) deltas.push_back(term.coef);
            std::sort(deltas.begin(), deltas.end());
            deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
            for (double dj : deltas) {
                std::vector<solver::LinearTerm> cut;
                for (const auto& term : terms) {
                    const double coef = std::floor(term.coef / dj + 1e-9);
                    if (coef > 0.0) cut.push_back({term.var, coef});
                }
                lp.add_row(std::move(cut), solver::RowSense::less_equal, std::floor(r_[t] / dj + 1e-9));
            }
            lp.add_row(std::move(terms), solver::RowSense::less_equal, r_[t]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& m = members_[i];
            std::vector<solver::LinearTerm> work{{model.y[i], 1.0}};
            for (const auto& xv : model.x[i]) work.push_back({xv.second, 1.0});
            auto lower = work;
            for (auto& t : lower) t.coef = -1.0;
            lower.push_back({model.b[i], static_cast<double>(m.m_min)});
            lp.add_row(std::move(lower), solver::RowSense::less_equal, 0.0);
            if (value_objective) {
                work.push_back({model.b[i], -static_cast<double>(m.cap)});
                lp.add_row(std::move(work), solver::RowSense::less_equal, 0.0);
            }
        }
        std::vector<solver::LinearTerm> card;
        for (std::size_t i = 0; i < n; ++i) card.push_back({model.b[i], 1.0});
        lp.add_row(std::move(card), value_objective ? solver::RowSense::equal : solver::RowSense::less_equal,
                   static_cast<double>(k));
        model.mip.integer.assign(lp.num_variables(), true);
        return model;
    }

    std::vector<double> to_vector(const Model& model, std::span<const std::size_t> set, const Alloc& alloc) const {
        std::vector<double> x(model.mip.lp.num_variables(), 0.0);
        for (std::size_t j = 0; j < set.size(); ++j) {
            const std::size_t i = set[j];
            x[model.b[i]] = 1.0;
            Batches slack = 0;
            for (std::size_t t = 0; t < d_; ++t) {
                if (!tight_[t]) slack += alloc[j][t];
            }
            x[model.y[i]] = static_cast<double>(slack);
            for (const auto& [t, v] : model.x[i]) x[v] = static_cast<double>(alloc[j][t]);
        }
        return x;
    }

    std::optional<std::vector<double>> lp_rounding(const Model& model, std::span<const double> x, std::size_t k) const {
        std::vector<std::size_t> idx(members_.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const double xa = x[model.b[a]];
            const double xb = x[model.b[b]];
            if (std::abs(xa - xb) > 1e-9) return xa > xb;
            return members_[a].single > members_[b].single;
        });
        std::vector<std::size_t> set(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(set.begin(), set.end());
        Alloc hint(set.size(), std::vector<Batches>(d_, 0));
        for (std::size_t j = 0; j < set.size(); ++j) {
            for (const auto& [t, v] : model.x[set[j]]) hint[j][t] = static_cast<Batches>(std::floor(x[v] + 1e-9));
        }
        std::optional<std::vector<double>> best;
        double best_value = -1.0;
        for (const Alloc* h : {static_cast<const Alloc*>(&hint), static_cast<const Alloc*>(nullptr)}) {
            if (auto alloc = greedy(set, h)) {
                const double v = value_of(set, *alloc);
                if (v > best_value) {
                    best_value = v;
                    best = to_vector(model, set, *alloc);
                }
            }
        }
        return best;
    }

    DomainSolution from_vector(const Model& model, std::span<const double> x, solver::MipStatus status) const {
        std::vector<std::size_t> set;
        Alloc alloc;
        for (std::size_t i = 0; i < members_.size(); ++i) {
            if (x[model.b[i]] < 0.5) continue;
            const auto& m = members_[i];
            std::vector<Batches> row(d_, 0);
            for (const auto& [t, v] : model.x[i]) row[t] = static_cast<Batches>(std::llround(x[v]));
            auto rest = static_cast<Batches>(std::llround(x[model.y[i]]));
            for (std::size_t t = 0; t < d_ && rest > 0; ++t) {
                if (tight_[t]) continue;
                const Batches a = std::min(rest, m.u[t]);
                row[t] = a;
                rest -= a;
            }
            set.push_back(i);
            alloc.push_back(std::move(row));
        }
        return finish(set, alloc, status);
    }

    DomainSolution single(std::size_t i) const {
        const auto& m = members_[i];
        std::vector<Batches> row(d_, 0);
        Batches left = m.cap;
        for (std::size_t t = 0; t < d_ && left > 0; ++t) {
            row[t] = std::min(left, m.u[t]);
            left -= row[t];
        }
        const std::size_t set[1] = {i};
        return finish(set, Alloc{std::move(row)}, solver::MipStatus::optimal);
    }

    double value_of(std::span<const std::size_t> set, const Alloc& alloc) const {
        double v = 0.0;
        for (std::size_t j = 0; j < set.size(); ++j) {
            const auto total = std::accumulate(alloc[j].begin(), alloc[j].end(), Batches{0});
            v += members_[set[j]].sigma * static_cast<double>(total);
        }
        return v;
    }

    DomainSolution finish(std::span<const std::size_t> set, Alloc alloc, solver::MipStatus status) const {
        DomainSolution out;
        out.found = true;
        out.status = status;
        out.value = value_of(set, alloc);
        for (std::size_t j = 0; j < set.size(); ++j) out.chosen.push_back(members_[set[j]].pos);
        out.schedule = std::move(alloc);
        return out;
    }

    std::size_t d_;
    std::vector<double> r_;
    std::vector<Member> members_;
    std::vector<bool> tight_;
    std::vector<std::size_t> by_single_;
    double effective_energy_ = 0.0;
    double max_ratio_ = 0.0;
};

} // namespace fedzero
