#pragma once

/// @file mip.hpp
/// @brief Depth-first branch and bound over the bounded simplex.

#include <fedzero/solver/lp.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fedzero::solver {

struct MipProblem {
    LinearProgram lp;
    std::vector<bool> integer;
};

/// Children are var <= floor(split) and var >= floor(split) + 1.
struct BranchChoice {
    std::size_t var;
    double split;
    bool up_first = true;
};

using BranchHook = std::function<std::optional<BranchChoice>(std::span<const double> x, std::span<const double> lo,
                                                             std::span<const double> hi)>;
using HeuristicHook = std::function<std::optional<std::vector<double>>(
    std::span<const double> x, std::span<const double> lo, std::span<const double> hi)>;
/// True if `a` should replace `b` among solutions of equal objective.
using PreferHook = std::function<bool(std::span<const double> a, std::span<const double> b)>;

struct MipOptions {
    double relative_gap = 0.0;
    double integrality_tol = 1e-6;
    double feasibility_tol = 1e-6;
    double time_limit_seconds = 30.0;
    /// Gap under which a timed-out incumbent is still reported as usable.
    double fallback_gap = 0.01;
    std::size_t node_limit = 2'000'000;
    /// Objective is integral for every integer solution, so bounds may be floored.
    bool integral_objective = false;
    BranchHook branch;
    HeuristicHook heuristic;
    PreferHook prefer;
    LpOptions lp;
};

enum class MipStatus { optimal, within_gap, time_limit, node_limit, infeasible };

inline const char* to_string(MipStatus s) {
    switch (s) {
    case MipStatus::optimal: return "optimal";
    case MipStatus::within_gap: return "within_gap";
    case MipStatus::time_limit: return "time_limit";
    case MipStatus::node_limit: return "node_limit";
    case MipStatus::infeasible: return "infeasible";
    }
    return "infeasible";
}

struct MipResult {
    MipStatus status = MipStatus::infeasible;
    double objective = 0.0;
    /// Best known upper bound on the optimum.
    double bound = 0.0;
    std::vector<double> values;
    std::size_t nodes = 0;

    [[nodiscard]] bool has_solution() const noexcept { return !values.empty(); }
    /// Optimal, or an incumbent proven within the accepted gap.
    [[nodiscard]] bool usable() const noexcept {
        return status == MipStatus::optimal || status == MipStatus::within_gap;
    }
};

/// Checks bounds, integrality and rows; returns the objective if feasible.
inline std::optional<double> evaluate_candidate(const MipProblem& p, std::span<const double> x,
                                                std::span<const double> lo, std::span<const double> hi,
                                                double int_tol, double feas_tol) {
    const auto& lp = p.lp;
    if (x.size() != lp.num_variables()) return std::nullopt;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] < lo[j] - feas_tol || x[j] > hi[j] + feas_tol) return std::nullopt;
        if (p.integer[j] && std::abs(x[j] - std::round(x[j])) > int_tol) return std::nullopt;
    }
    for (const auto& row : lp.rows) {
        double act = 0.0;
        for (const auto& t : row.terms) act += t.coef * x[t.var];
        const double tol = feas_tol * std::max(1.0, std::abs(row.rhs));
        switch (row.sense) {
        case RowSense::less_equal:
            if (act > row.rhs + tol) return std::nullopt;
            break;
        case RowSense::greater_equal:
            if (act < row.rhs - tol) return std::nullopt;
            break;
        case RowSense::equal:
            if (std::abs(act - row.rhs) > tol) return std::nullopt;
            break;
        }
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) obj += lp.objective[j] * x[j];
    return obj;
}

class BranchAndBound {
public:
    BranchAndBound(const MipProblem& problem, MipOptions options)
        : p_(problem)
        , opt_(std::move(options)) {}

    MipResult solve() {
        start_ = std::chrono::steady_clock::now();
        MipResult res;
        struct Node {
            std::vector<double> lo;
            std::vector<double> hi;
            double parent_bound;
        };
        std::vector<Node> stack;
        stack.push_back({p_.lp.lower, p_.lp.upper, kInfinity});
        bool limit_hit = false;
        MipStatus limit_status = MipStatus::optimal;
        bool gap_used = false;

        while (!stack.empty()) {
            if (res.nodes >= opt_.node_limit) {
                limit_hit = true;
                limit_status = MipStatus::node_limit;
                break;
            }
            if ((res.nodes & 15U) == 0 && elapsed() > opt_.time_limit_seconds) {
                limit_hit = true;
                limit_status = MipStatus::time_limit;
                break;
            }
            Node node = std::move(stack.back());
            stack.pop_back();
            if (has_incumbent_ && node.parent_bound <= incumbent_obj_ + prune_tol()) {
                if (node.parent_bound > incumbent_obj_ + tie_tol()) gap_used = true;
                continue;
            }
            ++res.nodes;
            const LpResult lp = solve_lp(p_.lp, node.lo, node.hi, opt_.lp);
            if (lp.status != LpStatus::optimal) {
                if (lp.status == LpStatus::iteration_limit) {
                    limit_hit = true;
                    limit_status = MipStatus::node_limit;
                }
                continue;
            }
            double bound = std::min(lp.objective, node.parent_bound);
            if (opt_.integral_objective) bound = std::floor(bound + 1e-6);

            const auto fractional = first_fractional(lp.values);
            if (!fractional) offer(lp.values);
            if (opt_.heuristic) {
                if (auto cand = opt_.heuristic(lp.values, node.lo, node.hi)) offer(*cand);
            }
            if (has_incumbent_ && bound <= incumbent_obj_ + prune_tol()) {
                if (bound > incumbent_obj_ + tie_tol()) gap_used = true;
                continue;
            }

            std::optional<BranchChoice> choice;
            if (opt_.branch) choice = opt_.branch(lp.values, node.lo, node.hi);
            if (choice) {
                const double split = std::floor(choice->split + opt_.integrality_tol);
                if (split < node.lo[choice->var] || split >= node.hi[choice->var]) choice.reset();
            }
            if (!choice) choice = fractional;
            if (!choice) continue;
            const std::size_t v = choice->var;
            const double down_hi = std::floor(choice->split + opt_.integrality_tol);
            Node down{node.lo, node.hi, bound};
            down.hi[v] = std::min(down.hi[v], down_hi);
            Node up{std::move(node.lo), std::move(node.hi), bound};
            up.lo[v] = std::max(up.lo[v], down_hi + 1.0);
            // The branch explored first is pushed last.
            if (choice->up_first) {
                if (down.lo[v] <= down.hi[v]) stack.push_back(std::move(down));
                if (up.lo[v] <= up.hi[v]) stack.push_back(std::move(up));
            } else {
                if (up.lo[v] <= up.hi[v]) stack.push_back(std::move(up));
                if (down.lo[v] <= down.hi[v]) stack.push_back(std::move(down));
            }
        }

        double open_bound = -kInfinity;
        for (const auto& n : stack) open_bound = std::max(open_bound, n.parent_bound);

        if (!has_incumbent_) {
            res.status = limit_hit ? limit_status : MipStatus::infeasible;
            res.bound = limit_hit ? open_bound : -kInfinity;
            return res;
        }
        res.objective = incumbent_obj_;
        res.values = incumbent_;
        if (!limit_hit) {
            res.status = gap_used ? MipStatus::within_gap : MipStatus::optimal;
            res.bound = incumbent_obj_;
            return res;
        }
        res.bound = std::max(open_bound, incumbent_obj_);
        const double gap = (res.bound - incumbent_obj_) / std::max(1.0, std::abs(incumbent_obj_));
        res.status = gap <= opt_.fallback_gap ? MipStatus::within_gap : limit_status;
        return res;
    }

private:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    double tie_tol() const { return 1e-9 * std::max(1.0, std::abs(incumbent_obj_)); }

    double prune_tol() const {
        double tol = tie_tol();
        if (opt_.relative_gap > 0.0) tol = std::max(tol, opt_.relative_gap * std::abs(incumbent_obj_));
        if (opt_.integral_objective) tol = std::max(tol, 1.0 - 1e-6);
        return tol;
    }

    std::optional<BranchChoice> first_fractional(std::span<const double> x) const {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (!p_.integer[j]) continue;
            if (std::abs(x[j] - std::round(x[j])) > opt_.integrality_tol) return BranchChoice{j, x[j], true};
        }
        return std::nullopt;
    }

    void offer(std::span<const double> cand) {
        std::vector<double> x(cand.begin(), cand.end());
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (p_.integer[j]) x[j] = std::round(x[j]);
        }
        const auto obj = evaluate_candidate(p_, x, p_.lp.lower, p_.lp.upper, opt_.integrality_tol, opt_.feasibility_tol);
        if (!obj) return;
        if (!has_incumbent_ || *obj > incumbent_obj_ + tie_tol() ||
            (*obj >= incumbent_obj_ - tie_tol() && opt_.prefer && opt_.prefer(x, incumbent_))) {
            incumbent_ = std::move(x);
            incumbent_obj_ = *obj;
            has_incumbent_ = true;
        }
    }

    const MipProblem& p_;
    MipOptions opt_;
    std::chrono::steady_clock::time_point start_;
    std::vector<double> incumbent_;
    double incumbent_obj_ = -kInfinity;
    bool has_incumbent_ = false;
};

inline MipResult solve_mip(const MipProblem& problem, MipOptions options = {}) {
    if (problem.integer.size() != problem.lp.num_variables()) {
        throw std::invalid_argument("integrality flags must match the number of variables");
    }
    BranchAndBound bb(problem, std::move(options));
    return bb.solve();
}

} // namespace fedzero::solver
