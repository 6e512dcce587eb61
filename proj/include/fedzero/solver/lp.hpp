#pragma once

/// @file lp.hpp
/// @brief Dense bounded-variable primal simplex for small linear programs.
///
/// Sized for the per-domain selection programs (tens of rows, hundreds of
/// columns). Every column carries explicit bounds; rows become equalities
/// through bounded slack columns and a phase 1 over artificial columns
/// restores feasibility of the starting point.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fedzero::solver {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { less_equal, greater_equal, equal };

struct LinearTerm {
    std::size_t var;
    double coef;
};

struct LinearRow {
    std::vector<LinearTerm> terms;
    RowSense sense = RowSense::less_equal;
    double rhs = 0.0;
};

/// maximize objective·x  s.t.  rows,  lower <= x <= upper.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<LinearRow> rows;
    std::vector<std::string> names;

    std::size_t add_variable(double lo, double hi, double obj, std::string name = {}) {
        objective.push_back(obj);
        lower.push_back(lo);
        upper.push_back(hi);
        names.push_back(std::move(name));
        return objective.size() - 1;
    }

    void add_row(std::vector<LinearTerm> terms, RowSense sense, double rhs) {
        rows.push_back({std::move(terms), sense, rhs});
    }

    [[nodiscard]] std::size_t num_variables() const noexcept { return objective.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;
    std::vector<double> values;
    std::size_t iterations = 0;
};

struct LpOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    std::size_t max_iterations = 100000;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t degenerate_switch = 40;
};

namespace detail {

class BoundedSimplex {
public:
    BoundedSimplex(const LinearProgram& lp, std::span<const double> lower, std::span<const double> upper,
                   const LpOptions& opts)
        : opts_(opts)
        , m_(lp.rows.size())
        , n_(lp.num_variables()) {
        // Starting point: structurals at a finite bound, slacks absorb the residual.
        std::vector<double> start(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            if (lower[j] > upper[j] + opts_.feasibility_tol) {
                infeasible_bounds_ = true;
            }
            if (std::isfinite(lower[j])) {
                start[j] = lower[j];
            } else if (std::isfinite(upper[j])) {
                start[j] = upper[j];
            } else {
                throw std::invalid_argument("free variables are not supported");
            }
        }

        std::vector<double> residual(m_);
        std::vector<bool> needs_art(m_, false);
        std::size_t arts = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            double act = 0.0;
            for (const auto& t : lp.rows[i].terms) act += t.coef * start[t.var];
            residual[i] = lp.rows[i].rhs - act;
            const auto [slo, shi] = slack_bounds(lp.rows[i].sense);
            if (residual[i] < slo - opts_.feasibility_tol || residual[i] > shi + opts_.feasibility_tol) {
                needs_art[i] = true;
                ++arts;
            }
        }

        cols_ = n_ + m_ + arts;
        tab_.assign(m_ * cols_, 0.0);
        lo_.resize(cols_);
        hi_.resize(cols_);
        value_.assign(cols_, 0.0);
        status_.assign(cols_, Status::at_lower);
        basis_.resize(m_);
        first_art_ = n_ + m_;

        for (std::size_t j = 0; j < n_; ++j) {
            lo_[j] = lower[j];
            hi_[j] = upper[j];
            value_[j] = start[j];
            status_[j] = std::isfinite(lower[j]) ? Status::at_lower : Status::at_upper;
        }

        std::size_t art = first_art_;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t slack = n_ + i;
            const auto [slo, shi] = slack_bounds(lp.rows[i].sense);
            lo_[slack] = slo;
            hi_[slack] = shi;
            double sign = 1.0;
            if (!needs_art[i]) {
                basis_[i] = slack;
                status_[slack] = Status::basic;
                value_[slack] = std::clamp(residual[i], slo, shi);
            } else {
                const bool below = residual[i] < slo;
                const double bound = below ? slo : shi;
                status_[slack] = below ? Status::at_lower : Status::at_upper;
                value_[slack] = bound;
                sign = residual[i] - bound > 0.0 ? 1.0 : -1.0;
                lo_[art] = 0.0;
                hi_[art] = kInfinity;
                value_[art] = std::abs(residual[i] - bound);
                status_[art] = Status::basic;
                basis_[i] = art;
                at(i, art) = 1.0;
                ++art;
            }
            for (const auto& t : lp.rows[i].terms) at(i, t.var) += sign * t.coef;
            at(i, slack) = sign;
        }
        objective_.assign(lp.objective.begin(), lp.objective.end());
    }

    LpResult run() {
        LpResult result;
        if (infeasible_bounds_) {
            result.status = LpStatus::infeasible;
            return result;
        }
        if (first_art_ < cols_) {
            std::vector<double> phase1(cols_, 0.0);
            for (std::size_t j = first_art_; j < cols_; ++j) phase1[j] = -1.0;
            const LpStatus s = optimize(phase1, result.iterations);
            if (s == LpStatus::iteration_limit) {
                result.status = s;
                return result;
            }
            double infeas = 0.0;
            for (std::size_t j = first_art_; j < cols_; ++j) infeas += value_[j];
            if (infeas > opts_.feasibility_tol * 10.0) {
                result.status = LpStatus::infeasible;
                return result;
            }
            for (std::size_t j = first_art_; j < cols_; ++j) {
                hi_[j] = 0.0;
                if (status_[j] != Status::basic) {
                    value_[j] = 0.0;
                    status_[j] = Status::at_lower;
                }
            }
        }
        std::vector<double> phase2(cols_, 0.0);
        std::copy(objective_.begin(), objective_.end(), phase2.begin());
        result.status = optimize(phase2, result.iterations);
        result.values.assign(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(n_));
        for (std::size_t j = 0; j < n_; ++j) {
            result.values[j] = std::clamp(result.values[j], lo_[j], hi_[j]);
            result.objective += objective_[j] * result.values[j];
        }
        return result;
    }

private:
    enum class Status : unsigned char { basic, at_lower, at_upper };

    static std::pair<double, double> slack_bounds(RowSense s) {
        switch (s) {
        case RowSense::less_equal: return {0.0, kInfinity};
        case RowSense::greater_equal: return {-kInfinity, 0.0};
        case RowSense::equal: return {0.0, 0.0};
        }
        return {0.0, kInfinity};
    }

    double& at(std::size_t r, std::size_t c) { return tab_[r * cols_ + c]; }

    LpStatus optimize(const std::vector<double>& cost, std::size_t& iterations) {
        // Reduced costs d_j = c_j - c_B^T T_j.
        reduced_.assign(cost.begin(), cost.end());
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = cost[basis_[r]];
            if (cb == 0.0) continue;
            const double* row = &tab_[r * cols_];
            for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= cb * row[j];
        }
        for (std::size_t r = 0; r < m_; ++r) reduced_[basis_[r]] = 0.0;

        std::size_t degenerate = 0;
        bool bland = false;
        std::vector<double> column(m_);
        while (true) {
            if (iterations >= opts_.max_iterations) return LpStatus::iteration_limit;

            std::size_t entering = cols_;
            double best = 0.0;
            double dir = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (status_[j] == Status::basic || hi_[j] - lo_[j] <= 0.0) continue;
                const double d = reduced_[j];
                double score = 0.0;
                double jdir = 0.0;
                if (status_[j] == Status::at_lower && d > opts_.optimality_tol) {
                    score = d;
                    jdir = 1.0;
                } else if (status_[j] == Status::at_upper && d < -opts_.optimality_tol) {
                    score = -d;
                    jdir = -1.0;
                }
                if (jdir == 0.0) continue;
                if (bland) {
                    entering = j;
                    dir = jdir;
                    break;
                }
                if (score > best) {
                    best = score;
                    entering = j;
                    dir = jdir;
                }
            }
            if (entering == cols_) return LpStatus::optimal;
            ++iterations;

            // Ratio test. Basic variable in row r moves by -T[r][q] * dir * theta.
            double theta = hi_[entering] - lo_[entering];
            std::size_t leave = m_;
            double leave_pivot = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = tab_[r * cols_ + entering] * dir;
                column[r] = a;
                if (std::abs(a) <= opts_.pivot_tol) continue;
                const std::size_t b = basis_[r];
                double limit;
                if (a > 0.0) {
                    if (!std::isfinite(lo_[b])) continue;
                    limit = (value_[b] - lo_[b]) / a;
                } else {
                    if (!std::isfinite(hi_[b])) continue;
                    limit = (hi_[b] - value_[b]) / -a;
                }
                limit = std::max(limit, 0.0);
                if (limit < theta - 1e-12 ||
                    (leave < m_ && limit <= theta + 1e-12 &&
                     (bland ? basis_[r] < basis_[leave] : std::abs(a) > std::abs(leave_pivot)))) {
                    theta = limit;
                    leave = r;
                    leave_pivot = a;
                }
            }
            if (!std::isfinite(theta)) return LpStatus::unbounded;

            if (theta > 1e-11) {
                degenerate = 0;
                bland = false;
            } else if (++degenerate > opts_.degenerate_switch) {
                bland = true;
            }

            for (std::size_t r = 0; r < m_; ++r) {
                if (column[r] != 0.0) value_[basis_[r]] -= column[r] * theta;
            }
            value_[entering] += dir * theta;

            if (leave == m_) {
                // Bound flip.
                if (dir > 0.0) {
                    status_[entering] = Status::at_upper;
                    value_[entering] = hi_[entering];
                } else {
                    status_[entering] = Status::at_lower;
                    value_[entering] = lo_[entering];
                }
                continue;
            }

            const std::size_t out = basis_[leave];
            if (leave_pivot > 0.0) {
                status_[out] = Status::at_lower;
                value_[out] = lo_[out];
            } else {
                status_[out] = Status::at_upper;
                value_[out] = hi_[out];
            }
            pivot(leave, entering);
            basis_[leave] = entering;
            status_[entering] = Status::basic;
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        double* prow = &tab_[row * cols_];
        const double inv = 1.0 / prow[col];
        for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
        prow[col] = 1.0;
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == row) continue;
            double* rr = &tab_[r * cols_];
            const double f = rr[col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) rr[j] -= f * prow[j];
            rr[col] = 0.0;
        }
        const double f = reduced_[col];
        if (f != 0.0) {
            for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= f * prow[j];
            reduced_[col] = 0.0;
        }
    }

    LpOptions opts_;
    std::size_t m_;
    std::size_t n_;
    std::size_t cols_ = 0;
    std::size_t first_art_ = 0;
    bool infeasible_bounds_ = false;
    std::vector<double> tab_;
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<double> value_;
    std::vector<double> reduced_;
    std::vector<double> objective_;
    std::vector<std::size_t> basis_;
    std::vector<Status> status_;
};

} // namespace detail

inline LpResult solve_lp(const LinearProgram& lp, std::span<const double> lower, std::span<const double> upper,
                         const LpOptions& opts = {}) {
    if (lower.size() != lp.num_variables() || upper.size() != lp.num_variables()) {
        throw std::invalid_argument("bound vectors must match the number of variables");
    }
    detail::BoundedSimplex simplex(lp, lower, upper, opts);
    return simplex.run();
}

inline LpResult solve_lp(const LinearProgram& lp, const LpOptions& opts = {}) {
    return solve_lp(lp, lp.lower, lp.upper, opts);
}

/// Writes the program in CPLEX LP text format (for debugging with external solvers).
inline void write_lp_format(std::ostream& os, const LinearProgram& lp, const std::vector<bool>& integer = {}) {
    auto name = [&](std::size_t j) {
        return j < lp.names.size() && !lp.names[j].empty() ? lp.names[j] : "x" + std::to_string(j);
    };
    auto term = [&](double coef, std::size_t j, bool first) {
        if (coef < 0.0) {
            os << " - ";
        } else if (!first) {
            os << " + ";
        }
        os << std::abs(coef) << ' ' << name(j);
    };
    os << "Maximize\n obj:";
    bool first = true;
    for (std::size_t j = 0; j < lp.num_variables(); ++j) {
        if (lp.objective[j] == 0.0) continue;
        os << ' ';
        term(lp.objective[j], j, first);
        first = false;
    }
    if (first) os << " 0 " << name(0);
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        os << " c" << i << ':';
        bool f = true;
        for (const auto& t : lp.rows[i].terms) {
            os << ' ';
            term(t.coef, t.var, f);
            f = false;
        }
        switch (lp.rows[i].sense) {
        case RowSense::less_equal: os << " <= "; break;
        case RowSense::greater_equal: os << " >= "; break;
        case RowSense::equal: os << " = "; break;
        }
        os << lp.rows[i].rhs << '\n';
    }
    os << "Bounds\n";
    for (std::size_t j = 0; j < lp.num_variables(); ++j) {
        os << ' ' << lp.lower[j] << " <= " << name(j) << " <= ";
        if (std::isfinite(lp.upper[j])) {
            os << lp.upper[j];
        } else {
            os << "+inf";
        }
        os << '\n';
    }
    if (!integer.empty()) {
        os << "General\n";
        for (std::size_t j = 0; j < integer.size(); ++j) {
            if (integer[j]) os << ' ' << name(j) << '\n';
        }
    }
    os << "End\n";
}

} // namespace fedzero::solver
