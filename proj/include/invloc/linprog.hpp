#ifndef INVLOC_LINPROG_HPP
#define INVLOC_LINPROG_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "invloc/core.hpp"

namespace invloc {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LpRow {
    std::vector<double> coeffs;
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;
};

/// min cost.x  s.t.  rows, lower <= x <= upper (entries may be +-infinity).
struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<double> cost;
    std::vector<LpRow> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    static LinearProgram make(std::size_t n) {
        LinearProgram lp;
        lp.num_vars = n;
        lp.cost.assign(n, 0.0);
        lp.lower.assign(n, 0.0);
        lp.upper.assign(n, std::numeric_limits<double>::infinity());
        return lp;
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
};

/// Plain-text fixed layout: cost row first, then one line per constraint row.
inline void dump_lp(const LinearProgram& lp, std::ostream& out) {
    out << "min";
    for (double c : lp.cost) out << ' ' << c;
    out << '\n';
    for (const auto& row : lp.rows) {
        for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
            if (j) out << ' ';
            out << row.coeffs[j];
        }
        const char* rel = row.rel == Relation::LessEqual ? "<=" :
                          row.rel == Relation::Equal ? "=" : ">=";
        out << ' ' << rel << ' ' << row.rhs << '\n';
    }
}

/// Optional debug sink: when set, every solve_lp call dumps its input here.
inline std::ostream* lp_dump_sink = nullptr;

namespace lpdetail {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr std::size_t kMaxPivots = 1000000;

enum class VarStatus { Basic, AtLower, AtUpper, Free };

class Simplex {
public:
    explicit Simplex(const LinearProgram& lp) : m_(lp.rows.size()) {
        if (lp.cost.size() != lp.num_vars || lp.lower.size() != lp.num_vars ||
            lp.upper.size() != lp.num_vars)
            throw std::invalid_argument("solve_lp: vector lengths must match num_vars");
        for (const auto& row : lp.rows)
            if (row.coeffs.size() != lp.num_vars)
                throw std::invalid_argument("solve_lp: row length must match num_vars");
        for (std::size_t j = 0; j < lp.num_vars; ++j)
            if (lp.lower[j] > lp.upper[j])
                throw std::invalid_argument("solve_lp: lower bound above upper bound");

        const double inf = std::numeric_limits<double>::infinity();
        // Columns: structural vars, then one slack per row, then artificials.
        ncols_ = lp.num_vars + m_;
        lb_ = lp.lower;
        ub_ = lp.upper;
        lb_.resize(ncols_);
        ub_.resize(ncols_);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t j = lp.num_vars + i;
            switch (lp.rows[i].rel) {
                case Relation::LessEqual: lb_[j] = 0.0; ub_[j] = inf; break;
                case Relation::GreaterEqual: lb_[j] = -inf; ub_[j] = 0.0; break;
                case Relation::Equal: lb_[j] = 0.0; ub_[j] = 0.0; break;
            }
        }

        tab_.assign(m_, std::vector<double>(ncols_, 0.0));
        rhs0_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            // Equilibrate: scale each row to unit max coefficient so the
            // feasibility tolerance means the same thing on every row.
            double scale = 0.0;
            for (double a : lp.rows[i].coeffs) scale = std::max(scale, std::abs(a));
            const double inv = scale > 0.0 ? 1.0 / scale : 1.0;
            for (std::size_t j = 0; j < lp.num_vars; ++j)
                tab_[i][j] = lp.rows[i].coeffs[j] * inv;
            tab_[i][lp.num_vars + i] = 1.0;
            rhs0_[i] = lp.rows[i].rhs * inv;
        }

        status_.assign(ncols_, VarStatus::AtLower);
        val_.assign(ncols_, 0.0);
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (std::isfinite(lb_[j])) {
                status_[j] = VarStatus::AtLower;
                val_[j] = lb_[j];
            } else if (std::isfinite(ub_[j])) {
                status_[j] = VarStatus::AtUpper;
                val_[j] = ub_[j];
            } else {
                status_[j] = VarStatus::Free;
                val_[j] = 0.0;
            }
        }

        // Pick the basis: slack when its row residual fits its bounds,
        // otherwise an artificial column absorbing the leftover.
        basis_.resize(m_);
        xb_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t sj = lp.num_vars + i;
            double res = rhs0_[i];
            for (std::size_t j = 0; j < lp.num_vars; ++j) res -= tab_[i][j] * val_[j];
            if (res >= lb_[sj] - kFeasTol && res <= ub_[sj] + kFeasTol) {
                basis_[i] = sj;
                xb_[i] = res;
                status_[sj] = VarStatus::Basic;
            } else {
                // Slack pinned at its nearest bound; artificial covers the rest.
                const double sv = res < lb_[sj] ? lb_[sj] : ub_[sj];
                status_[sj] = res < lb_[sj] ? VarStatus::AtLower : VarStatus::AtUpper;
                val_[sj] = sv;
                const double rem = res - sv;
                const std::size_t aj = add_artificial(i, rem >= 0.0 ? 1.0 : -1.0);
                // Keep the basis columns an identity inside the tableau: a
                // negative artificial means the whole row must be negated.
                if (rem < 0.0)
                    for (std::size_t j = 0; j < ncols_; ++j) tab_[i][j] = -tab_[i][j];
                basis_[i] = aj;
                xb_[i] = std::abs(rem);
                status_[aj] = VarStatus::Basic;
            }
        }
        num_structural_ = lp.num_vars;
    }

    LpSolution run(const std::vector<double>& cost) {
        LpSolution sol;
        if (num_artificials_ > 0) {
            std::vector<double> phase1(ncols_, 0.0);
            for (std::size_t j = ncols_ - num_artificials_; j < ncols_; ++j) phase1[j] = 1.0;
            set_costs(phase1);
            if (!optimize()) throw SolverFailureError("solve_lp: pivot cap hit in phase 1");
            if (current_objective() > kFeasTol) {
                sol.status = LpStatus::Infeasible;
                return sol;
            }
            // Artificials stay pinned at zero for phase 2.
            for (std::size_t j = ncols_ - num_artificials_; j < ncols_; ++j) {
                lb_[j] = 0.0;
                ub_[j] = 0.0;
                if (status_[j] != VarStatus::Basic) {
                    status_[j] = VarStatus::AtLower;
                    val_[j] = 0.0;
                }
            }
        }
        std::vector<double> phase2(ncols_, 0.0);
        for (std::size_t j = 0; j < num_structural_; ++j) phase2[j] = cost[j];
        set_costs(phase2);
        if (!optimize()) throw SolverFailureError("solve_lp: pivot cap hit in phase 2");
        if (unbounded_) {
            sol.status = LpStatus::Unbounded;
            return sol;
        }
        sol.status = LpStatus::Optimal;
        sol.values.resize(num_structural_);
        for (std::size_t j = 0; j < num_structural_; ++j) sol.values[j] = value_of(j);
        sol.objective = 0.0;
        for (std::size_t j = 0; j < num_structural_; ++j) sol.objective += cost[j] * sol.values[j];
        return sol;
    }

private:
    std::size_t add_artificial(std::size_t row, double sign) {
        const std::size_t j = ncols_;
        ++ncols_;
        ++num_artificials_;
        lb_.push_back(0.0);
        ub_.push_back(std::numeric_limits<double>::infinity());
        val_.push_back(0.0);
        status_.push_back(VarStatus::AtLower);
        for (std::size_t i = 0; i < m_; ++i) tab_[i].push_back(i == row ? sign : 0.0);
        return j;
    }

    double value_of(std::size_t j) const {
        if (status_[j] == VarStatus::Basic) {
            for (std::size_t i = 0; i < m_; ++i)
                if (basis_[i] == j) return xb_[i];
        }
        return val_[j];
    }

    void set_costs(const std::vector<double>& c) {
        cost_ = c;
        // Reduced costs d = c - c_B^T * tab.
        d_ = c;
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < ncols_; ++j) d_[j] -= cb * tab_[i][j];
        }
        unbounded_ = false;
    }

    double current_objective() const {
        double z = 0.0;
        for (std::size_t j = 0; j < ncols_; ++j) z += cost_[j] * value_of(j);
        return z;
    }

    // Entering column. Dantzig pricing (largest dual violation) by default;
    // Bland's smallest-index rule when anti-cycling is needed.
    bool pick_entering(std::size_t& q, int& dir, bool bland) const {
        double best = 0.0;
        bool found = false;
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (status_[j] == VarStatus::Basic) continue;
            if (ub_[j] - lb_[j] <= 0.0) continue;  // fixed
            double viol = 0.0;
            int d = 0;
            switch (status_[j]) {
                case VarStatus::AtLower:
                    if (d_[j] < -kDualTol) { viol = -d_[j]; d = +1; }
                    break;
                case VarStatus::AtUpper:
                    if (d_[j] > kDualTol) { viol = d_[j]; d = -1; }
                    break;
                case VarStatus::Free:
                    if (std::abs(d_[j]) > kDualTol) { viol = std::abs(d_[j]); d = d_[j] < 0.0 ? +1 : -1; }
                    break;
                default: break;
            }
            if (d == 0) continue;
            if (bland) { q = j; dir = d; return true; }
            if (viol > best) {
                best = viol;
                q = j;
                dir = d;
                found = true;
            }
        }
        return found;
    }

    bool optimize() {
        // Dantzig pricing until a long degenerate streak hints at cycling,
        // then Bland's rule until progress resumes.
        std::size_t degenerate_streak = 0;
        const std::size_t bland_trigger = 4 * (m_ + ncols_);
        for (; pivots_ < lpdetail::kMaxPivots; ++pivots_) {
            std::size_t q = 0;
            int dir = 0;
            if (!pick_entering(q, dir, degenerate_streak > bland_trigger))
                return true;  // optimal

            // Ratio test: x_q moves by dir * t, basic vars by -dir * t * tab[i][q].
            // Bland tie-break on the leaving variable index (the flip counts as q).
            double t_max = std::numeric_limits<double>::infinity();
            std::size_t block_row = m_;  // m_ means the entering var's own bound flip
            std::size_t block_var = std::numeric_limits<std::size_t>::max();
            bool block_at_lower = false;
            if (status_[q] != VarStatus::Free) {
                const double span = ub_[q] - lb_[q];
                if (std::isfinite(span)) {
                    t_max = span;
                    block_var = q;
                }
            }
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = dir * tab_[i][q];
                if (std::abs(a) < kPivotTol) continue;
                double limit;
                bool at_lower;
                if (a > 0.0) {  // basic value decreases toward its lower bound
                    if (!std::isfinite(lb_[basis_[i]])) continue;
                    limit = (xb_[i] - lb_[basis_[i]]) / a;
                    at_lower = true;
                } else {  // basic value increases toward its upper bound
                    if (!std::isfinite(ub_[basis_[i]])) continue;
                    limit = (ub_[basis_[i]] - xb_[i]) / (-a);
                    at_lower = false;
                }
                if (limit < 0.0) limit = 0.0;
                const bool better = limit < t_max - 1e-12 ||
                                    (limit <= t_max + 1e-12 && basis_[i] < block_var);
                if (better) {
                    t_max = limit;
                    block_row = i;
                    block_var = basis_[i];
                    block_at_lower = at_lower;
                }
            }

            if (!std::isfinite(t_max)) {
                unbounded_ = true;
                return true;
            }
            if (t_max > 1e-12)
                degenerate_streak = 0;
            else
                ++degenerate_streak;

            if (block_row == m_) {
                // Bound flip: entering variable runs to its opposite bound.
                for (std::size_t i = 0; i < m_; ++i) xb_[i] -= dir * tab_[i][q] * t_max;
                val_[q] += dir * t_max;
                status_[q] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
                continue;
            }

            // Pivot: q enters in block_row, basis_[block_row] leaves at the bound it hit.
            const std::size_t leave = basis_[block_row];
            const double enter_val = value_of(q) + dir * t_max;
            for (std::size_t i = 0; i < m_; ++i)
                if (i != block_row) xb_[i] -= dir * tab_[i][q] * t_max;
            status_[leave] = block_at_lower ? VarStatus::AtLower : VarStatus::AtUpper;
            val_[leave] = block_at_lower ? lb_[leave] : ub_[leave];

            const double pivot = tab_[block_row][q];
            auto& prow = tab_[block_row];
            for (std::size_t j = 0; j < ncols_; ++j) prow[j] /= pivot;
            for (std::size_t i = 0; i < m_; ++i) {
                if (i == block_row) continue;
                const double f = tab_[i][q];
                if (f == 0.0) continue;
                auto& row = tab_[i];
                for (std::size_t j = 0; j < ncols_; ++j) row[j] -= f * prow[j];
            }
            const double df = d_[q];
            if (df != 0.0)
                for (std::size_t j = 0; j < ncols_; ++j) d_[j] -= df * prow[j];

            basis_[block_row] = q;
            xb_[block_row] = enter_val;
            status_[q] = VarStatus::Basic;
        }
        return false;  // pivot cap
    }

    std::size_t m_;
    std::size_t ncols_ = 0;
    std::size_t num_structural_ = 0;
    std::size_t num_artificials_ = 0;
    std::size_t pivots_ = 0;
    bool unbounded_ = false;
    std::vector<std::vector<double>> tab_;
    std::vector<double> rhs0_;
    std::vector<double> lb_, ub_, val_, cost_, d_;
    std::vector<std::size_t> basis_;
    std::vector<double> xb_;
    std::vector<VarStatus> status_;
};

}  // namespace lpdetail

inline LpSolution solve_lp(const LinearProgram& lp) {
    if (lp_dump_sink) dump_lp(lp, *lp_dump_sink);
    lpdetail::Simplex simplex(lp);
    return simplex.run(lp.cost);
}

}  // namespace invloc

#endif  // INVLOC_LINPROG_HPP
