#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "henopt/errors.hpp"
#include "henopt/milp.hpp"

namespace henopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-8;

enum class ColState : unsigned char { basic, at_lower, at_upper, free_zero };

// Bounded-variable two-phase revised simplex with an explicit basis inverse.
// Columns: structural variables, one slack per row, one artificial per row.
class Simplex {
public:
    Simplex(const MilpModel& model,
            const std::vector<std::pair<int, std::pair<double, double>>>& overrides) {
        m_ = model.constraint_count();
        n_struct_ = model.variable_count();
        n_total_ = n_struct_ + 2 * m_;

        cols_.resize(n_total_);
        lower_.assign(n_total_, 0.0);
        upper_.assign(n_total_, 0.0);
        cost_.assign(n_total_, 0.0);
        b_.assign(m_, 0.0);

        for (int j = 0; j < n_struct_; ++j) {
            lower_[j] = model.variables()[j].lower;
            upper_[j] = model.variables()[j].upper;
        }
        for (const auto& [idx, bounds] : overrides) {
            lower_[idx] = bounds.first;
            upper_[idx] = bounds.second;
        }
        for (const auto& [idx, coeff] : model.objective_terms()) cost_[idx] = coeff;
        obj_constant_ = model.objective_constant();

        for (int r = 0; r < m_; ++r) {
            const auto& c = model.constraints()[r];
            for (const auto& [var, coeff] : c.terms) cols_[var].emplace_back(r, coeff);
            b_[r] = c.rhs;
            const int slack = n_struct_ + r;
            cols_[slack].emplace_back(r, 1.0);
            switch (c.rel) {
                case Relation::less_equal:
                    lower_[slack] = 0.0;
                    upper_[slack] = kInf;
                    break;
                case Relation::greater_equal:
                    lower_[slack] = -kInf;
                    upper_[slack] = 0.0;
                    break;
                case Relation::equal:
                    lower_[slack] = 0.0;
                    upper_[slack] = 0.0;
                    break;
            }
            const int art = n_struct_ + m_ + r;
            cols_[art].emplace_back(r, 1.0);
        }
    }

    LpResult run() {
        if (m_ == 0) return solve_unconstrained();
        for (int j = 0; j < n_struct_ + m_; ++j)
            if (lower_[j] > upper_[j] + 1e-12) return {LpResult::Status::infeasible, {}, 0.0};

        init_nonbasic_positions();

        // Start from the artificial basis holding the initial residuals.
        std::vector<double> residual = b_;
        for (int j = 0; j < n_struct_ + m_; ++j) {
            const double xj = nonbasic_value(j);
            if (xj == 0.0) continue;
            for (const auto& [r, a] : cols_[j]) residual[r] -= a * xj;
        }
        basis_.resize(m_);
        phase1_cost_.assign(n_total_, 0.0);
        for (int r = 0; r < m_; ++r) {
            const int art = n_struct_ + m_ + r;
            basis_[r] = art;
            state_[art] = ColState::basic;
            if (residual[r] >= 0.0) {
                lower_[art] = 0.0;
                upper_[art] = kInf;
                phase1_cost_[art] = 1.0;
            } else {
                lower_[art] = -kInf;
                upper_[art] = 0.0;
                phase1_cost_[art] = -1.0;
            }
        }
        binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) binv_[r * m_ + r] = 1.0;

        // Phase I: drive the artificial infeasibility to zero.
        if (!iterate(phase1_cost_, /*phase1=*/true)) return {LpResult::Status::infeasible, {}, 0.0};
        if (phase_objective(phase1_cost_) > 1e-7)
            return {LpResult::Status::infeasible, {}, 0.0};

        // Pin artificials and optimize the true objective.
        for (int r = 0; r < m_; ++r) {
            const int art = n_struct_ + m_ + r;
            lower_[art] = 0.0;
            upper_[art] = 0.0;
            if (state_[art] != ColState::basic) state_[art] = ColState::at_lower;
        }
        if (!iterate(cost_, /*phase1=*/false)) return {LpResult::Status::unbounded, {}, 0.0};

        LpResult res;
        res.status = LpResult::Status::optimal;
        res.values = extract_values();
        res.objective = obj_constant_;
        for (int j = 0; j < n_struct_; ++j) res.objective += cost_[j] * res.values[j];
        return res;
    }

private:
    LpResult solve_unconstrained() {
        LpResult res;
        res.values.assign(n_struct_, 0.0);
        res.objective = obj_constant_;
        for (int j = 0; j < n_struct_; ++j) {
            if (lower_[j] > upper_[j]) return {LpResult::Status::infeasible, {}, 0.0};
            double v;
            if (cost_[j] > 0.0)
                v = lower_[j];
            else if (cost_[j] < 0.0)
                v = upper_[j];
            else
                v = std::clamp(0.0, lower_[j], upper_[j]);
            if (!std::isfinite(v) && cost_[j] != 0.0) return {LpResult::Status::unbounded, {}, 0.0};
            if (!std::isfinite(v)) v = std::clamp(0.0, lower_[j], upper_[j]);
            res.values[j] = v;
            res.objective += cost_[j] * v;
        }
        res.status = LpResult::Status::optimal;
        return res;
    }

    void init_nonbasic_positions() {
        state_.assign(n_total_, ColState::at_lower);
        for (int j = 0; j < n_total_; ++j) {
            if (std::isfinite(lower_[j]))
                state_[j] = ColState::at_lower;
            else if (std::isfinite(upper_[j]))
                state_[j] = ColState::at_upper;
            else
                state_[j] = ColState::free_zero;
        }
    }

    double nonbasic_value(int j) const {
        switch (state_[j]) {
            case ColState::at_lower: return lower_[j];
            case ColState::at_upper: return upper_[j];
            default: return 0.0;
        }
    }

    std::vector<double> basic_values() const {
        std::vector<double> rhs = b_;
        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] == ColState::basic) continue;
            const double xj = nonbasic_value(j);
            if (xj == 0.0) continue;
            for (const auto& [r, a] : cols_[j]) rhs[r] -= a * xj;
        }
        std::vector<double> xb(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += binv_[r * m_ + k] * rhs[k];
            xb[r] = s;
        }
        return xb;
    }

    std::vector<double> extract_values() const {
        std::vector<double> xb = basic_values();
        std::vector<double> x(n_struct_);
        for (int j = 0; j < n_struct_; ++j)
            x[j] = state_[j] == ColState::basic ? 0.0 : nonbasic_value(j);
        for (int r = 0; r < m_; ++r)
            if (basis_[r] < n_struct_) x[basis_[r]] = xb[r];
        for (int j = 0; j < n_struct_; ++j)
            if (std::isfinite(lower_[j]) || std::isfinite(upper_[j]))
                x[j] = std::clamp(x[j], std::isfinite(lower_[j]) ? lower_[j] : x[j],
                                  std::isfinite(upper_[j]) ? upper_[j] : x[j]);
        return x;
    }

    double phase_objective(const std::vector<double>& c) const {
        std::vector<double> xb = basic_values();
        double obj = 0.0;
        for (int r = 0; r < m_; ++r) obj += c[basis_[r]] * xb[r];
        for (int j = 0; j < n_total_; ++j)
            if (state_[j] != ColState::basic && c[j] != 0.0) obj += c[j] * nonbasic_value(j);
        return obj;
    }

    void refactorize() {
        // Gauss-Jordan inverse of the basis matrix.
        std::vector<double> mat(static_cast<size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r)
            for (const auto& [row, a] : cols_[basis_[r]]) mat[row * m_ + r] = a;
        std::vector<double> inv(static_cast<size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) inv[r * m_ + r] = 1.0;
        for (int col = 0; col < m_; ++col) {
            int piv = col;
            for (int r = col + 1; r < m_; ++r)
                if (std::fabs(mat[r * m_ + col]) > std::fabs(mat[piv * m_ + col])) piv = r;
            if (std::fabs(mat[piv * m_ + col]) < 1e-12)
                throw solver_error("singular basis during refactorization");
            if (piv != col) {
                for (int k = 0; k < m_; ++k) {
                    std::swap(mat[piv * m_ + k], mat[col * m_ + k]);
                    std::swap(inv[piv * m_ + k], inv[col * m_ + k]);
                }
            }
            const double d = mat[col * m_ + col];
            for (int k = 0; k < m_; ++k) {
                mat[col * m_ + k] /= d;
                inv[col * m_ + k] /= d;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                const double f = mat[r * m_ + col];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    mat[r * m_ + k] -= f * mat[col * m_ + k];
                    inv[r * m_ + k] -= f * inv[col * m_ + k];
                }
            }
        }
        binv_ = std::move(inv);
    }

    // Returns false on infeasible direction handling: phase 1 never returns
    // false; phase 2 returns false when unbounded.
    bool iterate(const std::vector<double>& c, bool phase1) {
        const int max_iters = 50000 + 200 * m_;
        int stall = 0;
        double last_obj = phase_objective(c);
        int since_refactor = 0;
        for (int iter = 0; iter < max_iters; ++iter) {
            if (++since_refactor >= 120) {
                refactorize();
                since_refactor = 0;
            }
            // y = c_B' * Binv
            std::vector<double> y(m_, 0.0);
            for (int r = 0; r < m_; ++r) {
                const double cb = c[basis_[r]];
                if (cb == 0.0) continue;
                for (int k = 0; k < m_; ++k) y[k] += cb * binv_[r * m_ + k];
            }
            const bool bland = stall > 2 * m_ + 50;
            int entering = -1;
            int direction = 0;
            double best_score = kCostTol;
            for (int j = 0; j < n_total_; ++j) {
                if (state_[j] == ColState::basic) continue;
                if (lower_[j] == upper_[j] && state_[j] != ColState::free_zero) continue;
                double dj = c[j];
                for (const auto& [r, a] : cols_[j]) dj -= y[r] * a;
                int dir = 0;
                if (state_[j] == ColState::at_lower && dj < -kCostTol)
                    dir = +1;
                else if (state_[j] == ColState::at_upper && dj > kCostTol)
                    dir = -1;
                else if (state_[j] == ColState::free_zero && std::fabs(dj) > kCostTol)
                    dir = dj > 0 ? -1 : +1;
                if (dir == 0) continue;
                if (bland) {
                    entering = j;
                    direction = dir;
                    break;
                }
                if (std::fabs(dj) > best_score) {
                    best_score = std::fabs(dj);
                    entering = j;
                    direction = dir;
                }
            }
            if (entering < 0) return true;  // optimal for this phase

            // w = Binv * a_entering
            std::vector<double> w(m_, 0.0);
            for (const auto& [r, a] : cols_[entering])
                for (int k = 0; k < m_; ++k) w[k] += binv_[k * m_ + r] * a;

            std::vector<double> xb = basic_values();

            // Ratio test: how far can x_entering move in `direction`.
            double t_max = kInf;
            if (std::isfinite(upper_[entering]) && std::isfinite(lower_[entering]))
                t_max = upper_[entering] - lower_[entering];
            int leave_pos = -1;
            double leave_pivot = 0.0;
            for (int r = 0; r < m_; ++r) {
                const double delta = -direction * w[r];  // dx_B[r] per unit step
                if (std::fabs(delta) < kPivotTol) continue;
                const int bj = basis_[r];
                double limit = kInf;
                if (delta < 0.0 && std::isfinite(lower_[bj]))
                    limit = (lower_[bj] - xb[r]) / delta;
                else if (delta > 0.0 && std::isfinite(upper_[bj]))
                    limit = (upper_[bj] - xb[r]) / delta;
                if (limit < -kFeasTol) limit = 0.0;
                limit = std::max(limit, 0.0);
                if (limit < t_max - 1e-12 ||
                    (limit < t_max + 1e-12 && std::fabs(delta) > std::fabs(leave_pivot))) {
                    if (limit <= t_max) {
                        t_max = limit;
                        leave_pos = r;
                        leave_pivot = delta;
                    }
                }
            }

            if (!std::isfinite(t_max)) {
                if (phase1) throw solver_error("phase-1 unbounded: internal error");
                return false;  // unbounded
            }

            if (leave_pos < 0) {
                // Bound flip: entering moves across to its other bound.
                state_[entering] =
                    state_[entering] == ColState::at_lower ? ColState::at_upper : ColState::at_lower;
            } else {
                const int leaving = basis_[leave_pos];
                const double xl = xb[leave_pos] - direction * w[leave_pos] * t_max;
                // Classify where the leaving variable lands.
                if (std::isfinite(lower_[leaving]) &&
                    std::fabs(xl - lower_[leaving]) <= std::fabs(xl - upper_[leaving]))
                    state_[leaving] = ColState::at_lower;
                else if (std::isfinite(upper_[leaving]))
                    state_[leaving] = ColState::at_upper;
                else
                    state_[leaving] = ColState::at_lower;
                basis_[leave_pos] = entering;
                state_[entering] = ColState::basic;

                // Rank-1 update of the explicit inverse.
                const double piv = w[leave_pos];
                if (std::fabs(piv) < kPivotTol) {
                    refactorize();
                    since_refactor = 0;
                } else {
                    for (int k = 0; k < m_; ++k) binv_[leave_pos * m_ + k] /= piv;
                    for (int r = 0; r < m_; ++r) {
                        if (r == leave_pos) continue;
                        const double f = w[r];
                        if (f == 0.0) continue;
                        for (int k = 0; k < m_; ++k)
                            binv_[r * m_ + k] -= f * binv_[leave_pos * m_ + k];
                    }
                }
            }

            const double obj = phase_objective(c);
            if (obj < last_obj - 1e-12)
                stall = 0;
            else
                ++stall;
            last_obj = obj;
        }
        throw solver_error("simplex iteration limit exceeded");
    }

    int m_ = 0, n_struct_ = 0, n_total_ = 0;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> lower_, upper_, cost_, phase1_cost_, b_;
    double obj_constant_ = 0.0;
    std::vector<int> basis_;
    std::vector<ColState> state_;
    std::vector<double> binv_;
};

}  // namespace

LpResult solve_lp_relaxation(
    const MilpModel& m,
    const std::vector<std::pair<int, std::pair<double, double>>>& bound_overrides) {
    Simplex s(m, bound_overrides);
    return s.run();
}

}  // namespace henopt
