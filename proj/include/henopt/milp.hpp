#pragma once

#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace henopt {

// ---------------------------------------------------------------------------
// Solver-agnostic MILP representation.
// ---------------------------------------------------------------------------

enum class VarKind { continuous, binary };
enum class Relation { less_equal, equal, greater_equal };

struct VarRef {
    int index = -1;
    bool valid() const { return index >= 0; }
    friend bool operator==(VarRef a, VarRef b) { return a.index == b.index; }
};

// Sparse linear expression: sum of coeff * var + constant.
class LinExpr {
public:
    LinExpr() = default;
    LinExpr(double c) : constant_(c) {}  // NOLINT: implicit by design
    LinExpr(VarRef v) { add(v, 1.0); }   // NOLINT

    LinExpr& add(VarRef v, double coeff);
    LinExpr& add(const LinExpr& other, double scale = 1.0);
    LinExpr& add_constant(double c) {
        constant_ += c;
        return *this;
    }

    double constant() const { return constant_; }
    // Coefficients merged by variable, ascending index, zeros dropped.
    std::vector<std::pair<int, double>> terms() const;

    LinExpr& operator+=(const LinExpr& o) { return add(o); }
    LinExpr& operator-=(const LinExpr& o) { return add(o, -1.0); }
    LinExpr& operator*=(double s);
    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
    friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

private:
    std::vector<std::pair<int, double>> raw_;
    double constant_ = 0.0;
};

struct VariableDef {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = 0.0;
};

struct ConstraintDef {
    std::vector<std::pair<int, double>> terms;  // merged, ascending var index
    Relation rel = Relation::less_equal;
    double rhs = 0.0;
    std::string name;
};

enum class SolveStatus {
    optimal_within_gap,
    infeasible,
    timeout_no_solution,
    timeout_with_incumbent,
};

struct Solution {
    SolveStatus status = SolveStatus::timeout_no_solution;
    std::vector<double> values;
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    double mip_gap = std::numeric_limits<double>::infinity();
    double solve_seconds = 0.0;

    bool has_solution() const {
        return status == SolveStatus::optimal_within_gap ||
               status == SolveStatus::timeout_with_incumbent;
    }
    double value(VarRef v) const { return values.at(static_cast<size_t>(v.index)); }
};

class MilpModel {
public:
    VarRef add_continuous(const std::string& name, double lower, double upper);
    VarRef add_binary(const std::string& name);

    // expr `rel` rhs; the expression's constant moves to the right-hand side.
    int add_constraint(const LinExpr& expr, Relation rel, double rhs, std::string name = "");
    void set_objective(const LinExpr& expr);  // minimization

    int variable_count() const { return static_cast<int>(variables_.size()); }
    int binary_count() const;
    int constraint_count() const { return static_cast<int>(constraints_.size()); }

    const std::vector<VariableDef>& variables() const { return variables_; }
    const std::vector<ConstraintDef>& constraints() const { return constraints_; }
    const std::vector<std::pair<int, double>>& objective_terms() const { return objective_terms_; }
    double objective_constant() const { return objective_constant_; }

    VarRef find_variable(const std::string& name) const;
    const VariableDef& variable(VarRef v) const { return variables_.at(v.index); }

    void set_bounds(VarRef v, double lower, double upper);

    // Max violation of constraints and variable bounds at an assignment.
    double feasibility_violation(const std::vector<double>& values) const;
    double eval(const LinExpr& expr, const std::vector<double>& values) const;

private:
    VarRef add_variable(const std::string& name, VarKind kind, double lower, double upper);

    std::vector<VariableDef> variables_;
    std::vector<ConstraintDef> constraints_;
    std::unordered_map<std::string, int> name_index_;
    std::vector<std::pair<int, double>> objective_terms_;
    double objective_constant_ = 0.0;
};

struct SolveOptions {
    double mip_gap_target = 0.01;
    double time_limit_s = 600.0;
    int threads = 1;
    // auto: subprocess when a driver is configured and reachable, else the
    // in-process branch and bound.
    enum class Backend { automatic, in_process, subprocess } backend = Backend::automatic;
    std::string solver_command;  // overrides HENOPT_SOLVER_CMD / built-in driver
    bool log = false;
};

// MPS emission (fixed section order: NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA)
// with canonical column/row names in declaration order.
std::string emit_mps(const MilpModel& m);

// Solution-file text in the driver's native format; returns a Solution sized
// to the model. Throws solver_error on malformed input.
Solution parse_solution_file(const MilpModel& m, const std::string& text);

// Solves with the selected backend.
Solution solve(const MilpModel& m, const SolveOptions& opts);

// Individual backends (exposed for tests and oracles).
Solution solve_branch_and_bound(const MilpModel& m, const SolveOptions& opts);
Solution solve_subprocess(const MilpModel& m, const SolveOptions& opts);
bool subprocess_backend_available(const SolveOptions& opts);

// LP relaxation solver used by the branch-and-bound backend and by the
// enumeration oracles: binaries are treated as continuous in [lower, upper].
struct LpResult {
    enum class Status { optimal, infeasible, unbounded } status = Status::infeasible;
    std::vector<double> values;
    double objective = std::numeric_limits<double>::quiet_NaN();
};
LpResult solve_lp_relaxation(const MilpModel& m,
                             const std::vector<std::pair<int, std::pair<double, double>>>&
                                 bound_overrides = {});

}  // namespace henopt
