#include "henopt/milp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "henopt/errors.hpp"

namespace henopt {

// ---------------------------------------------------------------------------
// LinExpr
// ---------------------------------------------------------------------------

LinExpr& LinExpr::add(VarRef v, double coeff) {
    if (!v.valid()) throw model_error("expression references an invalid variable handle");
    raw_.emplace_back(v.index, coeff);
    return *this;
}

LinExpr& LinExpr::add(const LinExpr& other, double scale) {
    raw_.reserve(raw_.size() + other.raw_.size());
    for (const auto& [idx, c] : other.raw_) raw_.emplace_back(idx, c * scale);
    constant_ += other.constant_ * scale;
    return *this;
}

LinExpr& LinExpr::operator*=(double s) {
    for (auto& [idx, c] : raw_) c *= s;
    constant_ *= s;
    return *this;
}

std::vector<std::pair<int, double>> LinExpr::terms() const {
    std::vector<std::pair<int, double>> t(raw_);
    std::sort(t.begin(), t.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> merged;
    for (const auto& [idx, c] : t) {
        if (!merged.empty() && merged.back().first == idx)
            merged.back().second += c;
        else
            merged.emplace_back(idx, c);
    }
    std::erase_if(merged, [](const auto& p) { return p.second == 0.0; });
    return merged;
}

// ---------------------------------------------------------------------------
// MilpModel
// ---------------------------------------------------------------------------

VarRef MilpModel::add_variable(const std::string& name, VarKind kind, double lower, double upper) {
    if (name.empty()) throw model_error("variable name must not be empty");
    if (name_index_.count(name)) throw model_error("duplicate variable name: " + name);
    if (lower > upper)
        throw model_error("variable " + name + " has lower bound above upper bound");
    const int idx = static_cast<int>(variables_.size());
    variables_.push_back({name, kind, lower, upper});
    name_index_.emplace(name, idx);
    return VarRef{idx};
}

VarRef MilpModel::add_continuous(const std::string& name, double lower, double upper) {
    return add_variable(name, VarKind::continuous, lower, upper);
}

VarRef MilpModel::add_binary(const std::string& name) {
    return add_variable(name, VarKind::binary, 0.0, 1.0);
}

int MilpModel::binary_count() const {
    return static_cast<int>(
        std::count_if(variables_.begin(), variables_.end(),
                      [](const VariableDef& v) { return v.kind == VarKind::binary; }));
}

int MilpModel::add_constraint(const LinExpr& expr, Relation rel, double rhs, std::string name) {
    ConstraintDef c;
    c.terms = expr.terms();
    for (const auto& [idx, coeff] : c.terms) {
        if (idx < 0 || idx >= variable_count())
            throw model_error("constraint references undeclared variable index " +
                              std::to_string(idx));
        (void)coeff;
    }
    c.rel = rel;
    c.rhs = rhs - expr.constant();
    c.name = std::move(name);
    constraints_.push_back(std::move(c));
    return static_cast<int>(constraints_.size()) - 1;
}

void MilpModel::set_objective(const LinExpr& expr) {
    objective_terms_ = expr.terms();
    for (const auto& [idx, coeff] : objective_terms_) {
        if (idx < 0 || idx >= variable_count())
            throw model_error("objective references undeclared variable index " +
                              std::to_string(idx));
        (void)coeff;
    }
    objective_constant_ = expr.constant();
}

VarRef MilpModel::find_variable(const std::string& name) const {
    auto it = name_index_.find(name);
    return it == name_index_.end() ? VarRef{} : VarRef{it->second};
}

void MilpModel::set_bounds(VarRef v, double lower, double upper) {
    if (!v.valid() || v.index >= variable_count())
        throw model_error("set_bounds on undeclared variable");
    if (lower > upper) throw model_error("set_bounds with crossed bounds");
    variables_[v.index].lower = lower;
    variables_[v.index].upper = upper;
}

double MilpModel::eval(const LinExpr& expr, const std::vector<double>& values) const {
    double s = expr.constant();
    for (const auto& [idx, c] : expr.terms()) s += c * values.at(static_cast<size_t>(idx));
    return s;
}

double MilpModel::feasibility_violation(const std::vector<double>& values) const {
    double worst = 0.0;
    for (size_t i = 0; i < variables_.size(); ++i) {
        worst = std::max(worst, variables_[i].lower - values[i]);
        worst = std::max(worst, values[i] - variables_[i].upper);
    }
    for (const auto& c : constraints_) {
        double lhs = 0.0;
        for (const auto& [idx, coeff] : c.terms) lhs += coeff * values[static_cast<size_t>(idx)];
        switch (c.rel) {
            case Relation::less_equal: worst = std::max(worst, lhs - c.rhs); break;
            case Relation::greater_equal: worst = std::max(worst, c.rhs - lhs); break;
            case Relation::equal: worst = std::max(worst, std::fabs(lhs - c.rhs)); break;
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Backend dispatch
// ---------------------------------------------------------------------------

Solution solve(const MilpModel& m, const SolveOptions& opts) {
    switch (opts.backend) {
        case SolveOptions::Backend::in_process:
            return solve_branch_and_bound(m, opts);
        case SolveOptions::Backend::subprocess:
            return solve_subprocess(m, opts);
        case SolveOptions::Backend::automatic:
            if (subprocess_backend_available(opts)) return solve_subprocess(m, opts);
            return solve_branch_and_bound(m, opts);
    }
    throw solver_error("unknown backend");
}

}  // namespace henopt
