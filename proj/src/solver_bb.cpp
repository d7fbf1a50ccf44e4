#include <chrono>
#include <cmath>
#include <queue>
#include <vector>

#include "henopt/errors.hpp"
#include "henopt/milp.hpp"

namespace henopt {

namespace {

constexpr double kIntTol = 1e-6;

using Clock = std::chrono::steady_clock;

struct Node {
    double bound = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, std::pair<double, double>>> fixings;
    int depth = 0;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // best bound first
        return a.depth < b.depth;                          // then deepest
    }
};

int most_fractional_binary(const MilpModel& m, const std::vector<double>& x) {
    int best = -1;
    double best_frac = kIntTol;
    for (int j = 0; j < m.variable_count(); ++j) {
        if (m.variables()[j].kind != VarKind::binary) continue;
        const double frac = std::fabs(x[j] - std::round(x[j]));
        if (frac > best_frac) {
            best_frac = frac;
            best = j;
        }
    }
    return best;
}

// Fixes every binary to its rounded relaxation value and re-solves the LP for
// the continuous part; used as a cheap incumbent finder.
bool try_rounding(const MilpModel& m, const std::vector<double>& x,
                  const std::vector<std::pair<int, std::pair<double, double>>>& fixings,
                  std::vector<double>& out, double& obj) {
    auto overrides = fixings;
    for (int j = 0; j < m.variable_count(); ++j) {
        if (m.variables()[j].kind != VarKind::binary) continue;
        const double r = std::round(x[j]);
        overrides.emplace_back(j, std::make_pair(r, r));
    }
    LpResult lp = solve_lp_relaxation(m, overrides);
    if (lp.status != LpResult::Status::optimal) return false;
    out = std::move(lp.values);
    obj = lp.objective;
    return true;
}

}  // namespace

Solution solve_branch_and_bound(const MilpModel& m, const SolveOptions& opts) {
    const auto t0 = Clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    };

    Solution sol;
    sol.values.assign(m.variable_count(), 0.0);

    LpResult root = solve_lp_relaxation(m);
    if (root.status == LpResult::Status::infeasible) {
        sol.status = SolveStatus::infeasible;
        sol.solve_seconds = elapsed();
        return sol;
    }
    if (root.status == LpResult::Status::unbounded)
        throw solver_error("branch and bound: relaxation unbounded");

    double incumbent_obj = std::numeric_limits<double>::infinity();
    std::vector<double> incumbent;
    double best_bound = root.objective;

    const auto gap = [&] {
        if (!std::isfinite(incumbent_obj)) return std::numeric_limits<double>::infinity();
        return (incumbent_obj - best_bound) / std::max(std::fabs(incumbent_obj), 1e-9);
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push({root.objective, {}, 0});

    long nodes_processed = 0;
    while (!open.empty()) {
        Node node = open.top();
        best_bound = node.bound;
        if (gap() <= opts.mip_gap_target) break;
        open.pop();
        if (node.bound >= incumbent_obj - 1e-12) continue;  // pruned
        if (elapsed() > opts.time_limit_s) break;

        LpResult lp = solve_lp_relaxation(m, node.fixings);
        ++nodes_processed;
        if (lp.status != LpResult::Status::optimal) continue;  // infeasible branch
        if (lp.objective >= incumbent_obj - 1e-12) continue;

        const int branch_var = most_fractional_binary(m, lp.values);
        if (branch_var < 0) {
            // Integral: candidate incumbent.
            if (lp.objective < incumbent_obj) {
                incumbent_obj = lp.objective;
                incumbent = lp.values;
                for (int j = 0; j < m.variable_count(); ++j)
                    if (m.variables()[j].kind == VarKind::binary)
                        incumbent[j] = std::round(incumbent[j]);
            }
            continue;
        }

        if (nodes_processed == 1 || nodes_processed % 64 == 0) {
            std::vector<double> rx;
            double robj = 0.0;
            if (try_rounding(m, lp.values, node.fixings, rx, robj) && robj < incumbent_obj &&
                m.feasibility_violation(rx) <= 1e-6) {
                incumbent_obj = robj;
                incumbent = std::move(rx);
            }
        }

        const double frac = lp.values[branch_var];
        for (int side = 0; side < 2; ++side) {
            Node child;
            child.bound = lp.objective;
            child.fixings = node.fixings;
            const double v = side == 0 ? std::floor(frac) : std::ceil(frac);
            child.fixings.emplace_back(branch_var, std::make_pair(v, v));
            child.depth = node.depth + 1;
            if (child.bound < incumbent_obj - 1e-12) open.push(child);
        }
    }

    if (open.empty() && !std::isfinite(incumbent_obj)) {
        sol.status = SolveStatus::infeasible;
        sol.solve_seconds = elapsed();
        return sol;
    }

    if (!open.empty()) {
        best_bound = open.top().bound;
    } else {
        best_bound = incumbent_obj;
    }

    sol.solve_seconds = elapsed();
    if (std::isfinite(incumbent_obj)) {
        sol.values = incumbent;
        sol.objective_value = incumbent_obj;
        sol.mip_gap = std::max(0.0, (incumbent_obj - best_bound) /
                                        std::max(std::fabs(incumbent_obj), 1e-9));
        sol.status = sol.mip_gap <= opts.mip_gap_target ? SolveStatus::optimal_within_gap
                                                        : SolveStatus::timeout_with_incumbent;
    } else {
        sol.status = SolveStatus::timeout_no_solution;
    }
    return sol;
}

}  // namespace henopt
