#pragma once

// Enumeration oracles shared by the unit and acceptance suites. They solve
// restricted LPs for every binary assignment pattern, independently of the
// branch-and-bound search path.

#include <cmath>
#include <limits>
#include <vector>

#include "henopt/milp.hpp"

namespace henopt::oracle {

// Minimum objective over all 0/1 assignments of `binaries`, each evaluated as
// an LP restriction. Infeasible assignments are skipped.
inline double enumerate_binary_patterns(const MilpModel& m, const std::vector<VarRef>& binaries) {
    const int k = static_cast<int>(binaries.size());
    double best = std::numeric_limits<double>::infinity();
    for (long mask = 0; mask < (1L << k); ++mask) {
        std::vector<std::pair<int, std::pair<double, double>>> fix;
        fix.reserve(k);
        for (int i = 0; i < k; ++i) {
            const double v = (mask >> i) & 1 ? 1.0 : 0.0;
            fix.emplace_back(binaries[i].index, std::make_pair(v, v));
        }
        LpResult lp = solve_lp_relaxation(m, fix);
        if (lp.status == LpResult::Status::optimal) best = std::min(best, lp.objective);
    }
    return best;
}

inline std::vector<VarRef> all_binaries(const MilpModel& m) {
    std::vector<VarRef> b;
    for (int j = 0; j < m.variable_count(); ++j)
        if (m.variables()[j].kind == VarKind::binary) b.push_back(VarRef{j});
    return b;
}

}  // namespace henopt::oracle
