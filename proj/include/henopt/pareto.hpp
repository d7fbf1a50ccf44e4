#pragma once

#include <string>
#include <vector>

#include "henopt/case_data.hpp"
#include "henopt/objectives.hpp"
#include "henopt/superstructure.hpp"

namespace henopt {

// ---------------------------------------------------------------------------
// Two-objective front tracing with the windowed epsilon-constraint method:
// the efficiency objective is minimized as -eta while the production cost is
// banded from both sides per window.
// ---------------------------------------------------------------------------

struct ParetoPoint {
    double eta = 0.0;     // exact ratio at the solution
    double c_prod = 0.0;  // exact ratio at the solution, eur/kg
    double u = 0.0;       // V
    double eta_encoded = 0.0;    // surface value the solver saw
    double c_prod_encoded = 0.0;
    HenDesign design;
    double mip_gap = 0.0;
    double solve_seconds = 0.0;
    int window_index = -1;  // -1 for the corner solves
};

struct WindowStatus {
    int window = 0;
    double f2_lo = 0.0, f2_hi = 0.0;
    std::string status;  // accepted | skipped_infeasible | skipped_gap | skipped_no_solution
    double mip_gap = 0.0;
    double solve_seconds = 0.0;
};

struct SweepOptions {
    SolveOptions solve;
    int workers = 2;
    double box_margin = 0.10;  // fraction of the pre-solved range
};

struct SweepResult {
    std::vector<ParetoPoint> points;  // sorted by c_prod, deduplicated
    double f2_min = 0.0, f2_max = 0.0;
    ObjectiveBoxes boxes;
    std::vector<WindowStatus> window_log;
    std::vector<std::string> structure_diagnostics;  // should stay empty
};

// One fully-built coupled (or fixed-point) problem instance.
struct BuiltProblem {
    MilpModel model;
    HenBlock hen;
    ObjectiveBundle objectives;
};

BuiltProblem build_problem(const CaseDefinition& c, const ObjectiveBoxes& boxes, HenMode mode,
                           bool with_ratio_surfaces = true);

// Surface boxes from two single-objective pre-solves (min TAC, then min
// p_el - h_dot) widened by the configured margin.
ObjectiveBoxes presolve_boxes(const CaseDefinition& c, const SweepOptions& opts);

// The production-cost range of the front: min f2, then min f1 recording f2.
// Optionally returns the two corner points.
std::pair<double, double> objective_bounds(const CaseDefinition& c, const ObjectiveBoxes& boxes,
                                           const SweepOptions& opts,
                                           ParetoPoint* cost_corner = nullptr,
                                           ParetoPoint* eta_corner = nullptr);

// Full sweep: m_points - 1 equal windows between the bounds, solved
// concurrently; timeouts and infeasible windows are recorded, not fatal.
SweepResult epsilon_sweep(const CaseDefinition& c, int m_points, const SweepOptions& opts);

// Maximal mutually non-dominated subset, stable order by c_prod.
std::vector<ParetoPoint> filter_nondominated(std::vector<ParetoPoint> points);

}  // namespace henopt
