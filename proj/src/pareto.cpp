#include "henopt/pareto.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "henopt/errors.hpp"

namespace henopt {

namespace {

// Exact objective ratios recomputed from the solved assignment.
void fill_point_values(ParetoPoint& p, const BuiltProblem& b, const Solution& s,
                       const CaseDefinition& c) {
    const auto& obj = b.objectives;
    const double h = s.value(obj.h_dot_var);
    const double pel = s.value(obj.p_el_var);
    const double tac = s.value(obj.tac_var);
    const double mp = s.value(obj.m_prod_var);
    p.eta = h / pel;
    p.c_prod = tac / (c.economics.t_full_load * mp);
    p.eta_encoded = obj.eta_var.valid() ? s.value(obj.eta_var) : p.eta;
    p.c_prod_encoded = obj.cprod_var.valid() ? s.value(obj.cprod_var) : p.c_prod;
    p.u = s.value(b.hen.opvar);
    p.mip_gap = s.mip_gap;
    p.solve_seconds = s.solve_seconds;
    p.design = extract_design(s, b.hen, c);
}

}  // namespace

BuiltProblem build_problem(const CaseDefinition& c, const ObjectiveBoxes& boxes, HenMode mode,
                           bool with_ratio_surfaces) {
    BuiltProblem b;
    b.hen = build_hen(b.model, c, mode);
    b.objectives = build_objectives(b.model, c, b.hen, boxes, with_ratio_surfaces);
    return b;
}

ObjectiveBoxes presolve_boxes(const CaseDefinition& c, const SweepOptions& opts) {
    ObjectiveBoxes loose = propagate_boxes(c);
    const double t_hours = c.economics.t_full_load;

    // Each pre-solve minimizes a linear surrogate; the two ratio corners are
    // located by fixed-point iteration on the ratio value (parametric
    // reformulation of the fractional objectives).
    std::vector<std::array<double, 4>> visited;  // (h_dot, p_el, tac, m_prod)
    auto run = [&](const std::function<LinExpr(const ObjectiveBundle&)>& make_obj) {
        BuiltProblem b = build_problem(c, loose, HenMode::coupled_mode(), false);
        b.model.set_objective(make_obj(b.objectives));
        Solution s = solve(b.model, opts.solve);
        if (!s.has_solution())
            throw solver_error("box pre-solve failed: model infeasible or timed out empty");
        visited.push_back({s.value(b.objectives.h_dot_var), s.value(b.objectives.p_el_var),
                           s.value(b.objectives.tac_var), s.value(b.objectives.m_prod_var)});
        return visited.back();
    };

    // Cost corner: min TAC seeds lambda, then min TAC - lambda * t * m_prod.
    auto a = run([](const ObjectiveBundle& o) { return LinExpr(o.tac_var); });
    for (int it = 0; it < 2; ++it) {
        const double lambda = a[2] / (t_hours * a[3]);
        a = run([&](const ObjectiveBundle& o) {
            LinExpr e(o.tac_var);
            e.add(o.m_prod_var, -lambda * t_hours);
            return e;
        });
    }
    // Efficiency corner: max h_dot - mu * p_el with mu iterated from 1.
    auto b = run([](const ObjectiveBundle& o) {
        LinExpr e(o.p_el_var);
        e.add(o.h_dot_var, -1.0);
        return e;
    });
    for (int it = 0; it < 2; ++it) {
        const double mu = b[0] / b[1];
        b = run([&](const ObjectiveBundle& o) {
            LinExpr e(o.p_el_var);
            e *= mu;
            e.add(o.h_dot_var, -1.0);
            return e;
        });
    }

    ObjectiveBoxes boxes;
    // Product energy and mass flow are pure functions of the operating
    // variable; their exact ranges need no margin.
    boxes.h_lo = c.performance.h_dot_prod.min_value();
    boxes.h_hi = c.performance.h_dot_prod.max_value();
    boxes.m_lo = c.performance.m_prod_total.min_value();
    boxes.m_hi = c.performance.m_prod_total.max_value();

    double p_min = visited[0][1], p_max = p_min, tac_min = visited[0][2], tac_max = tac_min;
    for (const auto& v : visited) {
        p_min = std::min(p_min, v[1]);
        p_max = std::max(p_max, v[1]);
        tac_min = std::min(tac_min, v[2]);
        tac_max = std::max(tac_max, v[2]);
    }
    auto widen = [&](double lo, double hi, double value_floor) {
        const double margin = std::max(opts.box_margin * (hi - lo), value_floor);
        return std::pair<double, double>{lo - margin, hi + margin};
    };
    auto [p_lo, p_hi] = widen(p_min, p_max, 0.01 * p_max);
    auto [t_lo, t_hi] = widen(tac_min, tac_max, 0.01 * tac_max);
    boxes.p_lo = std::max(p_lo, 1e-6);
    boxes.p_hi = p_hi;
    boxes.tac_lo = std::max(t_lo, 0.0);
    boxes.tac_hi = t_hi;
    return boxes;
}

namespace {

struct CornerSolve {
    ParetoPoint point;
    Solution solution;
    bool ok = false;
};

CornerSolve solve_corner(const CaseDefinition& c, const ObjectiveBoxes& boxes,
                         const SweepOptions& opts, bool min_cost) {
    BuiltProblem b = build_problem(c, boxes, HenMode::coupled_mode(), true);
    if (min_cost)
        b.model.set_objective(LinExpr(b.objectives.cprod_var));
    else
        b.model.set_objective(LinExpr(b.objectives.eta_var) * -1.0);
    Solution s = solve(b.model, opts.solve);
    CornerSolve out;
    if (!s.has_solution()) return out;
    out.ok = true;
    fill_point_values(out.point, b, s, c);
    out.solution = std::move(s);
    return out;
}

}  // namespace

std::pair<double, double> objective_bounds(const CaseDefinition& c, const ObjectiveBoxes& boxes,
                                           const SweepOptions& opts, ParetoPoint* cost_corner,
                                           ParetoPoint* eta_corner) {
    CornerSolve lo = solve_corner(c, boxes, opts, true);
    if (!lo.ok) throw solver_error("objective bounds: cost-corner solve found no solution");
    CornerSolve hi = solve_corner(c, boxes, opts, false);
    if (!hi.ok) throw solver_error("objective bounds: efficiency-corner solve found no solution");

    const double f2_min = lo.point.c_prod_encoded;
    const double f2_max = std::max(f2_min, hi.point.c_prod_encoded);
    if (cost_corner) *cost_corner = lo.point;
    if (eta_corner) *eta_corner = hi.point;
    return {f2_min, f2_max};
}

SweepResult epsilon_sweep(const CaseDefinition& c, int m_points, const SweepOptions& opts) {
    if (m_points < 2) throw domain_error("epsilon sweep needs at least two points");

    SweepResult result;
    result.boxes = presolve_boxes(c, opts);

    ParetoPoint cost_corner, eta_corner;
    std::tie(result.f2_min, result.f2_max) =
        objective_bounds(c, result.boxes, opts, &cost_corner, &eta_corner);

    std::vector<ParetoPoint> points{cost_corner, eta_corner};
    std::mutex mu;

    const int windows = m_points - 1;
    const double width = (result.f2_max - result.f2_min) / windows;
    std::atomic<int> next{0};

    auto run_window = [&](int w) {
        const double lo = result.f2_min + w * width;
        const double hi = (w == windows - 1) ? result.f2_max : lo + width;
        WindowStatus st;
        st.window = w;
        st.f2_lo = lo;
        st.f2_hi = hi;

        BuiltProblem b = build_problem(c, result.boxes, HenMode::coupled_mode(), true);
        b.model.add_constraint(LinExpr(b.objectives.cprod_var), Relation::greater_equal, lo,
                               "band_lo");
        b.model.add_constraint(LinExpr(b.objectives.cprod_var), Relation::less_equal, hi,
                               "band_hi");
        b.model.set_objective(LinExpr(b.objectives.eta_var) * -1.0);
        Solution s;
        try {
            s = solve(b.model, opts.solve);
        } catch (const solver_error& e) {
            st.status = std::string("skipped_error: ") + e.what();
            std::lock_guard<std::mutex> lock(mu);
            result.window_log.push_back(st);
            return;
        }
        st.mip_gap = s.mip_gap;
        st.solve_seconds = s.solve_seconds;
        const bool accept =
            s.status == SolveStatus::optimal_within_gap ||
            (s.status == SolveStatus::timeout_with_incumbent &&
             s.mip_gap <= 2.0 * opts.solve.mip_gap_target);
        if (accept) {
            st.status = "accepted";
            ParetoPoint p;
            fill_point_values(p, b, s, c);
            p.window_index = w;
            auto diags = check_solution_structure(s, b.hen, c);
            std::lock_guard<std::mutex> lock(mu);
            points.push_back(std::move(p));
            for (auto& d : diags)
                result.structure_diagnostics.push_back("window " + std::to_string(w) + ": " + d);
            result.window_log.push_back(st);
        } else {
            st.status = s.status == SolveStatus::infeasible ? "skipped_infeasible"
                        : s.status == SolveStatus::timeout_with_incumbent ? "skipped_gap"
                                                                          : "skipped_no_solution";
            std::lock_guard<std::mutex> lock(mu);
            result.window_log.push_back(st);
        }
    };

    const int n_workers = std::max(1, std::min(opts.workers, windows));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) {
        pool.emplace_back([&] {
            for (int w = next.fetch_add(1); w < windows; w = next.fetch_add(1)) run_window(w);
        });
    }
    for (auto& t : pool) t.join();

    // Deterministic order and boundary-duplicate removal.
    std::sort(points.begin(), points.end(), [](const ParetoPoint& x, const ParetoPoint& y) {
        if (x.c_prod != y.c_prod) return x.c_prod < y.c_prod;
        return x.eta > y.eta;
    });
    std::vector<ParetoPoint> dedup;
    for (auto& p : points) {
        if (!dedup.empty() && std::fabs(dedup.back().c_prod - p.c_prod) <= 1e-6 &&
            std::fabs(dedup.back().eta - p.eta) <= 1e-6)
            continue;
        dedup.push_back(std::move(p));
    }
    result.points = std::move(dedup);
    std::sort(result.window_log.begin(), result.window_log.end(),
              [](const WindowStatus& a, const WindowStatus& b) { return a.window < b.window; });
    return result;
}

std::vector<ParetoPoint> filter_nondominated(std::vector<ParetoPoint> points) {
    std::sort(points.begin(), points.end(), [](const ParetoPoint& x, const ParetoPoint& y) {
        if (x.c_prod != y.c_prod) return x.c_prod < y.c_prod;
        return x.eta > y.eta;
    });
    std::vector<ParetoPoint> kept;
    for (const auto& p : points) {
        bool dominated = false;
        for (const auto& q : points) {
            if (&p == &q) continue;
            const bool weakly = q.eta >= p.eta && q.c_prod <= p.c_prod;
            const bool strictly = q.eta > p.eta || q.c_prod < p.c_prod;
            if (weakly && strictly) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.push_back(p);
    }
    return kept;
}

}  // namespace henopt
