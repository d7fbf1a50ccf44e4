#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "henopt/errors.hpp"
#include "henopt/pareto.hpp"

using namespace henopt;

namespace {

StreamDef make_stream(const std::string& id, StreamKind kind, double t_in, double t_out,
                      double f) {
    StreamDef s;
    s.id = id;
    s.kind = kind;
    s.t_in = ParamModel::constant(t_in);
    s.t_out = ParamModel::constant(t_out);
    s.f = ParamModel::constant(f);
    s.u_coeff = 0.5;
    s.op_lower = 1.0;
    s.op_upper = 2.0;
    return s;
}

// A small coupled case whose objectives trade off through the operating
// variable alone: efficiency falls and specific cost drops as u rises.
CaseDefinition trade_off_case() {
    CaseDefinition c;
    c.opvar = {"U", 1.0, 2.0};
    c.streams = {make_stream("H1", StreamKind::hot, 150.0, 50.0, 1.0),
                 make_stream("C1", StreamKind::cold, 20.0, 120.0, 1.0)};
    c.products.push_back({1, "fuel", 44.2, 750.0, 1.0});
    c.economics = {8000.0, 0.05, 1.0, 1e7,  20.0, {{"H2O", 3.54}},
                   1013.6, 61.8, 0.8,  1.05, 0.05};
    c.performance.p_sys = Pwl1D::line(1.0, 800.0, 2.0, 1100.0);
    c.performance.m_prod_total = Pwl1D::line(1.0, 39.0, 2.0, 53.0);
    c.performance.h_dot_prod = Pwl1D::line(1.0, 480.0, 2.0, 650.0);
    c.performance.feed_flows.emplace_back("H2O", Pwl1D::line(1.0, 0.35, 2.0, 0.36));
    c.hen_config = {1, 1.0, {20.0, 25.0}, {900.0, 900.0}};
    return c;
}

SweepOptions fast_opts() {
    SweepOptions o;
    o.solve.backend = SolveOptions::Backend::in_process;
    o.solve.mip_gap_target = 1e-6;
    o.solve.time_limit_s = 300.0;
    o.workers = 2;
    return o;
}

}  // namespace

TEST_CASE("two-point sweep returns exactly the two corners") {
    CaseDefinition c = trade_off_case();
    SweepOptions opts = fast_opts();

    ObjectiveBoxes boxes = presolve_boxes(c, opts);
    ParetoPoint cost_corner, eta_corner;
    auto [f2_min, f2_max] = objective_bounds(c, boxes, opts, &cost_corner, &eta_corner);
    CHECK(f2_min < f2_max);
    CHECK(cost_corner.c_prod < eta_corner.c_prod);
    CHECK(eta_corner.eta > cost_corner.eta);

    SweepResult r = epsilon_sweep(c, 2, opts);
    REQUIRE(r.points.size() == 2);
    CHECK(r.points[0].c_prod == doctest::Approx(cost_corner.c_prod).epsilon(1e-5));
    CHECK(r.points[1].eta == doctest::Approx(eta_corner.eta).epsilon(1e-5));
    CHECK(r.structure_diagnostics.empty());

    // the efficiency corner sits at the low end of the operating range,
    // the cost corner at the high end
    CHECK(eta_corner.u == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(cost_corner.u == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("windowed points satisfy their bands and dominance never appears") {
    CaseDefinition c = trade_off_case();
    SweepOptions opts = fast_opts();
    SweepResult r = epsilon_sweep(c, 5, opts);
    REQUIRE(r.points.size() >= 2);

    const double width = (r.f2_max - r.f2_min) / 4.0;
    for (const auto& p : r.points) {
        CHECK(p.eta >= 0.0);
        CHECK(p.c_prod > 0.0);
        if (p.window_index >= 0) {
            const double lo = r.f2_min + p.window_index * width;
            const double hi = lo + width;
            CHECK(p.c_prod_encoded >= lo - 1e-6);
            CHECK(p.c_prod_encoded <= hi + 1e-6);
        }
        // global pre-solved bounds hold
        CHECK(p.c_prod_encoded >= r.f2_min - 1e-6);
        CHECK(p.c_prod_encoded <= r.f2_max + 1e-6);
    }
    auto filtered = filter_nondominated(r.points);
    for (const auto& a : filtered)
        for (const auto& b : filtered) {
            if (&a == &b) continue;
            const bool weakly = b.eta >= a.eta && b.c_prod <= a.c_prod;
            const bool strictly = b.eta > a.eta || b.c_prod < a.c_prod;
            CHECK(!(weakly && strictly));
        }
    CHECK(r.structure_diagnostics.empty());
}

TEST_CASE("doubling the point count nests the window boundaries and keeps corners") {
    CaseDefinition c = trade_off_case();
    SweepOptions opts = fast_opts();
    SweepResult r3 = epsilon_sweep(c, 3, opts);
    SweepResult r5 = epsilon_sweep(c, 5, opts);

    CHECK(r3.f2_min == doctest::Approx(r5.f2_min).epsilon(1e-6));
    CHECK(r3.f2_max == doctest::Approx(r5.f2_max).epsilon(1e-6));
    // nested boundaries: every coarse window edge is a fine window edge
    for (int w = 0; w <= 2; ++w) {
        const double edge = r3.f2_min + w * (r3.f2_max - r3.f2_min) / 2.0;
        bool found = false;
        for (int v = 0; v <= 4; ++v) {
            const double fine = r5.f2_min + v * (r5.f2_max - r5.f2_min) / 4.0;
            if (std::fabs(fine - edge) <= 1e-9 * std::max(1.0, std::fabs(edge))) found = true;
        }
        CHECK(found);
    }
    // corner points reappear
    CHECK(r5.points.front().c_prod == doctest::Approx(r3.points.front().c_prod).epsilon(1e-5));
    CHECK(r5.points.back().eta == doctest::Approx(r3.points.back().eta).epsilon(1e-5));
}

TEST_CASE("flat objectives collapse the sweep to a single point") {
    CaseDefinition c = trade_off_case();
    c.performance.p_sys = Pwl1D::line(1.0, 900.0, 2.0, 900.0);
    c.performance.m_prod_total = Pwl1D::line(1.0, 45.0, 2.0, 45.0);
    c.performance.h_dot_prod = Pwl1D::line(1.0, 550.0, 2.0, 550.0);
    c.performance.feed_flows = {{"H2O", Pwl1D::line(1.0, 0.35, 2.0, 0.35)}};
    SweepOptions opts = fast_opts();
    SweepResult r = epsilon_sweep(c, 2, opts);
    // alternate optimal designs can separate the corners by solver-gap noise
    CHECK(r.points.size() <= 2);
    CHECK(r.f2_max - r.f2_min <= 1e-3 * r.f2_max);
}

TEST_CASE("infeasible instances propagate an error") {
    // A combustion stream whose minimum release exceeds what the single small
    // cold stream can absorb.
    CaseDefinition c = trade_off_case();
    StreamDef cs;
    cs.id = "CS1";
    cs.kind = StreamKind::cs;
    cs.t_in = ParamModel::constant(900.0);
    cs.t_out = ParamModel::free_in(100.0, 890.0);
    cs.f = ParamModel::free_in(10.0, 20.0);
    cs.u_coeff = 0.5;
    cs.op_lower = 1.0;
    cs.op_upper = 2.0;
    c.streams = {cs, make_stream("C1", StreamKind::cold, 20.0, 120.0, 0.5)};
    SweepOptions opts = fast_opts();
    CHECK_THROWS_AS(presolve_boxes(c, opts), solver_error);
}

TEST_CASE("dominance filter on explicit points") {
    ParetoPoint a, b;
    a.eta = 0.58;
    a.c_prod = 1.83;
    b.eta = 0.57;
    b.c_prod = 1.90;
    auto kept = filter_nondominated({a, b});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].eta == doctest::Approx(0.58));

    CHECK(filter_nondominated({}).empty());

    // an overhang: lower cost and lower efficiency are mutually non-dominated
    ParetoPoint c1, c2;
    c1.eta = 0.58;
    c1.c_prod = 1.83;
    c2.eta = 0.60;
    c2.c_prod = 1.95;
    CHECK(filter_nondominated({c1, c2}).size() == 2);
}

TEST_CASE("sweep rejects fewer than two points") {
    CaseDefinition c = trade_off_case();
    CHECK_THROWS_AS(epsilon_sweep(c, 1, fast_opts()), domain_error);
}
