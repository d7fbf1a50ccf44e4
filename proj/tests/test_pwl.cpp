#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "henopt/errors.hpp"
#include "henopt/pwl.hpp"

using namespace henopt;

namespace {

std::vector<Sample1D> line_samples(double a, double b, int n, double x0 = 0.0, double x1 = 1.0) {
    std::vector<Sample1D> s;
    for (int i = 0; i < n; ++i) {
        const double x = x0 + (x1 - x0) * i / (n - 1.0);
        s.push_back({x, a * x + b});
    }
    return s;
}

}  // namespace

TEST_CASE("exact line fits with one segment and zero rmse") {
    auto model = fit_pwl_1d(line_samples(2.0, 1.0, 9), 0.01);
    CHECK(model.segments() == 1);
    CHECK(rmse(model, line_samples(2.0, 1.0, 9)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(model.convex_flag);
}

TEST_CASE("kinked data needs two segments and meets a tight target") {
    // Two straight pieces joined mid-domain, like the feedstock curves.
    std::vector<Sample1D> s;
    for (int i = 0; i < 7; ++i) {
        const double x = 1.275 + 0.03 * i / 6.0;
        const double y = x < 1.29 ? 10.0 + 100.0 * (x - 1.275) : 11.5 + 140.0 * (x - 1.29);
        s.push_back({x, y});
    }
    auto model = fit_pwl_1d(s, 0.0025);
    CHECK(model.segments() <= 2);
    CHECK(rmse(model, s) <= 0.0025);
}

TEST_CASE("fit failure when the target is unreachable") {
    // Alternating data cannot be interpolated with fewer breakpoints than
    // samples; a negative target is unreachable even by interpolation.
    std::vector<Sample1D> s{{0, 0}, {1, 1}, {2, 0}, {3, 1}};
    CHECK_THROWS_AS(fit_pwl_1d(s, -1.0), fit_error);
    CHECK_THROWS_AS(fit_pwl_1d({{0, 0}}, 0.1), fit_error);
    CHECK_THROWS_AS(fit_pwl_1d({{0, 0}, {0, 1}, {1, 1}}, 0.1), fit_error);
}

TEST_CASE("interpolating every sample is always reachable") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<Sample1D> s;
    for (int i = 0; i < 9; ++i) s.push_back({static_cast<double>(i), u(rng)});
    auto model = fit_pwl_1d(s, 1e-12);
    CHECK(model.segments() <= 8);
    for (const auto& [x, y] : s) CHECK(model.evaluate(x) == doctest::Approx(y).epsilon(1e-9));
}

TEST_CASE("breakpoint evaluation is exact and domain is enforced") {
    Pwl1D p{{0.0, 1.0, 3.0}, {2.0, -1.0, 4.0}, false};
    CHECK(p.evaluate(0.0) == 2.0);
    CHECK(p.evaluate(1.0) == -1.0);
    CHECK(p.evaluate(3.0) == 4.0);
    CHECK(p.evaluate(2.0) == doctest::Approx(1.5));
    CHECK_THROWS_AS(p.evaluate(-0.5), domain_error);
    CHECK_THROWS_AS(p.evaluate(3.5), domain_error);
}

TEST_CASE("refitting with more breakpoints never increases rmse") {
    std::mt19937 rng(11);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<Sample1D> s;
    for (int i = 0; i < 15; ++i) {
        const double x = i / 14.0;
        s.push_back({x, std::sin(3.0 * x) + noise(rng)});
    }
    double prev = std::numeric_limits<double>::infinity();
    for (double target : {0.2, 0.1, 0.05, 0.02}) {
        auto model = fit_pwl_1d(s, target);
        const double r = rmse(model, s);
        CHECK(r <= prev + 1e-12);
        prev = r;
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("simplex counts follow the grid size") {
    auto affine = [](double x, double y) { return 2.0 * x - 3.0 * y + 1.0; };
    auto s44 = build_simplex_surface(affine, 0, 1, 0, 1, 4, 4);
    CHECK(s44.simplex_count() == 18);
    auto s33 = build_simplex_surface(affine, 0, 1, 0, 1, 3, 3);
    CHECK(s33.simplex_count() == 8);
    auto s22 = build_simplex_surface(affine, 0, 1, 0, 1, 2, 2);
    CHECK(s22.simplex_count() == 2);
    CHECK(s22.rmse == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("surface evaluation is exact at nodes and affine inside simplices") {
    auto f = [](double x, double y) { return x * y + std::sin(x); };
    auto s = build_simplex_surface(f, 0, 2, -1, 1, 4, 3);
    for (int ix = 0; ix < s.nx(); ++ix)
        for (int iy = 0; iy < s.ny(); ++iy)
            CHECK(s.evaluate(s.grid_x[ix], s.grid_y[iy]) ==
                  doctest::Approx(f(s.grid_x[ix], s.grid_y[iy])).epsilon(1e-12));

    // Inside the lower triangle of cell (0,0): value equals the affine
    // interpolant of its three vertices.
    const double x = 0.5, y = -0.8;  // fx=0.75 > fy=0.1 -> lower triangle
    const double fx = (x - s.grid_x[0]) / (s.grid_x[1] - s.grid_x[0]);
    const double fy = (y - s.grid_y[0]) / (s.grid_y[1] - s.grid_y[0]);
    const double expect = s.node_value(0, 0) * (1 - fx) + s.node_value(1, 0) * (fx - fy) +
                          s.node_value(1, 1) * fy;
    CHECK(s.evaluate(x, y) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("surface sampling rejects non-finite values") {
    auto bad = [](double x, double y) { return 1.0 / (x + y); };
    CHECK_THROWS_AS(build_simplex_surface(bad, -1, 1, -1, 1, 3, 3), domain_error);
}

// ---------------------------------------------------------------------------

TEST_CASE("affine function is reproduced exactly by a single plane") {
    auto f = [](const std::vector<double>& x) { return 3.0 * x[0] - 2.0 * x[1] + 0.5; };
    auto env = fit_convex_planes(f, {0.0, 0.0}, {1.0, 2.0}, 1);
    CHECK(env.planes.size() == 1);
    CHECK(env.max_underestimate_gap == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(env.evaluate({0.3, 1.1}) == doctest::Approx(f({0.3, 1.1})).epsilon(1e-9));
}

TEST_CASE("one plane on a symmetric paraboloid matches the best supporting plane") {
    auto f = [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; };
    auto env = fit_convex_planes(f, {-1.0, -1.0}, {1.0, 1.0}, 1, 21);
    // The optimal single supporting plane of x^2+y^2 on a symmetric box is the
    // tangent at the center; its worst gap sits at the corners.
    CHECK(env.max_underestimate_gap == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("area cost term envelope gap stays within 5% of the max value") {
    const double u_coeff = 0.5, beta = 0.8;
    auto f = [&](const std::vector<double>& x) {
        const double q = x[0], lmtd = x[1];
        return std::pow(q / (u_coeff * lmtd), beta);
    };
    auto env = fit_convex_planes(f, {0.0, 1.0}, {200.0, 100.0}, 8, 50);

    double max_f = 0.0, max_gap = 0.0;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            std::vector<double> x{200.0 * i / 49.0, 1.0 + 99.0 * j / 49.0};
            const double v = f(x);
            max_f = std::max(max_f, v);
            max_gap = std::max(max_gap, v - env.evaluate(x));
            // under-approximation up to the stated fit tolerance
            CHECK(env.evaluate(x) <= v + env.max_overshoot + 1e-7);
        }
    }
    CHECK(max_gap <= 0.05 * max_f);
    CHECK(env.max_underestimate_gap <= 0.05 * max_f);
}

TEST_CASE("envelope gap never increases with more planes") {
    auto f = [](const std::vector<double>& x) {
        return std::exp(0.4 * x[0]) + x[1] * x[1] * 0.3;
    };
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {1, 2, 4, 8, 16}) {
        auto env = fit_convex_planes(f, {-2.0, -2.0}, {2.0, 2.0}, n, 25);
        CHECK(env.max_underestimate_gap <= prev + 1e-9);
        prev = env.max_underestimate_gap;
    }
}

TEST_CASE("rmse is zero for an exact model and throws on empty samples") {
    Pwl1D p = Pwl1D::line(0.0, 1.0, 2.0, 5.0);
    std::vector<Sample1D> s{{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}};
    CHECK(rmse(p, s) == doctest::Approx(0.0));
    CHECK_THROWS_AS(rmse(p, {}), domain_error);
}
