#include "henopt/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "henopt/errors.hpp"

namespace henopt {

namespace {

constexpr double kDomainTol = 1e-9;

double value_range(const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

// Solves the dense symmetric system A x = b in place by Gaussian elimination
// with partial pivoting. Sizes here are tiny (breakpoint counts).
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (std::fabs(a[col][col]) < 1e-14)
            throw fit_error("singular normal equations in PWL fit");
        for (int r = col + 1; r < n; ++r) {
            const double m = a[r][col] / a[col][col];
            if (m == 0.0) continue;
            for (int c = col; c < n; ++c) a[r][c] -= m * a[col][c];
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

// Least-squares node values for a continuous PWL function with the given
// breakpoints (hat-function basis).
std::vector<double> fit_node_values(const std::vector<double>& bp,
                                    const std::vector<Sample1D>& samples) {
    const int n = static_cast<int>(bp.size());
    std::vector<std::vector<double>> ata(n, std::vector<double>(n, 0.0));
    std::vector<double> atb(n, 0.0);
    for (const auto& [x, y] : samples) {
        auto it = std::upper_bound(bp.begin(), bp.end(), x);
        int seg = std::clamp(static_cast<int>(it - bp.begin()) - 1, 0, n - 2);
        const double w = (bp[seg + 1] > bp[seg]) ? (x - bp[seg]) / (bp[seg + 1] - bp[seg]) : 0.0;
        const double phi[2] = {1.0 - w, w};
        const int idx[2] = {seg, seg + 1};
        for (int a = 0; a < 2; ++a) {
            atb[idx[a]] += phi[a] * y;
            for (int b = 0; b < 2; ++b) ata[idx[a]][idx[b]] += phi[a] * phi[b];
        }
    }
    // Keep the system regular if a breakpoint attracts no sample weight.
    for (int i = 0; i < n; ++i) ata[i][i] += 1e-12;
    return solve_dense(std::move(ata), std::move(atb));
}

bool slopes_non_decreasing(const Pwl1D& p) {
    const double scale = std::max(1.0, std::fabs(p.max_value()));
    for (int s = 0; s + 1 < p.segments(); ++s)
        if (p.slope(s + 1) < p.slope(s) - 1e-9 * scale) return false;
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pwl1D
// ---------------------------------------------------------------------------

double Pwl1D::evaluate(double x) const {
    const double span = std::max(1.0, x_max() - x_min());
    if (x < x_min() - kDomainTol * span || x > x_max() + kDomainTol * span) {
        std::ostringstream msg;
        msg << "PWL evaluation at " << x << " outside domain [" << x_min() << ", " << x_max() << "]";
        throw domain_error(msg.str());
    }
    x = std::clamp(x, x_min(), x_max());
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    int seg = std::clamp(static_cast<int>(it - breakpoints.begin()) - 1, 0, segments() - 1);
    if (x == breakpoints[seg]) return values[seg];  // exact at breakpoints
    const double w = (x - breakpoints[seg]) / (breakpoints[seg + 1] - breakpoints[seg]);
    return values[seg] + w * (values[seg + 1] - values[seg]);
}

double Pwl1D::slope(int segment) const {
    return (values[segment + 1] - values[segment]) /
           (breakpoints[segment + 1] - breakpoints[segment]);
}

double Pwl1D::min_value() const { return *std::min_element(values.begin(), values.end()); }
double Pwl1D::max_value() const { return *std::max_element(values.begin(), values.end()); }

Pwl1D Pwl1D::constant(double lo, double hi, double value) {
    return Pwl1D{{lo, hi}, {value, value}, true};
}

Pwl1D Pwl1D::line(double x0, double y0, double x1, double y1) {
    return Pwl1D{{x0, x1}, {y0, y1}, true};
}

// ---------------------------------------------------------------------------
// fit_pwl_1d
// ---------------------------------------------------------------------------

Pwl1D fit_pwl_1d(std::vector<Sample1D> samples, double rmse_target) {
    if (samples.size() < 2) throw fit_error("fit_pwl_1d needs at least 2 samples");
    std::sort(samples.begin(), samples.end());
    for (size_t i = 0; i + 1 < samples.size(); ++i)
        if (samples[i].first == samples[i + 1].first)
            throw fit_error("fit_pwl_1d requires distinct sample abscissae");

    std::vector<double> ys(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) ys[i] = samples[i].second;
    const double range = value_range(ys);

    std::set<double> bp_set{samples.front().first, samples.back().first};
    const int max_segments = static_cast<int>(samples.size()) - 1;

    while (true) {
        std::vector<double> bp(bp_set.begin(), bp_set.end());
        std::vector<double> node_vals = fit_node_values(bp, samples);
        Pwl1D model{bp, node_vals, false};

        double sse = 0.0;
        double worst_abs = -1.0;
        double worst_x = samples.front().first;
        for (const auto& [x, y] : samples) {
            const double r = model.evaluate(x) - y;
            sse += r * r;
            if (std::fabs(r) > worst_abs && !bp_set.count(x)) {
                worst_abs = std::fabs(r);
                worst_x = x;
            }
        }
        const double abs_rmse = std::sqrt(sse / static_cast<double>(samples.size()));
        const double rel = range > 0.0 ? abs_rmse / range : (abs_rmse > 0.0 ? 1.0 : 0.0);
        if (rel <= rmse_target) {
            model.convex_flag = slopes_non_decreasing(model);
            return model;
        }
        if (model.segments() >= max_segments || worst_abs < 0.0) {
            std::ostringstream msg;
            msg << "fit_pwl_1d cannot reach RMSE " << rmse_target << " (best " << rel << " with "
                << model.segments() << " segments)";
            throw fit_error(msg.str());
        }
        bp_set.insert(worst_x);
    }
}

// ---------------------------------------------------------------------------
// SimplexSurface
// ---------------------------------------------------------------------------

std::pair<int, int> SimplexSurface::simplex_cell(int simplex) const {
    const int cell = simplex / 2;
    const int cells_y = ny() - 1;
    return {cell / cells_y, cell % cells_y};
}

double SimplexSurface::evaluate(double x, double y) const {
    const double sx = std::max(1.0, grid_x.back() - grid_x.front());
    const double sy = std::max(1.0, grid_y.back() - grid_y.front());
    if (x < grid_x.front() - kDomainTol * sx || x > grid_x.back() + kDomainTol * sx ||
        y < grid_y.front() - kDomainTol * sy || y > grid_y.back() + kDomainTol * sy)
        throw domain_error("surface evaluation outside grid rectangle");
    x = std::clamp(x, grid_x.front(), grid_x.back());
    y = std::clamp(y, grid_y.front(), grid_y.back());

    auto itx = std::upper_bound(grid_x.begin(), grid_x.end(), x);
    auto ity = std::upper_bound(grid_y.begin(), grid_y.end(), y);
    const int ix = std::clamp(static_cast<int>(itx - grid_x.begin()) - 1, 0, nx() - 2);
    const int iy = std::clamp(static_cast<int>(ity - grid_y.begin()) - 1, 0, ny() - 2);

    const double fx = (x - grid_x[ix]) / (grid_x[ix + 1] - grid_x[ix]);
    const double fy = (y - grid_y[iy]) / (grid_y[iy + 1] - grid_y[iy]);

    const double v00 = node_value(ix, iy);
    const double v10 = node_value(ix + 1, iy);
    const double v01 = node_value(ix, iy + 1);
    const double v11 = node_value(ix + 1, iy + 1);
    if (fx >= fy) {
        // lower triangle: (0,0), (1,0), (1,1)
        return v00 + fx * (v10 - v00) + fy * (v11 - v10);
    }
    // upper triangle: (0,0), (1,1), (0,1)
    return v00 + fy * (v01 - v00) + fx * (v11 - v01);
}

SimplexSurface build_simplex_surface(const std::function<double(double, double)>& f,
                                     std::vector<double> grid_x, std::vector<double> grid_y) {
    if (grid_x.size() < 2 || grid_y.size() < 2)
        throw domain_error("simplex surface needs at least a 2x2 grid");
    if (!std::is_sorted(grid_x.begin(), grid_x.end()) ||
        !std::is_sorted(grid_y.begin(), grid_y.end()))
        throw domain_error("simplex surface grids must be ascending");

    SimplexSurface s;
    s.grid_x = std::move(grid_x);
    s.grid_y = std::move(grid_y);
    s.node_values.resize(s.node_count());
    for (int ix = 0; ix < s.nx(); ++ix) {
        for (int iy = 0; iy < s.ny(); ++iy) {
            const double v = f(s.grid_x[ix], s.grid_y[iy]);
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "non-finite sample at grid node (" << s.grid_x[ix] << ", " << s.grid_y[iy]
                    << ")";
                throw domain_error(msg.str());
            }
            s.node_values[s.node_index(ix, iy)] = v;
        }
    }
    // Cell-major triangulation, lower (contains lower-right corner) first.
    for (int ix = 0; ix + 1 < s.nx(); ++ix) {
        for (int iy = 0; iy + 1 < s.ny(); ++iy) {
            const int a = s.node_index(ix, iy);
            const int b = s.node_index(ix + 1, iy);
            const int c = s.node_index(ix + 1, iy + 1);
            const int d = s.node_index(ix, iy + 1);
            s.triangulation.push_back({a, b, c});
            s.triangulation.push_back({a, c, d});
        }
    }

    // Validation on a grid of at least 20x20.
    const int vx = std::max(20, 2 * s.nx());
    const int vy = std::max(20, 2 * s.ny());
    std::vector<std::array<double, 3>> val;
    val.reserve(static_cast<size_t>(vx) * vy);
    for (int i = 0; i < vx; ++i) {
        for (int j = 0; j < vy; ++j) {
            const double x = s.grid_x.front() +
                             (s.grid_x.back() - s.grid_x.front()) * i / static_cast<double>(vx - 1);
            const double y = s.grid_y.front() +
                             (s.grid_y.back() - s.grid_y.front()) * j / static_cast<double>(vy - 1);
            val.push_back({x, y, f(x, y)});
        }
    }
    s.rmse = rmse(s, val);
    return s;
}

SimplexSurface build_simplex_surface(const std::function<double(double, double)>& f,
                                     double x_lo, double x_hi, double y_lo, double y_hi,
                                     int nx, int ny) {
    if (nx < 2 || ny < 2) throw domain_error("simplex surface needs nx, ny >= 2");
    std::vector<double> gx(nx), gy(ny);
    for (int i = 0; i < nx; ++i) gx[i] = x_lo + (x_hi - x_lo) * i / static_cast<double>(nx - 1);
    for (int j = 0; j < ny; ++j) gy[j] = y_lo + (y_hi - y_lo) * j / static_cast<double>(ny - 1);
    return build_simplex_surface(f, std::move(gx), std::move(gy));
}

// ---------------------------------------------------------------------------
// PlaneEnvelope
// ---------------------------------------------------------------------------

double PlaneEnvelope::evaluate(const std::vector<double>& x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : planes) {
        double v = p.intercept;
        for (size_t d = 0; d < x.size(); ++d) v += p.coeffs[d] * x[d];
        best = std::max(best, v);
    }
    return best;
}

namespace {

struct EnvelopeSample {
    std::vector<double> x;
    double f;
};

// Tangent plane at `anchor` from central finite differences. It touches f at
// the anchor (supports from below there); away from the anchor it may sit
// slightly above f along concave directions, which the caller reports as the
// envelope's overshoot tolerance.
PlaneEnvelope::Plane tangent_plane(const std::function<double(const std::vector<double>&)>& f,
                                   const std::vector<double>& anchor,
                                   const std::vector<double>& lo, const std::vector<double>& hi,
                                   int dim) {
    PlaneEnvelope::Plane plane;
    plane.coeffs.resize(dim);
    const double fa = f(anchor);
    for (int d = 0; d < dim; ++d) {
        const double span = hi[d] - lo[d];
        if (span <= 0.0) {
            plane.coeffs[d] = 0.0;
            continue;
        }
        const double h = std::max(1e-9, 1e-4 * span);
        std::vector<double> xp = anchor, xm = anchor;
        xp[d] = std::min(hi[d], anchor[d] + h);
        xm[d] = std::max(lo[d], anchor[d] - h);
        const double step = xp[d] - xm[d];
        plane.coeffs[d] = step > 0.0 ? (f(xp) - f(xm)) / step : 0.0;
    }
    plane.intercept = fa;
    for (int d = 0; d < dim; ++d) plane.intercept -= plane.coeffs[d] * anchor[d];
    return plane;
}

}  // namespace

PlaneEnvelope fit_convex_planes(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& lo, const std::vector<double>& hi,
                                int n_planes, int samples_per_dim) {
    const int dim = static_cast<int>(lo.size());
    if (dim != 2 && dim != 3) throw domain_error("plane envelopes support 2 or 3 inputs");
    if (hi.size() != lo.size()) throw domain_error("mismatched box bounds");
    if (n_planes < 1) throw domain_error("need at least one plane");
    if (samples_per_dim <= 1) samples_per_dim = dim == 2 ? 33 : 13;

    std::vector<EnvelopeSample> samples;
    std::vector<int> idx(dim, 0);
    while (true) {
        EnvelopeSample s;
        s.x.resize(dim);
        for (int d = 0; d < dim; ++d)
            s.x[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / static_cast<double>(samples_per_dim - 1);
        s.f = f(s.x);
        if (!std::isfinite(s.f)) throw domain_error("non-finite sample in plane-envelope fit");
        samples.push_back(std::move(s));
        int d = 0;
        while (d < dim && ++idx[d] == samples_per_dim) idx[d++] = 0;
        if (d == dim) break;
    }

    PlaneEnvelope env;
    env.input_dim = dim;
    std::vector<double> anchor(dim);
    for (int d = 0; d < dim; ++d) anchor[d] = 0.5 * (lo[d] + hi[d]);
    std::vector<bool> used(samples.size(), false);

    for (int p = 0; p < n_planes; ++p) {
        PlaneEnvelope::Plane plane = tangent_plane(f, anchor, lo, hi, dim);
        bool duplicate = false;
        for (const auto& q : env.planes) {
            double diff = std::fabs(q.intercept - plane.intercept);
            for (int d = 0; d < dim; ++d) diff += std::fabs(q.coeffs[d] - plane.coeffs[d]);
            if (diff < 1e-10) duplicate = true;
        }
        if (!duplicate) env.planes.push_back(plane);

        // Next anchor: the not-yet-anchored sample the envelope misses worst.
        double worst = -std::numeric_limits<double>::infinity();
        int worst_idx = -1;
        for (size_t i = 0; i < samples.size(); ++i) {
            const double gap = samples[i].f - env.evaluate(samples[i].x);
            if (!used[i] && gap > worst) {
                worst = gap;
                worst_idx = static_cast<int>(i);
            }
        }
        if (worst_idx < 0) break;
        anchor = samples[worst_idx].x;
        used[worst_idx] = true;
        if (worst <= 0.0) break;  // envelope already tight
    }

    double gap = 0.0, overshoot = 0.0;
    for (const auto& s : samples) {
        const double e = env.evaluate(s.x);
        gap = std::max(gap, s.f - e);
        overshoot = std::max(overshoot, e - s.f);
    }
    env.max_underestimate_gap = gap;
    env.max_overshoot = overshoot;
    return env;
}

// ---------------------------------------------------------------------------
// rmse
// ---------------------------------------------------------------------------

namespace {

double normalized_rmse(double sse, size_t n, double lo, double hi) {
    const double abs_rmse = std::sqrt(sse / static_cast<double>(n));
    const double range = hi - lo;
    return range > 0.0 ? abs_rmse / range : (abs_rmse > 0.0 ? 1.0 : 0.0);
}

}  // namespace

double rmse(const Pwl1D& model, const std::vector<Sample1D>& samples) {
    if (samples.empty()) throw domain_error("rmse of empty sample set");
    double sse = 0.0, lo = samples[0].second, hi = samples[0].second;
    for (const auto& [x, y] : samples) {
        const double r = model.evaluate(x) - y;
        sse += r * r;
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    return normalized_rmse(sse, samples.size(), lo, hi);
}

double rmse(const SimplexSurface& model, const std::vector<std::array<double, 3>>& samples) {
    if (samples.empty()) throw domain_error("rmse of empty sample set");
    double sse = 0.0, lo = samples[0][2], hi = samples[0][2];
    for (const auto& s : samples) {
        const double r = model.evaluate(s[0], s[1]) - s[2];
        sse += r * r;
        lo = std::min(lo, s[2]);
        hi = std::max(hi, s[2]);
    }
    return normalized_rmse(sse, samples.size(), lo, hi);
}

double rmse(const PlaneEnvelope& model,
            const std::vector<std::pair<std::vector<double>, double>>& samples) {
    if (samples.empty()) throw domain_error("rmse of empty sample set");
    double sse = 0.0, lo = samples[0].second, hi = samples[0].second;
    for (const auto& [x, y] : samples) {
        const double r = model.evaluate(x) - y;
        sse += r * r;
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    return normalized_rmse(sse, samples.size(), lo, hi);
}

}  // namespace henopt
