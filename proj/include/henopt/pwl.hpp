#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace henopt {

// ---------------------------------------------------------------------------
// Piecewise-linear models: 1-D segmented lines, triangulated 2-D surfaces and
// max-of-plane envelopes, together with the fitting routines that produce
// them from sampled data.
// ---------------------------------------------------------------------------

using Sample1D = std::pair<double, double>;

// Continuous piecewise-linear function of one variable.
struct Pwl1D {
    std::vector<double> breakpoints;  // strictly ascending, >= 2
    std::vector<double> values;       // same length
    bool convex_flag = false;         // slopes non-decreasing

    double x_min() const { return breakpoints.front(); }
    double x_max() const { return breakpoints.back(); }
    int segments() const { return static_cast<int>(breakpoints.size()) - 1; }

    // Linear interpolation; exact at breakpoints. Throws domain_error outside
    // [x_min, x_max].
    double evaluate(double x) const;

    double slope(int segment) const;

    // Value range over the domain (attained at breakpoints).
    double min_value() const;
    double max_value() const;

    static Pwl1D constant(double lo, double hi, double value);
    static Pwl1D line(double x0, double y0, double x1, double y1);
};

// Triangulated surface on a rectangular grid. Each cell is split along its
// lower-left to upper-right diagonal into a lower triangle (contains the
// lower-right corner) and an upper triangle (contains the upper-left corner).
struct SimplexSurface {
    std::vector<double> grid_x;  // ascending
    std::vector<double> grid_y;  // ascending
    // node_values[ix * grid_y.size() + iy]
    std::vector<double> node_values;
    // vertex index triples into the node array, cell-major, lower then upper
    std::vector<std::array<int, 3>> triangulation;
    double rmse = 0.0;  // relative to value range, on the validation grid

    int nx() const { return static_cast<int>(grid_x.size()); }
    int ny() const { return static_cast<int>(grid_y.size()); }
    int node_count() const { return nx() * ny(); }
    int simplex_count() const { return static_cast<int>(triangulation.size()); }

    int node_index(int ix, int iy) const { return ix * ny() + iy; }
    double node_x(int node) const { return grid_x[node / ny()]; }
    double node_y(int node) const { return grid_y[node % ny()]; }
    double node_value(int ix, int iy) const { return node_values[node_index(ix, iy)]; }

    // Affine interpolation on the containing triangle; exact at nodes.
    double evaluate(double x, double y) const;

    // Cell of a simplex in triangulation order (two simplices per cell).
    std::pair<int, int> simplex_cell(int simplex) const;
};

// Convex max-of-hyperplanes under-approximation of a function of 2 or 3
// variables: value(x) = max_i (coeffs_i . x + intercept_i) <= f(x) on the
// fitted samples.
struct PlaneEnvelope {
    struct Plane {
        std::vector<double> coeffs;
        double intercept = 0.0;
    };
    std::vector<Plane> planes;
    int input_dim = 2;
    double max_underestimate_gap = 0.0;  // max_i f(x_i) - value(x_i) over fit samples
    double max_overshoot = 0.0;          // max_i value(x_i) - f(x_i); the fit tolerance

    double evaluate(const std::vector<double>& x) const;
};

// Fits a continuous PWL function by greedy split-and-refit: breakpoints start
// at the domain endpoints and the worst-residual sample is promoted to a
// breakpoint until the range-normalized RMSE meets the target. Throws
// fit_error when the target is unreachable with segments <= samples - 1.
Pwl1D fit_pwl_1d(std::vector<Sample1D> samples, double rmse_target);

// Samples f at the nodes of a uniform nx-by-ny grid over the rectangle and
// triangulates. Validation RMSE is measured on at least a 20x20 grid.
SimplexSurface build_simplex_surface(const std::function<double(double, double)>& f,
                                     double x_lo, double x_hi, double y_lo, double y_hi,
                                     int nx, int ny);

// Same, with explicit (possibly non-uniform) ascending grids.
SimplexSurface build_simplex_surface(const std::function<double(double, double)>& f,
                                     std::vector<double> grid_x, std::vector<double> grid_y);

// Builds an under-approximating plane envelope from samples of f on the box
// [lo, hi]^dim. Planes are locally weighted least-squares fits anchored at the
// worst-gap sample, shifted down so no plane exceeds f at any sample.
PlaneEnvelope fit_convex_planes(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& lo, const std::vector<double>& hi,
                                int n_planes, int samples_per_dim = 0);

// Range-normalized root-mean-square deviation between a model and samples.
double rmse(const Pwl1D& model, const std::vector<Sample1D>& samples);
double rmse(const SimplexSurface& model,
            const std::vector<std::array<double, 3>>& samples);  // (x, y, f)
double rmse(const PlaneEnvelope& model,
            const std::vector<std::pair<std::vector<double>, double>>& samples);

}  // namespace henopt
