#pragma once

#include <string>
#include <vector>

#include "henopt/milp.hpp"
#include "henopt/pwl.hpp"

namespace henopt {

// ---------------------------------------------------------------------------
// Compilation of fitted piecewise-linear models into MILP blocks. Convex
// envelopes use no binaries; general surfaces and non-convex 1-D models use
// ceil(log2(piece count)) binaries with a Gray code over the pieces.
// ---------------------------------------------------------------------------

struct EncodedBlock {
    VarRef output_var;
    std::vector<VarRef> input_vars;
    int binaries_used = 0;
    std::vector<VarRef> lambda_vars;
    std::vector<VarRef> binary_vars;
    // True when every binary code confines the lambda weights to a single
    // simplex; false when codes only confine them to a single grid cell, in
    // which case interpolation error bounds are doubled.
    bool piece_exact = true;
};

enum class PwlUse {
    exact,          // output must equal the PWL value (lambda formulation)
    min_objective,  // output enters a minimized objective with positive sign
};

// Ties y to p(x). Convex models used in the relaxation-safe direction become
// one inequality per segment with zero binaries; otherwise a lambda
// formulation over the breakpoints with a logarithmic Gray code.
EncodedBlock encode_pwl1d(MilpModel& m, const Pwl1D& p, VarRef x, VarRef y,
                          PwlUse use = PwlUse::exact, const std::string& tag = "pwl");

// Ties y to s(x1, x2) with one lambda per grid node and ceil(log2(simplices))
// binaries branching on a serpentine Gray code over the triangulation.
EncodedBlock encode_simplex_surface(MilpModel& m, const SimplexSurface& s, VarRef x1, VarRef x2,
                                    VarRef y, const std::string& tag = "surf");

// One inequality y >= plane_i(inputs) per distinct plane; zero binaries. Only
// valid when y enters a minimized objective with nonnegative coefficient.
EncodedBlock encode_plane_envelope(MilpModel& m, const PlaneEnvelope& e,
                                   const std::vector<VarRef>& inputs, VarRef y,
                                   bool minimized_direction = true,
                                   const std::string& tag = "env");

// Ties z to x * y by building a simplex surface of the product over the bound
// box of x and y. Zero-width factors collapse to a linear equality.
EncodedBlock encode_bilinear_product(MilpModel& m, VarRef x, VarRef y, VarRef z, int nx, int ny,
                                     const std::string& tag = "bil");

// Worst-case |encoded - x*y| for a bilinear product block on the given grids
// (per-cell hull bound; halves when the encoding is piece-exact).
double bilinear_error_bound(const std::vector<double>& grid_x, const std::vector<double>& grid_y,
                            bool piece_exact);

int ceil_log2(int n);

}  // namespace henopt
