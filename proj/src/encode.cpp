#include "henopt/encode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "henopt/errors.hpp"

namespace henopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

uint32_t gray(uint32_t i) { return i ^ (i >> 1); }

void require_bounds_within(const MilpModel& m, VarRef v, double lo, double hi,
                           const char* what) {
    const auto& def = m.variable(v);
    if (!std::isfinite(def.lower) || !std::isfinite(def.upper))
        throw encoding_error(std::string(what) + ": variable " + def.name + " must be bounded");
    const double slack = 1e-9 * std::max(1.0, hi - lo);
    if (def.lower < lo - slack || def.upper > hi + slack)
        throw encoding_error(std::string(what) + ": bounds of " + def.name +
                             " exceed the model domain");
}

// Adds the two per-bit branching constraints of the logarithmic formulation:
// lambdas on nodes incompatible with the active side of a bit must vanish.
void add_log_branching(MilpModel& m, const std::vector<VarRef>& lambdas,
                       const std::vector<std::vector<int>>& piece_nodes,
                       const std::vector<uint32_t>& code, int bits,
                       std::vector<VarRef>& binaries, const std::string& tag) {
    const int node_count = static_cast<int>(lambdas.size());
    const int pieces = static_cast<int>(piece_nodes.size());
    for (int l = 0; l < bits; ++l) {
        VarRef b = m.add_binary(tag + "_b" + std::to_string(l));
        binaries.push_back(b);
        std::vector<char> in_side(static_cast<size_t>(node_count) * 2, 0);
        for (int p = 0; p < pieces; ++p) {
            const int side = (code[p] >> l) & 1u;
            for (int v : piece_nodes[p]) in_side[v * 2 + side] = 1;
        }
        LinExpr off_when_set;   // nodes in no piece with bit l = 1
        LinExpr off_when_clear; // nodes in no piece with bit l = 0
        bool any_set = false, any_clear = false;
        for (int v = 0; v < node_count; ++v) {
            if (!in_side[v * 2 + 1]) {
                off_when_set.add(lambdas[v], 1.0);
                any_set = true;
            }
            if (!in_side[v * 2 + 0]) {
                off_when_clear.add(lambdas[v], 1.0);
                any_clear = true;
            }
        }
        if (any_set) {
            LinExpr e = off_when_set;
            e.add(b, 1.0);
            m.add_constraint(e, Relation::less_equal, 1.0, tag + "_bit" + std::to_string(l) + "p");
        }
        if (any_clear) {
            LinExpr e = off_when_clear;
            e.add(b, -1.0);
            m.add_constraint(e, Relation::less_equal, 0.0, tag + "_bit" + std::to_string(l) + "n");
        }
    }
    // Forbid codewords that name no piece:
    // sum_{w_l=0} b_l + sum_{w_l=1} (1 - b_l) >= 1.
    std::set<uint32_t> assigned(code.begin(), code.end());
    for (uint32_t w = 0; w < (1u << bits); ++w) {
        if (assigned.count(w)) continue;
        LinExpr cut;
        int ones = 0;
        for (int l = 0; l < bits; ++l) {
            VarRef b = binaries[binaries.size() - bits + l];
            if ((w >> l) & 1u) {
                cut.add(b, -1.0);
                ++ones;
            } else {
                cut.add(b, 1.0);
            }
        }
        m.add_constraint(cut, Relation::greater_equal, 1.0 - ones,
                         tag + "_nogood" + std::to_string(w));
    }
}

// For each assigned codeword, the set of nodes its branching constraints
// leave free. Exact formulations confine them to the piece itself.
std::vector<std::vector<int>> allowed_nodes_per_piece(
    const std::vector<std::vector<int>>& piece_nodes, const std::vector<uint32_t>& code,
    int bits, int node_count) {
    const int pieces = static_cast<int>(piece_nodes.size());
    std::vector<std::vector<char>> side_union(
        static_cast<size_t>(bits) * 2, std::vector<char>(node_count, 0));
    for (int p = 0; p < pieces; ++p)
        for (int l = 0; l < bits; ++l) {
            const int side = (code[p] >> l) & 1u;
            for (int v : piece_nodes[p]) side_union[l * 2 + side][v] = 1;
        }
    std::vector<std::vector<int>> result(pieces);
    for (int p = 0; p < pieces; ++p) {
        for (int v = 0; v < node_count; ++v) {
            bool ok = true;
            for (int l = 0; l < bits && ok; ++l)
                ok = side_union[l * 2 + ((code[p] >> l) & 1u)][v];
            if (ok) result[p].push_back(v);
        }
    }
    return result;
}

}  // namespace

int ceil_log2(int n) {
    int bits = 0;
    while ((1 << bits) < n) ++bits;
    return bits;
}

// ---------------------------------------------------------------------------
// encode_pwl1d
// ---------------------------------------------------------------------------

EncodedBlock encode_pwl1d(MilpModel& m, const Pwl1D& p, VarRef x, VarRef y, PwlUse use,
                          const std::string& tag) {
    require_bounds_within(m, x, p.x_min(), p.x_max(), "encode_pwl1d");
    EncodedBlock block;
    block.output_var = y;
    block.input_vars = {x};

    const int segs = p.segments();
    if (segs == 1) {
        const double a = p.slope(0);
        LinExpr e = LinExpr(y) - LinExpr(x) * a;
        m.add_constraint(e, Relation::equal, p.values[0] - a * p.breakpoints[0], tag + "_lin");
        return block;
    }

    if (use == PwlUse::min_objective && p.convex_flag) {
        for (int s = 0; s < segs; ++s) {
            const double a = p.slope(s);
            LinExpr e = LinExpr(y) - LinExpr(x) * a;
            m.add_constraint(e, Relation::greater_equal, p.values[s] - a * p.breakpoints[s],
                             tag + "_seg" + std::to_string(s));
        }
        return block;
    }

    // Lambda formulation over breakpoints with a logarithmic SOS2 code.
    const int n = static_cast<int>(p.breakpoints.size());
    LinExpr sum, xsum, ysum;
    for (int i = 0; i < n; ++i) {
        VarRef l = m.add_continuous(tag + "_l" + std::to_string(i), 0.0, 1.0);
        block.lambda_vars.push_back(l);
        sum.add(l, 1.0);
        xsum.add(l, p.breakpoints[i]);
        ysum.add(l, p.values[i]);
    }
    m.add_constraint(sum, Relation::equal, 1.0, tag + "_sum");
    m.add_constraint(xsum - LinExpr(x), Relation::equal, 0.0, tag + "_x");
    m.add_constraint(ysum - LinExpr(y), Relation::equal, 0.0, tag + "_y");

    const int bits = ceil_log2(segs);
    block.binaries_used = bits;
    if (bits > 0) {
        std::vector<std::vector<int>> piece_nodes(segs);
        for (int s = 0; s < segs; ++s) piece_nodes[s] = {s, s + 1};
        std::vector<uint32_t> code(segs);
        for (int s = 0; s < segs; ++s) code[s] = gray(static_cast<uint32_t>(s));
        add_log_branching(m, block.lambda_vars, piece_nodes, code, bits, block.binary_vars, tag);
        // The SOS2 Gray code confines weights to one segment.
        auto allowed = allowed_nodes_per_piece(piece_nodes, code, bits, n);
        for (int s = 0; s < segs; ++s)
            if (allowed[s].size() > piece_nodes[s].size())
                throw encoding_error("1-D log code failed its exactness audit");
    }
    return block;
}

// ---------------------------------------------------------------------------
// encode_simplex_surface
// ---------------------------------------------------------------------------

namespace {

// Serpentine traversal of the triangulation: cells row-major in x with
// alternating y-direction per row, triangles within a cell alternating too,
// so consecutive simplices in the walk are geometric neighbours.
std::vector<int> serpentine_order(int cells_x, int cells_y) {
    std::vector<int> order;
    order.reserve(static_cast<size_t>(cells_x) * cells_y * 2);
    bool fwd_triangle = true;
    for (int ix = 0; ix < cells_x; ++ix) {
        const bool fwd_row = ix % 2 == 0;
        for (int step = 0; step < cells_y; ++step) {
            const int iy = fwd_row ? step : cells_y - 1 - step;
            const int cell = ix * cells_y + iy;
            if (fwd_triangle) {
                order.push_back(2 * cell);
                order.push_back(2 * cell + 1);
            } else {
                order.push_back(2 * cell + 1);
                order.push_back(2 * cell);
            }
            fwd_triangle = !fwd_triangle;
        }
    }
    return order;
}

}  // namespace

EncodedBlock encode_simplex_surface(MilpModel& m, const SimplexSurface& s, VarRef x1, VarRef x2,
                                    VarRef y, const std::string& tag) {
    if (s.simplex_count() < 2) throw encoding_error("degenerate triangulation");
    require_bounds_within(m, x1, s.grid_x.front(), s.grid_x.back(), "encode_simplex_surface");
    require_bounds_within(m, x2, s.grid_y.front(), s.grid_y.back(), "encode_simplex_surface");

    EncodedBlock block;
    block.output_var = y;
    block.input_vars = {x1, x2};

    const int nodes = s.node_count();
    LinExpr sum, xs, ys, vs;
    for (int v = 0; v < nodes; ++v) {
        VarRef l = m.add_continuous(tag + "_l" + std::to_string(v), 0.0, 1.0);
        block.lambda_vars.push_back(l);
        sum.add(l, 1.0);
        xs.add(l, s.node_x(v));
        ys.add(l, s.node_y(v));
        vs.add(l, s.node_values[v]);
    }
    m.add_constraint(sum, Relation::equal, 1.0, tag + "_sum");
    m.add_constraint(xs - LinExpr(x1), Relation::equal, 0.0, tag + "_x1");
    m.add_constraint(ys - LinExpr(x2), Relation::equal, 0.0, tag + "_x2");
    m.add_constraint(vs - LinExpr(y), Relation::equal, 0.0, tag + "_y");

    const int count = s.simplex_count();
    const int bits = ceil_log2(count);
    block.binaries_used = bits;

    std::vector<std::vector<int>> piece_nodes(count);
    for (int p = 0; p < count; ++p)
        piece_nodes[p].assign(s.triangulation[p].begin(), s.triangulation[p].end());

    // Serpentine Gray code over the triangulation walk.
    const int cells_x = s.nx() - 1, cells_y = s.ny() - 1;
    const std::vector<int> order = serpentine_order(cells_x, cells_y);
    std::vector<uint32_t> code(count);
    for (int pos = 0; pos < count; ++pos) code[order[pos]] = gray(static_cast<uint32_t>(pos));

    // When branching on aggregated node lambdas provably confines the weights
    // to single simplices, that compact form suffices.
    auto allowed = allowed_nodes_per_piece(piece_nodes, code, bits, nodes);
    bool aggregated_exact = true;
    for (int p = 0; p < count && aggregated_exact; ++p) {
        std::set<int> tri(piece_nodes[p].begin(), piece_nodes[p].end());
        for (int v : allowed[p])
            if (!tri.count(v)) aggregated_exact = false;
    }
    block.piece_exact = true;
    if (aggregated_exact) {
        add_log_branching(m, block.lambda_vars, piece_nodes, code, bits, block.binary_vars, tag);
        return block;
    }

    // Otherwise disaggregate: one weight per simplex vertex, node lambdas as
    // their sums. Any code is exact in this form and unused codewords admit
    // no weight at all.
    std::vector<LinExpr> node_weight(nodes);
    std::vector<LinExpr> piece_weight(count);
    for (int p = 0; p < count; ++p) {
        for (int corner = 0; corner < 3; ++corner) {
            const int v = s.triangulation[p][corner];
            VarRef w = m.add_continuous(
                tag + "_w" + std::to_string(p) + "_" + std::to_string(corner), 0.0, 1.0);
            node_weight[v].add(w, 1.0);
            piece_weight[p].add(w, 1.0);
        }
    }
    for (int v = 0; v < nodes; ++v) {
        LinExpr e = node_weight[v];
        e.add(block.lambda_vars[v], -1.0);
        m.add_constraint(e, Relation::equal, 0.0, tag + "_agg" + std::to_string(v));
    }
    for (int l = 0; l < bits; ++l) {
        VarRef b = m.add_binary(tag + "_b" + std::to_string(l));
        block.binary_vars.push_back(b);
        LinExpr on_side_set, on_side_clear;
        for (int p = 0; p < count; ++p) {
            if ((code[p] >> l) & 1u)
                on_side_set.add(piece_weight[p], 1.0);
            else
                on_side_clear.add(piece_weight[p], 1.0);
        }
        LinExpr up = on_side_set;
        up.add(b, -1.0);
        m.add_constraint(up, Relation::less_equal, 0.0, tag + "_bit" + std::to_string(l) + "p");
        LinExpr down = on_side_clear;
        down.add(b, 1.0);
        m.add_constraint(down, Relation::less_equal, 1.0, tag + "_bit" + std::to_string(l) + "n");
    }
    return block;
}

// ---------------------------------------------------------------------------
// encode_plane_envelope
// ---------------------------------------------------------------------------

EncodedBlock encode_plane_envelope(MilpModel& m, const PlaneEnvelope& e,
                                   const std::vector<VarRef>& inputs, VarRef y,
                                   bool minimized_direction, const std::string& tag) {
    if (!minimized_direction)
        throw encoding_error("plane envelope requires the minimized-objective direction");
    if (static_cast<int>(inputs.size()) != e.input_dim)
        throw encoding_error("plane envelope input arity mismatch");

    EncodedBlock block;
    block.output_var = y;
    block.input_vars = inputs;

    std::vector<PlaneEnvelope::Plane> distinct;
    for (const auto& p : e.planes) {
        bool dup = false;
        for (const auto& q : distinct) {
            double diff = std::fabs(q.intercept - p.intercept);
            for (int d = 0; d < e.input_dim; ++d) diff += std::fabs(q.coeffs[d] - p.coeffs[d]);
            if (diff < 1e-12) dup = true;
        }
        if (!dup) distinct.push_back(p);
    }
    int k = 0;
    for (const auto& p : distinct) {
        LinExpr expr(y);
        for (int d = 0; d < e.input_dim; ++d) expr.add(inputs[d], -p.coeffs[d]);
        m.add_constraint(expr, Relation::greater_equal, p.intercept,
                         tag + "_p" + std::to_string(k++));
    }
    return block;
}

// ---------------------------------------------------------------------------
// encode_bilinear_product
// ---------------------------------------------------------------------------

double bilinear_error_bound(const std::vector<double>& grid_x, const std::vector<double>& grid_y,
                            bool piece_exact) {
    double worst = 0.0;
    for (size_t i = 0; i + 1 < grid_x.size(); ++i)
        for (size_t j = 0; j + 1 < grid_y.size(); ++j)
            worst = std::max(worst,
                             (grid_x[i + 1] - grid_x[i]) * (grid_y[j + 1] - grid_y[j]));
    return piece_exact ? worst / 4.0 : worst / 2.0;
}

EncodedBlock encode_bilinear_product(MilpModel& m, VarRef x, VarRef y, VarRef z, int nx, int ny,
                                     const std::string& tag) {
    const auto& dx = m.variable(x);
    const auto& dy = m.variable(y);
    if (!std::isfinite(dx.lower) || !std::isfinite(dx.upper) || !std::isfinite(dy.lower) ||
        !std::isfinite(dy.upper))
        throw encoding_error("bilinear product requires finite bounds on both factors");

    EncodedBlock block;
    block.output_var = z;
    block.input_vars = {x, y};

    // Zero-width factors collapse to a linear tie.
    if (dx.upper - dx.lower <= 0.0) {
        const double c = dx.lower;
        m.add_constraint(LinExpr(z) - LinExpr(y) * c, Relation::equal, 0.0, tag + "_fixx");
        return block;
    }
    if (dy.upper - dy.lower <= 0.0) {
        const double c = dy.lower;
        m.add_constraint(LinExpr(z) - LinExpr(x) * c, Relation::equal, 0.0, tag + "_fixy");
        return block;
    }

    SimplexSurface s = build_simplex_surface([](double a, double b) { return a * b; }, dx.lower,
                                             dx.upper, dy.lower, dy.upper, nx, ny);
    return encode_simplex_surface(m, s, x, y, z, tag);
}

}  // namespace henopt
