#include "henopt/superstructure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "henopt/errors.hpp"

namespace henopt {

namespace {

constexpr double kDutyThreshold = 1e-3;  // kW; matches below are dropped
constexpr double kTempCapLow = 0.0, kTempCapHigh = 900.0;

struct Range {
    double lo = 0.0, hi = 0.0;
    double span() const { return hi - lo; }
};

Range temp_range(const StreamDef& s, const OperatingVariable& ov) {
    const double tin_lo = s.t_in.min_over(ov.lower, ov.upper);
    const double tin_hi = s.t_in.max_over(ov.lower, ov.upper);
    const double tout_lo = s.t_out.min_over(ov.lower, ov.upper);
    const double tout_hi = s.t_out.max_over(ov.lower, ov.upper);
    Range r{std::min(tin_lo, tout_lo), std::max(tin_hi, tout_hi)};
    r.lo = std::clamp(r.lo, kTempCapLow, kTempCapHigh);
    r.hi = std::clamp(r.hi, kTempCapLow, kTempCapHigh);
    return r;
}

double max_duty(const StreamDef& s, const OperatingVariable& ov) {
    if (s.kind == StreamKind::cs) {
        const double span = s.t_in.value_at(ov.lower) - s.t_out.free_lower();
        return s.f.free_upper() * std::max(0.0, span);
    }
    // Parameters are monotone PWL models; sampling breakpoints and a modest
    // grid bounds the product safely for the near-linear reconstructions.
    double best = 0.0;
    for (int k = 0; k <= 16; ++k) {
        const double u = ov.lower + (ov.upper - ov.lower) * k / 16.0;
        const double q =
            s.f.value_at(u) * std::fabs(s.t_in.value_at(u) - s.t_out.value_at(u));
        best = std::max(best, q);
    }
    return best;
}

std::string mangle(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return out;
}

}  // namespace

double big_m_for_pair(const StreamDef& hot, const StreamDef& cold, double dt_min) {
    OperatingVariable ov{"", hot.op_lower, hot.op_upper};
    // No exchange is possible unless the hot stream's hottest temperature
    // clears the cold stream's coldest by the minimum approach.
    const double hot_top = hot.t_in.max_over(ov.lower, ov.upper);
    const double cold_bottom = cold.t_in.min_over(ov.lower, ov.upper);
    if (hot_top < cold_bottom + dt_min) return 0.0;
    return std::min(max_duty(hot, ov), max_duty(cold, ov));
}

// ---------------------------------------------------------------------------
// build_hen
// ---------------------------------------------------------------------------

namespace {

// Stage-duty surface f(u, dt) = F(u) * dt with the dt grid refined until the
// per-cell interpolation bound is small against the stream's duty scale.
SimplexSurface stage_duty_surface(const StreamDef& s, const OperatingVariable& ov,
                                  double dt_span, double duty_scale) {
    const Pwl1D& f_model = s.f.pwl_model();
    std::vector<double> grid_u = f_model.breakpoints;
    if (grid_u.front() > ov.lower) grid_u.front() = ov.lower;
    if (grid_u.back() < ov.upper) grid_u.back() = ov.upper;

    double slope_max = 0.0;
    for (int seg = 0; seg < f_model.segments(); ++seg)
        slope_max = std::max(slope_max, std::fabs(f_model.slope(seg)));
    double du_max = 0.0;
    for (size_t i = 0; i + 1 < grid_u.size(); ++i)
        du_max = std::max(du_max, grid_u[i + 1] - grid_u[i]);

    const double tol = std::max(0.01 * duty_scale, 0.02);
    int cells = 1;
    while (cells < 8 && du_max * (dt_span / cells) * slope_max / 4.0 > tol) cells *= 2;

    std::vector<double> grid_dt(cells + 1);
    for (int i = 0; i <= cells; ++i) grid_dt[i] = dt_span * i / cells;
    auto f = [&](double u, double dt) { return f_model.evaluate(u) * dt; };
    return build_simplex_surface(f, std::move(grid_u), std::move(grid_dt));
}

// Geometric grid between lo and hi (both > 0 apart), densest near lo.
std::vector<double> geometric_grid(double lo, double hi, int cells) {
    std::vector<double> g(cells + 1);
    const double ratio = std::pow(hi / std::max(lo, 1e-6), 1.0 / cells);
    double v = std::max(lo, 1e-6);
    for (int i = 0; i <= cells; ++i) {
        g[i] = (i == 0) ? lo : std::min(hi, v);
        v *= ratio;
    }
    g[cells] = hi;
    return g;
}

}  // namespace

HenBlock build_hen(MilpModel& m, const CaseDefinition& c, HenMode mode) {
    HenBlock h;
    h.case_def = &c;
    h.mode = mode;
    h.stages = c.hen_config.n_stages;
    const int ns = h.stages;
    const auto& ov = c.opvar;
    const double dt_min = c.hen_config.dt_min;

    for (const auto& s : c.streams)
        (s.kind == StreamKind::cold ? h.cold : h.hot).push_back(&s);
    const int nh = h.hot_count(), nc = h.cold_count();

    const double u_lo = mode.coupled ? ov.lower : mode.fixed_u;
    const double u_hi = mode.coupled ? ov.upper : mode.fixed_u;
    if (!mode.coupled && (mode.fixed_u < ov.lower - 1e-12 || mode.fixed_u > ov.upper + 1e-12))
        throw domain_error("fixed operating point outside the operating range");
    h.opvar = m.add_continuous("u", u_lo, u_hi);

    auto eval_or_range = [&](const ParamModel& p) {
        return Range{p.min_over(u_lo, u_hi), p.max_over(u_lo, u_hi)};
    };

    // --- per-stream containers
    h.t_hot.resize(nh);
    h.t_cold.resize(nc);
    h.q_stage_hot.assign(nh, {});
    h.q_stage_cold.assign(nc, {});
    h.q_total_hot.resize(nh);
    h.q_total_cold.resize(nc);
    h.q_cu.resize(nh);
    h.z_cu.resize(nh);
    h.q_hu.resize(nc);
    h.z_hu.resize(nc);
    h.cs_flow.resize(nh);
    h.cs_t_out.resize(nh);
    h.q_total_tol_hot.assign(nh, 0.0);
    h.q_total_tol_cold.assign(nc, 0.0);
    h.stage_tol_hot.assign(nh, std::vector<double>(ns, 0.0));
    h.stage_tol_cold.assign(nc, std::vector<double>(ns, 0.0));

    // Builds temperatures, stage duties and the overall balance for one
    // process stream (hot or cold orientation).
    auto build_process_stream = [&](const StreamDef& s, bool hot_side, int idx) {
        const std::string tag = mangle(s.id);
        const Range tr = temp_range(s, ov);
        const double q_max = max_duty(s, ov);

        auto& temps = hot_side ? h.t_hot[idx] : h.t_cold[idx];
        temps.resize(ns + 1);
        for (int l = 0; l <= ns; ++l)
            temps[l] = m.add_continuous("t_" + tag + "_" + std::to_string(l), tr.lo, tr.hi);

        // Inlet boundary: hot streams enter at location 0, cold at location ns.
        const ParamModel& inlet = s.t_in;
        VarRef t_inlet = hot_side ? temps[0] : temps[ns];
        if (inlet.is_constant() || !mode.coupled) {
            const double v = inlet.value_at(u_lo);
            m.set_bounds(t_inlet, v, v);
        } else {
            encode_pwl1d(m, inlet.pwl_model(), h.opvar, t_inlet, PwlUse::exact, tag + "_tin");
        }

        // Monotone non-increasing along locations for both orientations.
        for (int l = 0; l < ns; ++l) {
            LinExpr e = LinExpr(temps[l]) - LinExpr(temps[l + 1]);
            m.add_constraint(e, Relation::greater_equal, 0.0,
                             tag + "_mono" + std::to_string(l));
        }

        // Stage drops and duties.
        auto& qs = hot_side ? h.q_stage_hot[idx] : h.q_stage_cold[idx];
        qs.resize(ns);
        const bool f_const = s.f.is_constant() || !mode.coupled;
        std::optional<SimplexSurface> surface;
        if (!f_const) {
            surface = stage_duty_surface(s, ov, tr.span(), q_max);
            if (hot_side)
                h.stage_surface_hot[idx] = surface;
            else
                h.stage_surface_cold[idx] = surface;
        }
        for (int k = 0; k < ns; ++k) {
            VarRef dts = m.add_continuous("dts_" + tag + "_" + std::to_string(k), 0.0, tr.span());
            LinExpr tie = LinExpr(temps[k]) - LinExpr(temps[k + 1]) - LinExpr(dts);
            m.add_constraint(tie, Relation::equal, 0.0, tag + "_drop" + std::to_string(k));
            qs[k] = m.add_continuous("qs_" + tag + "_" + std::to_string(k), 0.0,
                                     std::max(q_max, 1e-9));
            if (f_const) {
                const double f_val = s.f.is_constant() ? s.f.value_at(u_lo) : s.f.value_at(u_lo);
                LinExpr e = LinExpr(qs[k]) - LinExpr(dts) * f_val;
                m.add_constraint(e, Relation::equal, 0.0, tag + "_qs" + std::to_string(k));
            } else {
                encode_simplex_surface(m, *surface, h.opvar, dts, qs[k],
                                       tag + "_qs" + std::to_string(k));
                double tol = 0.0;
                const auto& gu = surface->grid_x;
                const auto& gd = surface->grid_y;
                double slope_max = 0.0;
                for (int seg = 0; seg < s.f.pwl_model().segments(); ++seg)
                    slope_max = std::max(slope_max, std::fabs(s.f.pwl_model().slope(seg)));
                for (size_t a = 0; a + 1 < gu.size(); ++a)
                    for (size_t b = 0; b + 1 < gd.size(); ++b)
                        tol = std::max(tol, (gu[a + 1] - gu[a]) * (gd[b + 1] - gd[b]) *
                                                slope_max / 4.0);
                (hot_side ? h.stage_tol_hot[idx][k] : h.stage_tol_cold[idx][k]) = tol;
            }
        }

        // Whole-stream duty as a function of the operating point.
        VarRef q_total = m.add_continuous("Q_" + tag, 0.0, std::max(q_max, 1e-9));
        (hot_side ? h.q_total_hot[idx] : h.q_total_cold[idx]) = q_total;
        const bool all_const = s.t_in.is_constant() && s.t_out.is_constant() && s.f.is_constant();
        if (all_const || !mode.coupled) {
            const double v = s.f.value_at(u_lo) *
                             std::fabs(s.t_in.value_at(u_lo) - s.t_out.value_at(u_lo));
            m.set_bounds(q_total, v, v);
        } else {
            std::vector<Sample1D> samples;
            for (int k = 0; k <= 8; ++k) {
                const double u = ov.lower + (ov.upper - ov.lower) * k / 8.0;
                samples.push_back(
                    {u, s.f.value_at(u) * std::fabs(s.t_in.value_at(u) - s.t_out.value_at(u))});
            }
            Pwl1D fit = fit_pwl_1d(samples, 5e-4);
            double tol = 0.0;
            for (int k = 0; k <= 100; ++k) {
                const double u = ov.lower + (ov.upper - ov.lower) * k / 100.0;
                const double truth =
                    s.f.value_at(u) * std::fabs(s.t_in.value_at(u) - s.t_out.value_at(u));
                tol = std::max(tol, std::fabs(fit.evaluate(u) - truth));
            }
            (hot_side ? h.q_total_tol_hot[idx] : h.q_total_tol_cold[idx]) = tol;
            m.set_bounds(q_total, fit.min_value(), fit.max_value());
            encode_pwl1d(m, fit, h.opvar, q_total, PwlUse::exact, tag + "_Q");
        }

        // Utility at the stream end plus the overall energy balance.
        VarRef q_util = m.add_continuous((hot_side ? "qcu_" : "qhu_") + tag, 0.0,
                                         std::max(q_max, 1e-9));
        VarRef z_util = m.add_binary((hot_side ? "zcu_" : "zhu_") + tag);
        LinExpr cap = LinExpr(q_util) - LinExpr(z_util) * std::max(q_max, 1e-9);
        m.add_constraint(cap, Relation::less_equal, 0.0, tag + "_ucap");
        if (hot_side) {
            h.q_cu[idx] = q_util;
            h.z_cu[idx] = z_util;
        } else {
            h.q_hu[idx] = q_util;
            h.z_hu[idx] = z_util;
        }
        LinExpr balance;
        for (int k = 0; k < ns; ++k) balance.add(qs[k], 1.0);
        balance.add(q_util, 1.0);
        balance.add(q_total, -1.0);
        m.add_constraint(balance, Relation::equal, 0.0, tag + "_balance");
    };

    // Combustion-system stream: free flow capacity and outlet temperature,
    // one bilinear block for the total duty, per-stage McCormick bounds.
    auto build_cs_stream = [&](const StreamDef& s, int idx) {
        const std::string tag = mangle(s.id);
        const double t_in = s.t_in.value_at(u_lo);
        const double to_lo = s.t_out.free_lower(), to_hi = s.t_out.free_upper();
        const double f_lo = s.f.free_lower(), f_hi = s.f.free_upper();
        const double dt_lo = t_in - to_hi, dt_hi = t_in - to_lo;
        const double q_max = f_hi * dt_hi;

        auto& temps = h.t_hot[idx];
        temps.resize(ns + 1);
        for (int l = 0; l <= ns; ++l) {
            const double lo = (l == ns) ? to_lo : to_lo;
            const double hi = (l == 0) ? t_in : (l == ns ? to_hi : t_in);
            temps[l] = m.add_continuous("t_" + tag + "_" + std::to_string(l), lo, hi);
        }
        m.set_bounds(temps[0], t_in, t_in);
        h.cs_t_out[idx] = temps[ns];

        for (int l = 0; l < ns; ++l)
            m.add_constraint(LinExpr(temps[l]) - LinExpr(temps[l + 1]), Relation::greater_equal,
                             0.0, tag + "_mono" + std::to_string(l));

        VarRef flow = m.add_continuous("F_" + tag, f_lo, f_hi);
        h.cs_flow[idx] = flow;
        VarRef dt_total = m.add_continuous("dtt_" + tag, dt_lo, dt_hi);
        m.add_constraint(LinExpr(temps[ns]) + LinExpr(dt_total), Relation::equal, t_in,
                         tag + "_dtt");

        VarRef q_total = m.add_continuous("Q_" + tag, 0.0, q_max);
        h.q_total_hot[idx] = q_total;
        SimplexSurface surf = build_simplex_surface(
            [](double f, double dt) { return f * dt; },
            [&] {
                std::vector<double> g(5);
                for (int i = 0; i < 5; ++i) g[i] = f_lo + (f_hi - f_lo) * i / 4.0;
                return g;
            }(),
            geometric_grid(dt_lo, dt_hi, 8));
        h.cs_surface[idx] = surf;
        encode_simplex_surface(m, surf, flow, dt_total, q_total, tag + "_Q");

        auto& qs = h.q_stage_hot[idx];
        qs.resize(ns);
        LinExpr balance;
        for (int k = 0; k < ns; ++k) {
            VarRef dts = m.add_continuous("dts_" + tag + "_" + std::to_string(k), 0.0, dt_hi);
            m.add_constraint(LinExpr(temps[k]) - LinExpr(temps[k + 1]) - LinExpr(dts),
                             Relation::equal, 0.0, tag + "_drop" + std::to_string(k));
            qs[k] = m.add_continuous("qs_" + tag + "_" + std::to_string(k), 0.0, q_max);
            // Flow-capacity bounds tie stage duty to stage drop.
            m.add_constraint(LinExpr(qs[k]) - LinExpr(dts) * f_lo, Relation::greater_equal, 0.0,
                             tag + "_mcl" + std::to_string(k));
            m.add_constraint(LinExpr(qs[k]) - LinExpr(dts) * f_hi, Relation::less_equal, 0.0,
                             tag + "_mcu" + std::to_string(k));
            balance.add(qs[k], 1.0);
        }
        balance.add(q_total, -1.0);
        m.add_constraint(balance, Relation::equal, 0.0, tag + "_balance");
        h.q_cu[idx] = VarRef{};
        h.z_cu[idx] = VarRef{};
    };

    h.stage_surface_hot.assign(nh, std::nullopt);
    h.stage_surface_cold.assign(nc, std::nullopt);
    h.cs_surface.assign(nh, std::nullopt);

    for (int i = 0; i < nh; ++i) {
        if (h.is_cs(i))
            build_cs_stream(*h.hot[i], i);
        else
            build_process_stream(*h.hot[i], true, i);
    }
    for (int j = 0; j < nc; ++j) build_process_stream(*h.cold[j], false, j);

    // --- matches
    h.big_m.assign(nh, std::vector<double>(nc, 0.0));
    h.gamma.assign(nh, std::vector<double>(nc, 0.0));
    h.q.assign(nh, std::vector<std::vector<VarRef>>(nc, std::vector<VarRef>(ns)));
    h.z = h.q;
    h.dt.assign(nh, std::vector<std::vector<VarRef>>(nc, std::vector<VarRef>(ns + 1)));

    for (int i = 0; i < nh; ++i) {
        const Range th = temp_range(*h.hot[i], ov);
        for (int j = 0; j < nc; ++j) {
            const Range tc = temp_range(*h.cold[j], ov);
            const double big_m = big_m_for_pair(*h.hot[i], *h.cold[j], dt_min);
            h.big_m[i][j] = big_m;
            if (big_m <= 0.0) continue;
            const double dt_ub = std::max(dt_min, th.hi - tc.lo);
            h.gamma[i][j] = std::max(dt_min, dt_ub + tc.hi - th.lo);

            const std::string pair = mangle(h.hot[i]->id) + "_" + mangle(h.cold[j]->id);
            for (int l = 0; l <= ns; ++l)
                h.dt[i][j][l] = m.add_continuous("dt_" + pair + "_" + std::to_string(l), dt_min,
                                                 dt_ub);
            for (int k = 0; k < ns; ++k) {
                h.q[i][j][k] =
                    m.add_continuous("q_" + pair + "_" + std::to_string(k + 1), 0.0, big_m);
                h.z[i][j][k] = m.add_binary("z_" + pair + "_" + std::to_string(k + 1));
                m.add_constraint(LinExpr(h.q[i][j][k]) - LinExpr(h.z[i][j][k]) * big_m,
                                 Relation::less_equal, 0.0,
                                 "cap_" + pair + "_" + std::to_string(k + 1));
                // Approach constraints at both stage boundaries.
                for (int l = k; l <= k + 1; ++l) {
                    LinExpr e = LinExpr(h.dt[i][j][l]) - LinExpr(h.t_hot[i][l]) +
                                LinExpr(h.t_cold[j][l]) + LinExpr(h.z[i][j][k]) * h.gamma[i][j];
                    m.add_constraint(e, Relation::less_equal, h.gamma[i][j],
                                     "app_" + pair + "_" + std::to_string(k + 1) + "_" +
                                         std::to_string(l));
                }
            }
        }
    }

    // Stage balances: stage duty equals the sum of its matches.
    for (int i = 0; i < nh; ++i) {
        for (int k = 0; k < ns; ++k) {
            LinExpr e(h.q_stage_hot[i][k]);
            for (int j = 0; j < nc; ++j)
                if (h.pair_active(i, j)) e.add(h.q[i][j][k], -1.0);
            m.add_constraint(e, Relation::equal, 0.0,
                             "stage_" + mangle(h.hot[i]->id) + "_" + std::to_string(k + 1));
        }
    }
    for (int j = 0; j < nc; ++j) {
        for (int k = 0; k < ns; ++k) {
            LinExpr e(h.q_stage_cold[j][k]);
            for (int i = 0; i < nh; ++i)
                if (h.pair_active(i, j)) e.add(h.q[i][j][k], -1.0);
            m.add_constraint(e, Relation::equal, 0.0,
                             "stage_" + mangle(h.cold[j]->id) + "_" + std::to_string(k + 1));
        }
    }

    return h;
}

// ---------------------------------------------------------------------------
// Extraction and structural checks
// ---------------------------------------------------------------------------

double chen_lmtd(double dt1, double dt2) {
    dt1 = std::max(dt1, 1e-9);
    dt2 = std::max(dt2, 1e-9);
    return std::cbrt(dt1 * dt2 * 0.5 * (dt1 + dt2));
}

double HenDesign::total_match_duty() const {
    double s = 0.0;
    for (const auto& m : matches) s += m.duty;
    return s;
}

double HenDesign::total_cold_utility() const {
    double s = 0.0;
    for (const auto& u : cold_utilities) s += u.duty;
    return s;
}

double HenDesign::total_hot_utility() const {
    double s = 0.0;
    for (const auto& u : hot_utilities) s += u.duty;
    return s;
}

HenDesign extract_design(const Solution& sol, const HenBlock& h, const CaseDefinition& c) {
    if (!sol.has_solution()) throw solver_error("extract_design: solution carries no assignment");
    HenDesign d;
    d.u = sol.value(h.opvar);
    const int ns = h.stages;

    for (int i = 0; i < h.hot_count(); ++i) {
        for (int j = 0; j < h.cold_count(); ++j) {
            if (!h.pair_active(i, j)) continue;
            for (int k = 0; k < ns; ++k) {
                if (sol.value(h.z[i][j][k]) < 0.5) continue;
                const double duty = sol.value(h.q[i][j][k]);
                if (duty < kDutyThreshold) {
                    ++d.spurious_z;
                    continue;
                }
                HenMatch match;
                match.hot_id = h.hot[i]->id;
                match.cold_id = h.cold[j]->id;
                match.stage = k + 1;
                match.duty = duty;
                match.lmtd = chen_lmtd(sol.value(h.dt[i][j][k]), sol.value(h.dt[i][j][k + 1]));
                const double u_coeff = 0.5 * (h.hot[i]->u_coeff + h.cold[j]->u_coeff);
                match.area = duty / (u_coeff * match.lmtd);
                d.matches.push_back(std::move(match));
            }
        }
    }

    for (int i = 0; i < h.hot_count(); ++i) {
        if (h.is_cs(i)) {
            d.cs_settings.push_back(
                {h.hot[i]->id, sol.value(h.cs_t_out[i]), sol.value(h.cs_flow[i])});
            continue;
        }
        if (!h.z_cu[i].valid() || sol.value(h.z_cu[i]) < 0.5) continue;
        const double duty = sol.value(h.q_cu[i]);
        if (duty < kDutyThreshold) {
            ++d.spurious_z;
            continue;
        }
        HenUtility u;
        u.stream_id = h.hot[i]->id;
        u.duty = duty;
        const auto& cu = c.hen_config.cold_utility;
        const double t_end = sol.value(h.t_hot[i][ns]);
        const double t_out = h.hot[i]->t_out.value_at(d.u);
        u.lmtd = chen_lmtd(t_end - cu.t_out, t_out - cu.t_in);
        u.area = duty / (h.hot[i]->u_coeff * u.lmtd);
        d.cold_utilities.push_back(std::move(u));
    }
    for (int j = 0; j < h.cold_count(); ++j) {
        if (sol.value(h.z_hu[j]) < 0.5) continue;
        const double duty = sol.value(h.q_hu[j]);
        if (duty < kDutyThreshold) {
            ++d.spurious_z;
            continue;
        }
        HenUtility u;
        u.stream_id = h.cold[j]->id;
        u.duty = duty;
        const auto& hu = c.hen_config.hot_utility;
        const double t_first = sol.value(h.t_cold[j][0]);
        const double t_out = h.cold[j]->t_out.value_at(d.u);
        u.lmtd = chen_lmtd(hu.t_in - t_out, hu.t_out - t_first);
        u.area = duty / (h.cold[j]->u_coeff * u.lmtd);
        d.hot_utilities.push_back(std::move(u));
    }

    d.hex_count = static_cast<int>(d.matches.size() + d.cold_utilities.size() +
                                   d.hot_utilities.size());
    return d;
}

std::vector<std::string> check_solution_structure(const Solution& sol, const HenBlock& h,
                                                  const CaseDefinition& c) {
    std::vector<std::string> out;
    if (!sol.has_solution()) {
        out.push_back("no solution to check");
        return out;
    }
    const double u = sol.value(h.opvar);
    const int ns = h.stages;
    const double dt_min = c.hen_config.dt_min;

    auto cell_tol = [](const SimplexSurface& s, double x, double y, double slope) {
        auto itx = std::upper_bound(s.grid_x.begin(), s.grid_x.end(), x);
        auto ity = std::upper_bound(s.grid_y.begin(), s.grid_y.end(), y);
        const int ix = std::clamp(static_cast<int>(itx - s.grid_x.begin()) - 1, 0, s.nx() - 2);
        const int iy = std::clamp(static_cast<int>(ity - s.grid_y.begin()) - 1, 0, s.ny() - 2);
        return (s.grid_x[ix + 1] - s.grid_x[ix]) * (s.grid_y[iy + 1] - s.grid_y[iy]) * slope /
               4.0;
    };

    // Per-stream balances against the true operating-point duty.
    auto check_stream = [&](const StreamDef& s, bool hot_side, int idx) {
        const std::string& id = s.id;
        double truth = 0.0;
        if (s.kind == StreamKind::cs) {
            const double flow = sol.value(h.cs_flow[idx]);
            const double dtt = s.t_in.value_at(u) - sol.value(h.cs_t_out[idx]);
            truth = flow * dtt;
        } else {
            auto [t_in, t_out, f] = stream_parameter_at(s, u);
            truth = f * std::fabs(t_in - t_out);
        }
        const VarRef q_total = hot_side ? h.q_total_hot[idx] : h.q_total_cold[idx];
        double tol = hot_side ? h.q_total_tol_hot[idx] : h.q_total_tol_cold[idx];
        if (s.kind == StreamKind::cs && h.cs_surface[idx]) {
            const double flow = sol.value(h.cs_flow[idx]);
            const double dtt = s.t_in.value_at(u) - sol.value(h.cs_t_out[idx]);
            tol += cell_tol(*h.cs_surface[idx], flow, dtt, 1.0);
        }
        const double resid = std::fabs(sol.value(q_total) - truth);
        if (resid > tol + 1e-6 * std::max(1.0, truth) + 1e-5) {
            std::ostringstream msg;
            msg << id << ": whole-stream duty residual " << resid << " exceeds tolerance " << tol;
            out.push_back(msg.str());
        }

        // Stage duties against F(u) * stage drop.
        const auto& temps = hot_side ? h.t_hot[idx] : h.t_cold[idx];
        const auto& qs = hot_side ? h.q_stage_hot[idx] : h.q_stage_cold[idx];
        for (int k = 0; k < ns; ++k) {
            const double drop = sol.value(temps[k]) - sol.value(temps[k + 1]);
            double f_val = 0.0;
            double stage_tol = 1e-5;
            if (s.kind == StreamKind::cs) {
                f_val = sol.value(h.cs_flow[idx]);
                // stage duty only bracketed by the flow-capacity bounds
                const double lo = s.f.free_lower() * drop - 1e-5;
                const double hi = s.f.free_upper() * drop + 1e-5;
                const double v = sol.value(qs[k]);
                if (v < lo - 1e-6 || v > hi + 1e-6) {
                    std::ostringstream msg;
                    msg << id << " stage " << k + 1 << ": duty " << v
                        << " outside flow-capacity band [" << lo << ", " << hi << "]";
                    out.push_back(msg.str());
                }
                continue;
            }
            f_val = s.f.is_constant() ? s.f.value_at(u) : s.f.value_at(u);
            const auto& surf = hot_side ? h.stage_surface_hot[idx] : h.stage_surface_cold[idx];
            if (surf) {
                double slope_max = 0.0;
                for (int seg = 0; seg < s.f.pwl_model().segments(); ++seg)
                    slope_max = std::max(slope_max, std::fabs(s.f.pwl_model().slope(seg)));
                stage_tol += cell_tol(*surf, u, drop, slope_max);
            }
            const double resid_k = std::fabs(sol.value(qs[k]) - f_val * drop);
            if (resid_k > stage_tol + 1e-6 * std::max(1.0, f_val * drop)) {
                std::ostringstream msg;
                msg << id << " stage " << k + 1 << ": duty residual " << resid_k
                    << " exceeds tolerance " << stage_tol;
                out.push_back(msg.str());
            }
        }

        // Monotone stage temperatures.
        for (int l = 0; l < ns; ++l)
            if (sol.value(temps[l]) < sol.value(temps[l + 1]) - 1e-6)
                out.push_back(id + ": stage temperatures not monotone at location " +
                              std::to_string(l));
    };

    for (int i = 0; i < h.hot_count(); ++i) check_stream(*h.hot[i], true, i);
    for (int j = 0; j < h.cold_count(); ++j) check_stream(*h.cold[j], false, j);

    // Match activity: approaches when on, zero duty when off.
    for (int i = 0; i < h.hot_count(); ++i) {
        for (int j = 0; j < h.cold_count(); ++j) {
            if (!h.pair_active(i, j)) continue;
            for (int k = 0; k < ns; ++k) {
                const bool on = sol.value(h.z[i][j][k]) > 0.5;
                const double duty = sol.value(h.q[i][j][k]);
                const std::string what = h.hot[i]->id + "-" + h.cold[j]->id + " stage " +
                                         std::to_string(k + 1);
                if (!on) {
                    if (duty > 1e-9 + 1e-7 * h.big_m[i][j])
                        out.push_back(what + ": inactive match carries duty " +
                                      std::to_string(duty));
                    continue;
                }
                if (duty < kDutyThreshold) continue;  // spurious existence, no physics to check
                for (int l = k; l <= k + 1; ++l) {
                    const double approach =
                        sol.value(h.t_hot[i][l]) - sol.value(h.t_cold[j][l]);
                    if (approach < dt_min - 1e-6)
                        out.push_back(what + ": approach " + std::to_string(approach) +
                                      " below the minimum at location " + std::to_string(l));
                }
            }
        }
    }
    return out;
}

}  // namespace henopt
