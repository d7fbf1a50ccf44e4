#include "henopt/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "henopt/errors.hpp"

namespace henopt {

namespace {

double clamp_lo(double v, double lo) { return std::max(v, lo); }

std::string mangle(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return out;
}

// Variable area-cost term c_v * (q / (U * chen(dt1, dt2)))^beta.
double area_cost(double q, double dt1, double dt2, double u_coeff, double c_v, double beta) {
    if (q <= 0.0) return 0.0;
    return c_v * std::pow(q / (u_coeff * chen_lmtd(dt1, dt2)), beta);
}

}  // namespace

ObjectiveBoxes propagate_boxes(const CaseDefinition& c) {
    ObjectiveBoxes b;
    const auto& perf = c.performance;
    b.h_lo = perf.h_dot_prod.min_value();
    b.h_hi = perf.h_dot_prod.max_value();
    b.m_lo = perf.m_prod_total.min_value();
    b.m_hi = perf.m_prod_total.max_value();

    double cu_cap = 0.0, hu_cap = 0.0;
    OperatingVariable ov = c.opvar;
    for (const auto& s : c.streams) {
        const double f_hi = s.f.is_free() ? s.f.free_upper() : s.f.max_over(ov.lower, ov.upper);
        const double span = s.kind == StreamKind::cs
                                ? s.t_in.value_at(ov.lower) - s.t_out.free_lower()
                                : std::fabs(s.t_in.max_over(ov.lower, ov.upper) -
                                            s.t_out.min_over(ov.lower, ov.upper));
        if (s.kind == StreamKind::hot) cu_cap += f_hi * span;
        if (s.kind == StreamKind::cold) hu_cap += f_hi * span;
    }
    b.p_lo = perf.p_sys.min_value();
    b.p_hi = perf.p_sys.max_value() + c.economics.eps_hu * hu_cap + c.economics.eps_cu * cu_cap;

    const double capex_sys = c.economics.af_inv * c.economics.c_sys;
    double feed_lo = 0.0, feed_hi = 0.0;
    for (const auto& [name, model] : perf.feed_flows) {
        double cost = 0.0;
        for (const auto& [n2, cf] : c.economics.c_feedstock)
            if (n2 == name) cost = cf;
        feed_lo += cost * model.min_value();
        feed_hi += cost * model.max_value();
    }
    const double t = c.economics.t_full_load;
    const double el = c.economics.c_el / 1000.0;
    b.tac_lo = capex_sys + c.economics.af_op * t * (feed_lo + el * b.p_lo);
    // generous headroom for exchanger capital on the high side
    b.tac_hi = capex_sys + c.economics.af_op * t * (feed_hi + el * b.p_hi) + 0.5 * capex_sys;
    return b;
}

VarRef build_p_el(MilpModel& m, const CaseDefinition& c, const HenBlock& hen,
                  ObjectiveBundle& bundle) {
    const auto& perf = c.performance;
    const double ps_lo = perf.p_sys.min_value(), ps_hi = perf.p_sys.max_value();
    bundle.p_sys_var = m.add_continuous("P_sys", ps_lo, ps_hi);
    if (!hen.mode.coupled) {
        const double v = perf.p_sys.evaluate(hen.mode.fixed_u);
        m.set_bounds(bundle.p_sys_var, v, v);
    } else {
        encode_pwl1d(m, perf.p_sys, hen.opvar, bundle.p_sys_var, PwlUse::exact, "psys");
    }

    double cu_cap = 0.0, hu_cap = 0.0;
    for (int i = 0; i < hen.hot_count(); ++i)
        if (hen.q_cu[i].valid()) cu_cap += m.variable(hen.q_cu[i]).upper;
    for (int j = 0; j < hen.cold_count(); ++j) hu_cap += m.variable(hen.q_hu[j]).upper;

    const double eps_hu = c.economics.eps_hu, eps_cu = c.economics.eps_cu;
    bundle.p_el_var =
        m.add_continuous("P_el", ps_lo, ps_hi + eps_hu * hu_cap + eps_cu * cu_cap);
    LinExpr tie(bundle.p_el_var);
    tie.add(bundle.p_sys_var, -1.0);
    for (int i = 0; i < hen.hot_count(); ++i)
        if (hen.q_cu[i].valid()) tie.add(hen.q_cu[i], -eps_cu);
    for (int j = 0; j < hen.cold_count(); ++j) tie.add(hen.q_hu[j], -eps_hu);
    m.add_constraint(tie, Relation::equal, 0.0, "p_el_tie");
    return bundle.p_el_var;
}

void build_capex(MilpModel& m, const CaseDefinition& c, const HenBlock& hen,
                 ObjectiveBundle& bundle) {
    const auto& eco = c.economics;
    bundle.capex_sys = eco.af_inv * eco.c_sys;

    LinExpr area_sum;
    LinExpr count_sum;
    bundle.envelope_overshoot = 0.0;
    const double dt_min = c.hen_config.dt_min;

    // Matches: one 3-input envelope per active pair, reused across stages.
    for (int i = 0; i < hen.hot_count(); ++i) {
        for (int j = 0; j < hen.cold_count(); ++j) {
            if (!hen.pair_active(i, j)) continue;
            const double big_m = hen.big_m[i][j];
            const double dt_ub = m.variable(hen.dt[i][j][0]).upper;
            const double u_coeff = 0.5 * (hen.hot[i]->u_coeff + hen.cold[j]->u_coeff);
            auto f = [&](const std::vector<double>& x) {
                return area_cost(x[0], x[1], x[2], u_coeff, eco.c_v_hex, eco.beta);
            };
            PlaneEnvelope env =
                fit_convex_planes(f, {0.0, dt_min, dt_min}, {big_m, dt_ub, dt_ub}, 8, 9);
            bundle.envelope_overshoot = std::max(bundle.envelope_overshoot, env.max_overshoot);
            const double y_hi = area_cost(big_m, dt_min, dt_min, u_coeff, eco.c_v_hex, eco.beta);
            const std::string pair = mangle(hen.hot[i]->id) + "_" + mangle(hen.cold[j]->id);
            for (int k = 0; k < hen.stages; ++k) {
                VarRef y = m.add_continuous("ac_" + pair + "_" + std::to_string(k + 1), 0.0, y_hi);
                encode_plane_envelope(m, env,
                                      {hen.q[i][j][k], hen.dt[i][j][k], hen.dt[i][j][k + 1]}, y,
                                      true, "env_" + pair + "_" + std::to_string(k + 1));
                bundle.area_cost_vars.push_back(y);
                area_sum.add(y, 1.0);
                count_sum.add(hen.z[i][j][k], 1.0);
            }
        }
    }

    // Utility exchangers: 2-input envelopes in (duty, variable-side approach);
    // the parameter-side approach varies with u by at most a kelvin and is
    // frozen at its operating-range midpoint.
    const auto& ov = c.opvar;
    const double u_mid = hen.mode.coupled ? 0.5 * (ov.lower + ov.upper) : hen.mode.fixed_u;
    for (int i = 0; i < hen.hot_count(); ++i) {
        if (!hen.q_cu[i].valid()) continue;
        const StreamDef& s = *hen.hot[i];
        const auto& cu = c.hen_config.cold_utility;
        const double cap = m.variable(hen.q_cu[i]).upper;
        const double t_lo = m.variable(hen.t_hot[i][hen.stages]).lower;
        const double t_hi = m.variable(hen.t_hot[i][hen.stages]).upper;
        const double dt_fixed = s.t_out.value_at(u_mid) - cu.t_in;
        const double dt_lo = clamp_lo(t_lo - cu.t_out, 0.1);
        const double dt_hi = clamp_lo(t_hi - cu.t_out, dt_lo + 0.1);
        auto f = [&](const std::vector<double>& x) {
            return area_cost(x[0], x[1], dt_fixed, s.u_coeff, eco.c_v_hex, eco.beta);
        };
        PlaneEnvelope env = fit_convex_planes(f, {0.0, dt_lo}, {cap, dt_hi}, 8, 17);
        bundle.envelope_overshoot = std::max(bundle.envelope_overshoot, env.max_overshoot);
        VarRef dt_var = m.add_continuous("dtcu_" + mangle(s.id), dt_lo, dt_hi);
        LinExpr tie(dt_var);
        tie.add(hen.t_hot[i][hen.stages], -1.0);
        m.add_constraint(tie, Relation::equal, -cu.t_out, "dtcu_tie_" + mangle(s.id));
        VarRef y = m.add_continuous("ac_cu_" + mangle(s.id), 0.0,
                                    area_cost(cap, dt_lo, dt_fixed, s.u_coeff, eco.c_v_hex,
                                              eco.beta));
        encode_plane_envelope(m, env, {hen.q_cu[i], dt_var}, y, true, "env_cu_" + mangle(s.id));
        bundle.area_cost_vars.push_back(y);
        area_sum.add(y, 1.0);
        count_sum.add(hen.z_cu[i], 1.0);
    }
    for (int j = 0; j < hen.cold_count(); ++j) {
        const StreamDef& s = *hen.cold[j];
        const auto& hu = c.hen_config.hot_utility;
        const double cap = m.variable(hen.q_hu[j]).upper;
        const double t_lo = m.variable(hen.t_cold[j][0]).lower;
        const double t_hi = m.variable(hen.t_cold[j][0]).upper;
        const double dt_fixed = clamp_lo(hu.t_in - s.t_out.max_over(ov.lower, ov.upper), 0.1);
        const double dt_lo = clamp_lo(hu.t_out - t_hi, 0.1);
        const double dt_hi = clamp_lo(hu.t_out - t_lo, dt_lo + 0.1);
        auto f = [&](const std::vector<double>& x) {
            return area_cost(x[0], x[1], dt_fixed, s.u_coeff, eco.c_v_hex, eco.beta);
        };
        PlaneEnvelope env = fit_convex_planes(f, {0.0, dt_lo}, {cap, dt_hi}, 8, 17);
        bundle.envelope_overshoot = std::max(bundle.envelope_overshoot, env.max_overshoot);
        VarRef dt_var = m.add_continuous("dthu_" + mangle(s.id), dt_lo, dt_hi);
        LinExpr tie(dt_var);
        tie.add(hen.t_cold[j][0], 1.0);
        m.add_constraint(tie, Relation::equal, hu.t_out, "dthu_tie_" + mangle(s.id));
        VarRef y = m.add_continuous("ac_hu_" + mangle(s.id), 0.0,
                                    area_cost(cap, dt_lo, dt_fixed, s.u_coeff, eco.c_v_hex,
                                              eco.beta));
        encode_plane_envelope(m, env, {hen.q_hu[j], dt_var}, y, true, "env_hu_" + mangle(s.id));
        bundle.area_cost_vars.push_back(y);
        area_sum.add(y, 1.0);
        count_sum.add(hen.z_hu[j], 1.0);
    }

    bundle.capex_hen_expr = area_sum * eco.af_inv;
    bundle.capex_hen_expr.add(count_sum, eco.af_inv * eco.c_f_hex);
}

LinExpr build_opex(MilpModel& m, const CaseDefinition& c, const HenBlock& hen,
                   ObjectiveBundle& bundle) {
    if (!bundle.p_el_var.valid())
        throw model_error("build_opex requires the electrical-power variable");
    const auto& eco = c.economics;
    LinExpr feed_cost;
    for (const auto& [name, model] : c.performance.feed_flows) {
        double cost = -1.0;
        for (const auto& [n2, cf] : eco.c_feedstock)
            if (n2 == name) cost = cf;
        if (cost < 0.0)
            throw model_error("feedstock '" + name + "' has no cost entry");
        VarRef flow = m.add_continuous("feed_" + mangle(name), model.min_value(),
                                       model.max_value());
        if (!hen.mode.coupled) {
            const double v = model.evaluate(hen.mode.fixed_u);
            m.set_bounds(flow, v, v);
        } else {
            encode_pwl1d(m, model, hen.opvar, flow, PwlUse::exact, "feed_" + mangle(name));
        }
        bundle.feed_vars.emplace_back(name, flow);
        feed_cost.add(flow, cost);
    }
    // eur/MWh * kW -> eur/h needs the 1/1000 power conversion
    LinExpr opex = feed_cost;
    opex.add(bundle.p_el_var, eco.c_el / 1000.0);
    opex *= eco.af_op * eco.t_full_load;
    bundle.opex_expr = opex;
    return opex;
}

namespace {

SimplexSurface ratio_surface(double num_lo, double num_hi, double den_lo, double den_hi,
                             double den_scale, int n, const char* what) {
    if (den_lo <= 0.0)
        throw domain_error(std::string(what) + ": denominator lower bound must be positive");
    auto f = [&](double num, double den) { return num / (den_scale * den); };
    return build_simplex_surface(f, num_lo, num_hi, den_lo, den_hi, n, n);
}

}  // namespace

VarRef build_efficiency(MilpModel& m, const CaseDefinition& c, ObjectiveBundle& bundle,
                        const ObjectiveBoxes& boxes) {
    if (!bundle.h_dot_var.valid() || !bundle.p_el_var.valid())
        throw model_error("build_efficiency requires h_dot and p_el variables");
    if (boxes.p_lo <= 0.0)
        throw domain_error("efficiency: electrical-power lower bound must be positive");
    // Confine both inputs to the pre-solved box.
    m.set_bounds(bundle.h_dot_var, boxes.h_lo, boxes.h_hi);
    const auto& p_def = m.variable(bundle.p_el_var);
    m.set_bounds(bundle.p_el_var, std::max(p_def.lower, boxes.p_lo),
                 std::min(p_def.upper, boxes.p_hi));

    bundle.eta_surface =
        ratio_surface(boxes.h_lo, boxes.h_hi, m.variable(bundle.p_el_var).lower,
                      m.variable(bundle.p_el_var).upper, 1.0, 4, "efficiency");
    double lo = bundle.eta_surface.node_values[0], hi = lo;
    for (double v : bundle.eta_surface.node_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bundle.eta_var = m.add_continuous("eta", lo, hi);
    encode_simplex_surface(m, bundle.eta_surface, bundle.h_dot_var, bundle.p_el_var,
                           bundle.eta_var, "eta_surf");
    return bundle.eta_var;
}

VarRef build_production_cost(MilpModel& m, const CaseDefinition& c, ObjectiveBundle& bundle,
                             const ObjectiveBoxes& boxes) {
    if (!bundle.tac_var.valid() || !bundle.m_prod_var.valid())
        throw model_error("build_production_cost requires TAC and product-flow variables");
    if (boxes.m_lo <= 0.0)
        throw domain_error("production cost: product-flow lower bound must be positive");
    m.set_bounds(bundle.m_prod_var, boxes.m_lo, boxes.m_hi);
    const auto& t_def = m.variable(bundle.tac_var);
    m.set_bounds(bundle.tac_var, std::max(t_def.lower, boxes.tac_lo),
                 std::min(t_def.upper, boxes.tac_hi));

    bundle.cprod_surface =
        ratio_surface(m.variable(bundle.tac_var).lower, m.variable(bundle.tac_var).upper,
                      boxes.m_lo, boxes.m_hi, c.economics.t_full_load, 3, "production cost");
    double lo = bundle.cprod_surface.node_values[0], hi = lo;
    for (double v : bundle.cprod_surface.node_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bundle.cprod_var = m.add_continuous("c_prod", lo, hi);
    encode_simplex_surface(m, bundle.cprod_surface, bundle.tac_var, bundle.m_prod_var,
                           bundle.cprod_var, "cprod_surf");
    return bundle.cprod_var;
}

ObjectiveBundle build_objectives(MilpModel& m, const CaseDefinition& c, const HenBlock& hen,
                                 const ObjectiveBoxes& boxes, bool with_ratio_surfaces) {
    ObjectiveBundle bundle;
    build_p_el(m, c, hen, bundle);
    build_capex(m, c, hen, bundle);
    build_opex(m, c, hen, bundle);

    const auto& perf = c.performance;
    bundle.h_dot_var =
        m.add_continuous("H_dot", perf.h_dot_prod.min_value(), perf.h_dot_prod.max_value());
    bundle.m_prod_var = m.add_continuous("m_prod", perf.m_prod_total.min_value(),
                                         perf.m_prod_total.max_value());
    if (!hen.mode.coupled) {
        const double h = perf.h_dot_prod.evaluate(hen.mode.fixed_u);
        const double mp = perf.m_prod_total.evaluate(hen.mode.fixed_u);
        m.set_bounds(bundle.h_dot_var, h, h);
        m.set_bounds(bundle.m_prod_var, mp, mp);
    } else {
        encode_pwl1d(m, perf.h_dot_prod, hen.opvar, bundle.h_dot_var, PwlUse::exact, "hdot");
        encode_pwl1d(m, perf.m_prod_total, hen.opvar, bundle.m_prod_var, PwlUse::exact, "mprod");
    }

    // TAC = CAPEX_sys + CAPEX_HEN + OPEX by construction.
    double tac_cap = boxes.tac_hi;
    bundle.tac_var = m.add_continuous("TAC", boxes.tac_lo, tac_cap);
    LinExpr identity = bundle.capex_hen_expr;
    identity += bundle.opex_expr;
    identity.add_constant(bundle.capex_sys);
    identity.add(bundle.tac_var, -1.0);
    m.add_constraint(identity, Relation::equal, 0.0, "tac_identity");

    if (with_ratio_surfaces) {
        build_efficiency(m, c, bundle, boxes);
        build_production_cost(m, c, bundle, boxes);
    }
    return bundle;
}

}  // namespace henopt
