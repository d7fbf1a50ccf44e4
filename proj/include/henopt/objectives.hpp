#pragma once

#include "henopt/case_data.hpp"
#include "henopt/encode.hpp"
#include "henopt/milp.hpp"
#include "henopt/superstructure.hpp"

namespace henopt {

// ---------------------------------------------------------------------------
// Objective assembly: PtL efficiency and specific production cost from HEN
// and case quantities, with the two ratio surfaces encoded over boxes that
// come from single-objective pre-solves.
// ---------------------------------------------------------------------------

struct ObjectiveBoxes {
    double h_lo = 0.0, h_hi = 0.0;      // chemically bound power, kW
    double p_lo = 0.0, p_hi = 0.0;      // total electrical power, kW
    double tac_lo = 0.0, tac_hi = 0.0;  // eur/yr
    double m_lo = 0.0, m_hi = 0.0;      // product mass flow, kg/h
};

struct ObjectiveBundle {
    VarRef p_sys_var;   // kW
    VarRef p_el_var;    // kW
    VarRef h_dot_var;   // kW
    VarRef m_prod_var;  // kg/h
    VarRef tac_var;     // eur/yr
    VarRef eta_var;     // fraction
    VarRef cprod_var;   // eur/kg

    std::vector<std::pair<std::string, VarRef>> feed_vars;  // t/h
    std::vector<VarRef> area_cost_vars;  // eur/yr, one per match/utility exchanger

    double capex_sys = 0.0;  // constant, eur/yr
    LinExpr capex_hen_expr;  // eur/yr
    LinExpr opex_expr;       // eur/yr

    SimplexSurface eta_surface, cprod_surface;
    double envelope_overshoot = 0.0;  // worst area-cost overshoot, eur/yr
};

// Bound-propagation fallback for the surface boxes (loose; pre-solves give
// the tight ones used for the reference flow).
ObjectiveBoxes propagate_boxes(const CaseDefinition& c);

// p_el = P_sys(u) + eps_hu * sum(q_hu) + eps_cu * sum(q_cu).
VarRef build_p_el(MilpModel& m, const CaseDefinition& c, const HenBlock& hen,
                  ObjectiveBundle& bundle);

// Plane envelopes for every match and utility area term plus the fixed
// per-exchanger cost; fills capex_sys and capex_hen_expr.
void build_capex(MilpModel& m, const CaseDefinition& c, const HenBlock& hen,
                 ObjectiveBundle& bundle);

// Feedstock plus electricity cost per year.
LinExpr build_opex(MilpModel& m, const CaseDefinition& c, const HenBlock& hen,
                   ObjectiveBundle& bundle);

// eta = h_dot / p_el through a 4x4 simplex surface over the boxes.
VarRef build_efficiency(MilpModel& m, const CaseDefinition& c, ObjectiveBundle& bundle,
                        const ObjectiveBoxes& boxes);

// c_prod = TAC / (t * m_prod) through a 3x3 simplex surface.
VarRef build_production_cost(MilpModel& m, const CaseDefinition& c, ObjectiveBundle& bundle,
                             const ObjectiveBoxes& boxes);

// Full assembly in dependency order. When `with_ratio_surfaces` is false the
// bundle stops after TAC (used by the box pre-solves and fixed-point runs).
ObjectiveBundle build_objectives(MilpModel& m, const CaseDefinition& c, const HenBlock& hen,
                                 const ObjectiveBoxes& boxes, bool with_ratio_surfaces = true);

}  // namespace henopt
