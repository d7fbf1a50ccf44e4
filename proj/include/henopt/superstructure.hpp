#pragma once

#include <optional>
#include <string>
#include <vector>

#include "henopt/case_data.hpp"
#include "henopt/encode.hpp"
#include "henopt/milp.hpp"

namespace henopt {

// ---------------------------------------------------------------------------
// Stage-wise heat-exchanger-network superstructure with operating-point
// dependent stream parameters. Hot utilities sit at cold-stream ends, cold
// utilities at hot-stream ends; combustion-system streams join the hot side
// with free outlet temperature and flow capacity.
// ---------------------------------------------------------------------------

struct HenMode {
    bool coupled = true;
    double fixed_u = 0.0;  // used when !coupled

    static HenMode coupled_mode() { return {true, 0.0}; }
    static HenMode fixed_opvar(double u) { return {false, u}; }
};

struct HenBlock {
    const CaseDefinition* case_def = nullptr;
    HenMode mode;
    int stages = 0;

    VarRef opvar;

    // Index spaces: hot side (process hot + cs, in case order), cold streams.
    std::vector<const StreamDef*> hot;
    std::vector<const StreamDef*> cold;

    // Stage-boundary temperatures, location l = 0..stages (0 = hot end).
    std::vector<std::vector<VarRef>> t_hot;   // [i][l]
    std::vector<std::vector<VarRef>> t_cold;  // [j][l]

    // Match duties and existence; invalid handles where the pair is pruned.
    std::vector<std::vector<std::vector<VarRef>>> q;  // [i][j][k]
    std::vector<std::vector<std::vector<VarRef>>> z;

    // Approach temperatures per pair and location l = 0..stages.
    std::vector<std::vector<std::vector<VarRef>>> dt;  // [i][j][l]

    // Utility duties and existence (cold utility only on process hot streams).
    std::vector<VarRef> q_cu, z_cu;  // [i]; invalid for cs streams
    std::vector<VarRef> q_hu, z_hu;  // [j]

    // Stage duties per stream.
    std::vector<std::vector<VarRef>> q_stage_hot;   // [i][k]
    std::vector<std::vector<VarRef>> q_stage_cold;  // [j][k]

    // Whole-stream duty variables (PWL of the operating variable; for cs the
    // bilinear product of flow capacity and total temperature drop).
    std::vector<VarRef> q_total_hot;   // [i]
    std::vector<VarRef> q_total_cold;  // [j]

    // Combustion-system free parameters (invalid for non-cs hot streams).
    std::vector<VarRef> cs_flow;   // [i]
    std::vector<VarRef> cs_t_out;  // [i], same handle as t_hot[i][stages]

    // Big-M duty caps and temperature relaxation spans per pair.
    std::vector<std::vector<double>> big_m;  // [i][j], 0 = pruned
    std::vector<std::vector<double>> gamma;  // [i][j]

    // Fit-error bounds for post-solve residual checks (absolute kW).
    std::vector<double> q_total_tol_hot, q_total_tol_cold;
    std::vector<std::vector<double>> stage_tol_hot, stage_tol_cold;

    // Surfaces kept for per-cell residual tolerances.
    std::vector<std::optional<SimplexSurface>> stage_surface_hot, stage_surface_cold;
    std::vector<std::optional<SimplexSurface>> cs_surface;

    bool pair_active(int i, int j) const { return big_m[i][j] > 0.0; }
    int hot_count() const { return static_cast<int>(hot.size()); }
    int cold_count() const { return static_cast<int>(cold.size()); }
    bool is_cs(int i) const { return hot[i]->kind == StreamKind::cs; }
};

// Duty cap for a hot/cold pair: min of both streams' maximum duties over the
// operating range, zero when no temperature overlap admits any exchange.
double big_m_for_pair(const StreamDef& hot, const StreamDef& cold, double dt_min);

// Builds the superstructure into the model. Infeasible parameter
// combinations surface later as solver infeasibility.
HenBlock build_hen(MilpModel& m, const CaseDefinition& c, HenMode mode);

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

struct HenMatch {
    std::string hot_id, cold_id;
    int stage = 0;       // 1-based
    double duty = 0.0;   // kW
    double area = 0.0;   // m2
    double lmtd = 0.0;   // K
};

struct HenUtility {
    std::string stream_id;
    double duty = 0.0;
    double area = 0.0;
    double lmtd = 0.0;
};

struct CsSetting {
    std::string id;
    double t_out = 0.0;
    double f = 0.0;
};

struct HenDesign {
    std::vector<HenMatch> matches;
    std::vector<HenUtility> cold_utilities;  // on hot streams
    std::vector<HenUtility> hot_utilities;   // on cold streams
    std::vector<CsSetting> cs_settings;
    double u = 0.0;
    int hex_count = 0;
    int spurious_z = 0;  // existence set but duty below threshold

    double total_match_duty() const;
    double total_cold_utility() const;
    double total_hot_utility() const;
};

// Chen's closed-form approximation of the log-mean temperature difference.
double chen_lmtd(double dt1, double dt2);

// Reads a solved assignment back into a physical design. Matches below the
// duty threshold are dropped and counted as spurious.
HenDesign extract_design(const Solution& sol, const HenBlock& h, const CaseDefinition& c);

// Post-solve structural checks: energy-balance residuals within fit
// tolerances, monotone stage temperatures, approach temperatures at active
// matches, zero duty at inactive matches. Returns human-readable violations.
std::vector<std::string> check_solution_structure(const Solution& sol, const HenBlock& h,
                                                  const CaseDefinition& c);

}  // namespace henopt
