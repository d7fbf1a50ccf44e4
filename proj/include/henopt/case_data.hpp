#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "henopt/pwl.hpp"

namespace henopt {

// ---------------------------------------------------------------------------
// Problem instance: streams whose parameters depend on one operating variable,
// combustion-system streams with free parameters, products and economics.
// ---------------------------------------------------------------------------

struct OperatingVariable {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
};

enum class StreamKind { hot, cold, cs };

// A stream parameter: constant, a PWL function of the operating variable, or
// a free decision variable within bounds (combustion-system streams).
class ParamModel {
public:
    enum class Kind { constant, pwl_of_opvar, free_bounds };

    static ParamModel constant(double v);
    static ParamModel pwl(Pwl1D p);
    static ParamModel free_in(double lower, double upper);

    Kind kind() const { return kind_; }
    bool is_free() const { return kind_ == Kind::free_bounds; }
    bool is_constant() const { return kind_ == Kind::constant; }

    // Value at an operating point; throws domain_error for free parameters
    // and for u outside a PWL domain. Constants come back bit-identical.
    double value_at(double u) const;

    double min_over(double u_lo, double u_hi) const;
    double max_over(double u_lo, double u_hi) const;

    double free_lower() const;
    double free_upper() const;
    const Pwl1D& pwl_model() const;

    friend bool operator==(const ParamModel&, const ParamModel&);

private:
    Kind kind_ = Kind::constant;
    double value_ = 0.0;
    Pwl1D pwl_{};
    double lower_ = 0.0, upper_ = 0.0;
};

struct StreamDef {
    std::string id;
    StreamKind kind = StreamKind::hot;
    ParamModel t_in, t_out, f;
    double u_coeff = 0.0;  // kW/m2K
    // Operating range the stream was loaded against (for domain checks).
    double op_lower = 0.0, op_upper = 0.0;

    bool is_hot_side() const { return kind != StreamKind::cold; }
};

struct ProductDef {
    int index = 0;
    std::string name;
    double h_prod = 0.0;    // MJ/kg
    double rho_prod = 0.0;  // kg/m3
    double mu_prod = 0.0;   // mPa s
};

struct EconomicParams {
    double t_full_load = 0.0;  // h/yr
    double af_inv = 0.0;       // 1/yr
    double af_op = 1.0;
    double c_sys = 0.0;  // eur
    double c_el = 0.0;   // eur/MWh
    std::vector<std::pair<std::string, double>> c_feedstock;  // eur/t
    double c_f_hex = 0.0;  // eur/yr
    double c_v_hex = 0.0;  // eur/(m^2beta yr)
    double beta = 0.0;
    double eps_hu = 0.0;
    double eps_cu = 0.0;
};

struct PerformanceModels {
    Pwl1D p_sys;          // kW
    Pwl1D m_prod_total;   // kg/h
    Pwl1D h_dot_prod;     // kW
    std::vector<std::pair<std::string, Pwl1D>> feed_flows;  // t/h
};

struct UtilitySpec {
    double t_in = 0.0;
    double t_out = 0.0;
};

struct HenConfig {
    int n_stages = 1;
    double dt_min = 0.0;  // K
    UtilitySpec cold_utility{20.0, 25.0};
    UtilitySpec hot_utility{900.0, 900.0};
};

struct CaseDefinition {
    OperatingVariable opvar;
    std::vector<StreamDef> streams;
    std::vector<ProductDef> products;
    EconomicParams economics;
    PerformanceModels performance;
    HenConfig hen_config;

    const StreamDef* find_stream(const std::string& id) const;
    std::vector<const StreamDef*> hot_side_streams() const;  // hot + cs
    std::vector<const StreamDef*> cold_streams() const;
};

// Loads and validates a case file (JSON; the streams entry may name a CSV
// with the stream-table column layout). Throws schema_error on malformed
// input and domain_error when a PWL domain fails to cover the operating
// range.
CaseDefinition load_case(const std::string& path);

// Serialization for reproducibility; fitted models are written out as
// explicit breakpoint tables. load_case(serialize) round-trips.
std::string serialize_case(const CaseDefinition& c);
CaseDefinition load_case_from_text(const std::string& json_text,
                                   const std::string& base_dir = ".");

// Evaluates (t_in, t_out, f) at an operating point. Throws domain_error for
// u outside the operating range or for streams with free parameters.
std::tuple<double, double, double> stream_parameter_at(const StreamDef& s, double u);

// Diagnostics (empty = valid). Checks type invariants on a grid of at least
// seven operating points.
std::vector<std::string> validate_case(const CaseDefinition& c);

bool operator==(const CaseDefinition& a, const CaseDefinition& b);

}  // namespace henopt
