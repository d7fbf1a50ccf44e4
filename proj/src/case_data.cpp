#include "henopt/case_data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "henopt/errors.hpp"

namespace henopt {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// ParamModel
// ---------------------------------------------------------------------------

ParamModel ParamModel::constant(double v) {
    ParamModel m;
    m.kind_ = Kind::constant;
    m.value_ = v;
    return m;
}

ParamModel ParamModel::pwl(Pwl1D p) {
    ParamModel m;
    m.kind_ = Kind::pwl_of_opvar;
    m.pwl_ = std::move(p);
    return m;
}

ParamModel ParamModel::free_in(double lower, double upper) {
    if (lower >= upper) throw schema_error("free parameter bounds must satisfy lower < upper");
    ParamModel m;
    m.kind_ = Kind::free_bounds;
    m.lower_ = lower;
    m.upper_ = upper;
    return m;
}

double ParamModel::value_at(double u) const {
    switch (kind_) {
        case Kind::constant: return value_;
        case Kind::pwl_of_opvar: return pwl_.evaluate(u);
        case Kind::free_bounds:
            throw domain_error("free parameter has no value at an operating point");
    }
    throw domain_error("corrupt parameter model");
}

double ParamModel::min_over(double u_lo, double u_hi) const {
    switch (kind_) {
        case Kind::constant: return value_;
        case Kind::free_bounds: return lower_;
        case Kind::pwl_of_opvar: {
            double best = pwl_.evaluate(u_lo);
            for (double b : pwl_.breakpoints)
                if (b >= u_lo && b <= u_hi) best = std::min(best, pwl_.evaluate(b));
            return std::min(best, pwl_.evaluate(u_hi));
        }
    }
    throw domain_error("corrupt parameter model");
}

double ParamModel::max_over(double u_lo, double u_hi) const {
    switch (kind_) {
        case Kind::constant: return value_;
        case Kind::free_bounds: return upper_;
        case Kind::pwl_of_opvar: {
            double best = pwl_.evaluate(u_lo);
            for (double b : pwl_.breakpoints)
                if (b >= u_lo && b <= u_hi) best = std::max(best, pwl_.evaluate(b));
            return std::max(best, pwl_.evaluate(u_hi));
        }
    }
    throw domain_error("corrupt parameter model");
}

double ParamModel::free_lower() const {
    if (kind_ != Kind::free_bounds) throw domain_error("parameter is not free");
    return lower_;
}

double ParamModel::free_upper() const {
    if (kind_ != Kind::free_bounds) throw domain_error("parameter is not free");
    return upper_;
}

const Pwl1D& ParamModel::pwl_model() const {
    if (kind_ != Kind::pwl_of_opvar) throw domain_error("parameter is not a PWL model");
    return pwl_;
}

bool operator==(const ParamModel& a, const ParamModel& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
        case ParamModel::Kind::constant: return a.value_ == b.value_;
        case ParamModel::Kind::free_bounds: return a.lower_ == b.lower_ && a.upper_ == b.upper_;
        case ParamModel::Kind::pwl_of_opvar:
            return a.pwl_.breakpoints == b.pwl_.breakpoints && a.pwl_.values == b.pwl_.values;
    }
    return false;
}

// ---------------------------------------------------------------------------
// CaseDefinition helpers
// ---------------------------------------------------------------------------

const StreamDef* CaseDefinition::find_stream(const std::string& id) const {
    for (const auto& s : streams)
        if (s.id == id) return &s;
    return nullptr;
}

std::vector<const StreamDef*> CaseDefinition::hot_side_streams() const {
    std::vector<const StreamDef*> out;
    for (const auto& s : streams)
        if (s.kind != StreamKind::cold) out.push_back(&s);
    return out;
}

std::vector<const StreamDef*> CaseDefinition::cold_streams() const {
    std::vector<const StreamDef*> out;
    for (const auto& s : streams)
        if (s.kind == StreamKind::cold) out.push_back(&s);
    return out;
}

std::tuple<double, double, double> stream_parameter_at(const StreamDef& s, double u) {
    if (u < s.op_lower - 1e-12 || u > s.op_upper + 1e-12) {
        std::ostringstream msg;
        msg << "operating point " << u << " outside range [" << s.op_lower << ", " << s.op_upper
            << "] for stream " << s.id;
        throw domain_error(msg.str());
    }
    if (s.t_in.is_free() || s.t_out.is_free() || s.f.is_free())
        throw domain_error("stream " + s.id + " has free parameters (decision variables)");
    return {s.t_in.value_at(u), s.t_out.value_at(u), s.f.value_at(u)};
}

// ---------------------------------------------------------------------------
// JSON parsing
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void missing(const std::string& field) {
    throw schema_error("case file: missing or malformed field '" + field + "'");
}

const json& need(const json& j, const std::string& key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) missing(ctx + "." + key);
    return *it;
}

double need_num(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_number()) missing(ctx + "." + key);
    return v.get<double>();
}

Pwl1D parse_pwl(const json& j, const std::string& ctx) {
    std::vector<double> bp, vals;
    for (const auto& b : need(j, "breakpoints", ctx)) bp.push_back(b.get<double>());
    for (const auto& v : need(j, "values", ctx)) vals.push_back(v.get<double>());
    if (bp.size() != vals.size() || bp.size() < 2) missing(ctx + " (breakpoints/values)");
    if (!std::is_sorted(bp.begin(), bp.end())) missing(ctx + " (breakpoints must ascend)");
    Pwl1D p{std::move(bp), std::move(vals), false};
    // recompute convexity from the data
    bool convex = true;
    for (int s = 0; s + 1 < p.segments(); ++s)
        if (p.slope(s + 1) < p.slope(s) - 1e-12) convex = false;
    p.convex_flag = convex;
    return p;
}

// Accepts either explicit breakpoints or raw samples plus a fit target.
Pwl1D parse_fitted(const json& j, const std::string& ctx) {
    if (j.contains("breakpoints")) return parse_pwl(j, ctx);
    if (!j.contains("samples")) missing(ctx + " (samples or breakpoints)");
    std::vector<Sample1D> samples;
    for (const auto& s : j["samples"]) {
        if (!s.is_array() || s.size() != 2) missing(ctx + ".samples");
        samples.push_back({s[0].get<double>(), s[1].get<double>()});
    }
    const double target = j.value("rmse_target", 0.01);
    Pwl1D p = fit_pwl_1d(samples, target);
    if (j.contains("max_segments") && p.segments() > j["max_segments"].get<int>())
        throw fit_error(ctx + ": fit needs " + std::to_string(p.segments()) +
                        " segments, budget is " + std::to_string(j["max_segments"].get<int>()));
    return p;
}

ParamModel parse_param(const json& j, const std::string& ctx) {
    if (j.contains("constant")) return ParamModel::constant(j["constant"].get<double>());
    if (j.contains("pwl_of_opvar")) return ParamModel::pwl(parse_pwl(j["pwl_of_opvar"], ctx));
    if (j.contains("free")) {
        const json& f = j["free"];
        return ParamModel::free_in(need_num(f, "lower", ctx + ".free"),
                                   need_num(f, "upper", ctx + ".free"));
    }
    missing(ctx + " (constant | pwl_of_opvar | free)");
}

StreamKind parse_kind(const std::string& k, const std::string& ctx) {
    if (k == "hot") return StreamKind::hot;
    if (k == "cold") return StreamKind::cold;
    if (k == "cs") return StreamKind::cs;
    throw schema_error("case file: unknown stream kind '" + k + "' in " + ctx);
}

std::vector<StreamDef> parse_streams_csv(const std::string& path, double op_lo, double op_hi) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open stream table: " + path);
    std::vector<StreamDef> out;
    std::string line;
    if (!std::getline(in, line)) throw schema_error("empty stream table: " + path);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) fields.push_back(cell);
        if (fields.size() != 9)
            throw schema_error(path + ":" + std::to_string(lineno) + ": expected 9 columns");
        StreamDef s;
        s.id = fields[0];
        s.kind = parse_kind(fields[1], s.id);
        const double tin_lo = std::stod(fields[2]), tin_hi = std::stod(fields[3]);
        const double tout_lo = std::stod(fields[4]), tout_hi = std::stod(fields[5]);
        const double f_lo = std::stod(fields[6]), f_hi = std::stod(fields[7]);
        s.u_coeff = std::stod(fields[8]);
        auto span = [&](double lo, double hi) {
            if (lo == hi) return ParamModel::constant(lo);
            return ParamModel::pwl(Pwl1D::line(op_lo, lo, op_hi, hi));
        };
        if (s.kind == StreamKind::cs) {
            if (tin_lo != tin_hi)
                throw schema_error(s.id + ": combustion-system inlet must be constant");
            s.t_in = ParamModel::constant(tin_lo);
            s.t_out = ParamModel::free_in(tout_lo, tout_hi);
            s.f = ParamModel::free_in(f_lo, f_hi);
        } else {
            s.t_in = span(tin_lo, tin_hi);
            s.t_out = span(tout_lo, tout_hi);
            s.f = span(f_lo, f_hi);
        }
        s.op_lower = op_lo;
        s.op_upper = op_hi;
        out.push_back(std::move(s));
    }
    return out;
}

void check_pwl_domain(const ParamModel& p, const std::string& what, double op_lo, double op_hi) {
    if (p.kind() != ParamModel::Kind::pwl_of_opvar) return;
    const auto& model = p.pwl_model();
    if (model.x_min() > op_lo + 1e-12 || model.x_max() < op_hi - 1e-12) {
        std::ostringstream msg;
        msg << what << ": PWL domain [" << model.x_min() << ", " << model.x_max()
            << "] does not cover the operating range [" << op_lo << ", " << op_hi << "]";
        throw domain_error(msg.str());
    }
}

json pwl_to_json(const Pwl1D& p) {
    return json{{"breakpoints", p.breakpoints}, {"values", p.values}};
}

json param_to_json(const ParamModel& p) {
    switch (p.kind()) {
        case ParamModel::Kind::constant: return json{{"constant", p.value_at(0.0)}};
        case ParamModel::Kind::free_bounds:
            return json{{"free", {{"lower", p.free_lower()}, {"upper", p.free_upper()}}}};
        case ParamModel::Kind::pwl_of_opvar: return json{{"pwl_of_opvar", pwl_to_json(p.pwl_model())}};
    }
    throw domain_error("corrupt parameter model");
}

}  // namespace

CaseDefinition load_case_from_text(const std::string& json_text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw schema_error(std::string("case file is not valid JSON: ") + e.what());
    }

    CaseDefinition c;
    const json& ov = need(j, "opvar", "case");
    c.opvar.name = need(ov, "name", "opvar").get<std::string>();
    c.opvar.lower = need_num(ov, "lower", "opvar");
    c.opvar.upper = need_num(ov, "upper", "opvar");
    if (!(c.opvar.lower < c.opvar.upper))
        throw schema_error("opvar: lower must be below upper");

    const json& streams = need(j, "streams", "case");
    if (streams.is_string()) {
        const fs::path p = fs::path(base_dir) / streams.get<std::string>();
        c.streams = parse_streams_csv(p.string(), c.opvar.lower, c.opvar.upper);
    } else if (streams.is_array()) {
        for (const auto& sj : streams) {
            StreamDef s;
            s.id = need(sj, "id", "stream").get<std::string>();
            s.kind = parse_kind(need(sj, "kind", s.id).get<std::string>(), s.id);
            s.t_in = parse_param(need(sj, "t_in", s.id), s.id + ".t_in");
            s.t_out = parse_param(need(sj, "t_out", s.id), s.id + ".t_out");
            s.f = parse_param(need(sj, "f", s.id), s.id + ".f");
            s.u_coeff = need_num(sj, "u_coeff", s.id);
            s.op_lower = c.opvar.lower;
            s.op_upper = c.opvar.upper;
            c.streams.push_back(std::move(s));
        }
    } else {
        missing("streams (array or CSV path)");
    }

    // referential integrity and reconstruction domains
    for (const auto& s : c.streams) {
        check_pwl_domain(s.t_in, s.id + ".t_in", c.opvar.lower, c.opvar.upper);
        check_pwl_domain(s.t_out, s.id + ".t_out", c.opvar.lower, c.opvar.upper);
        check_pwl_domain(s.f, s.id + ".f", c.opvar.lower, c.opvar.upper);
        for (const auto& o : c.streams)
            if (&s != &o && s.id == o.id) throw schema_error("duplicate stream id: " + s.id);
    }

    for (const auto& pj : need(j, "products", "case")) {
        ProductDef p;
        p.index = static_cast<int>(need_num(pj, "index", "product"));
        p.name = need(pj, "name", "product").get<std::string>();
        p.h_prod = need_num(pj, "h_prod", p.name);
        p.rho_prod = need_num(pj, "rho_prod", p.name);
        p.mu_prod = need_num(pj, "mu_prod", p.name);
        if (p.h_prod <= 0.0) throw schema_error(p.name + ": h_prod must be positive");
        c.products.push_back(std::move(p));
    }

    const json& ej = need(j, "economics", "case");
    c.economics.t_full_load = need_num(ej, "t_full_load", "economics");
    c.economics.af_inv = need_num(ej, "af_inv", "economics");
    c.economics.af_op = need_num(ej, "af_op", "economics");
    c.economics.c_sys = need_num(ej, "c_sys", "economics");
    c.economics.c_el = need_num(ej, "c_el", "economics");
    for (const auto& fj : need(ej, "c_feedstock", "economics")) {
        if (!fj.is_array() || fj.size() != 2) missing("economics.c_feedstock");
        c.economics.c_feedstock.emplace_back(fj[0].get<std::string>(), fj[1].get<double>());
    }
    c.economics.c_f_hex = need_num(ej, "c_f_hex", "economics");
    c.economics.c_v_hex = need_num(ej, "c_v_hex", "economics");
    c.economics.beta = need_num(ej, "beta", "economics");
    c.economics.eps_hu = need_num(ej, "eps_hu", "economics");
    c.economics.eps_cu = need_num(ej, "eps_cu", "economics");

    const json& pf = need(j, "performance", "case");
    c.performance.p_sys = parse_fitted(need(pf, "p_sys", "performance"), "performance.p_sys");
    c.performance.m_prod_total =
        parse_fitted(need(pf, "m_prod_total", "performance"), "performance.m_prod_total");
    c.performance.h_dot_prod =
        parse_fitted(need(pf, "h_dot_prod", "performance"), "performance.h_dot_prod");
    for (const auto& fj : need(pf, "feed_flows", "performance")) {
        const std::string name = need(fj, "name", "feed_flow").get<std::string>();
        c.performance.feed_flows.emplace_back(name, parse_fitted(fj, "feed_flow " + name));
    }
    for (const auto* model :
         {&c.performance.p_sys, &c.performance.m_prod_total, &c.performance.h_dot_prod}) {
        if (model->x_min() > c.opvar.lower + 1e-12 || model->x_max() < c.opvar.upper - 1e-12)
            throw domain_error("performance model does not cover the operating range");
    }

    const json& hj = need(j, "hen_config", "case");
    c.hen_config.n_stages = static_cast<int>(need_num(hj, "n_stages", "hen_config"));
    c.hen_config.dt_min = need_num(hj, "dt_min", "hen_config");
    if (hj.contains("cold_utility")) {
        c.hen_config.cold_utility.t_in = need_num(hj["cold_utility"], "t_in", "cold_utility");
        c.hen_config.cold_utility.t_out = need_num(hj["cold_utility"], "t_out", "cold_utility");
    }
    if (hj.contains("hot_utility")) {
        c.hen_config.hot_utility.t_in = need_num(hj["hot_utility"], "t_in", "hot_utility");
        c.hen_config.hot_utility.t_out = need_num(hj["hot_utility"], "t_out", "hot_utility");
    }
    if (c.hen_config.n_stages < 1) throw schema_error("hen_config.n_stages must be >= 1");
    if (c.hen_config.dt_min <= 0.0) throw schema_error("hen_config.dt_min must be positive");
    return c;
}

CaseDefinition load_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open case file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_case_from_text(ss.str(), fs::path(path).parent_path().string());
}

std::string serialize_case(const CaseDefinition& c) {
    json j;
    j["opvar"] = {{"name", c.opvar.name}, {"lower", c.opvar.lower}, {"upper", c.opvar.upper}};
    json streams = json::array();
    for (const auto& s : c.streams) {
        streams.push_back({{"id", s.id},
                           {"kind", s.kind == StreamKind::hot   ? "hot"
                                    : s.kind == StreamKind::cold ? "cold"
                                                                 : "cs"},
                           {"t_in", param_to_json(s.t_in)},
                           {"t_out", param_to_json(s.t_out)},
                           {"f", param_to_json(s.f)},
                           {"u_coeff", s.u_coeff}});
    }
    j["streams"] = std::move(streams);
    json products = json::array();
    for (const auto& p : c.products)
        products.push_back({{"index", p.index},
                            {"name", p.name},
                            {"h_prod", p.h_prod},
                            {"rho_prod", p.rho_prod},
                            {"mu_prod", p.mu_prod}});
    j["products"] = std::move(products);
    json feed = json::array();
    for (const auto& [name, cost] : c.economics.c_feedstock) feed.push_back({name, cost});
    j["economics"] = {{"t_full_load", c.economics.t_full_load},
                      {"af_inv", c.economics.af_inv},
                      {"af_op", c.economics.af_op},
                      {"c_sys", c.economics.c_sys},
                      {"c_el", c.economics.c_el},
                      {"c_feedstock", std::move(feed)},
                      {"c_f_hex", c.economics.c_f_hex},
                      {"c_v_hex", c.economics.c_v_hex},
                      {"beta", c.economics.beta},
                      {"eps_hu", c.economics.eps_hu},
                      {"eps_cu", c.economics.eps_cu}};
    json flows = json::array();
    for (const auto& [name, model] : c.performance.feed_flows) {
        json f = pwl_to_json(model);
        f["name"] = name;
        flows.push_back(std::move(f));
    }
    j["performance"] = {{"p_sys", pwl_to_json(c.performance.p_sys)},
                        {"m_prod_total", pwl_to_json(c.performance.m_prod_total)},
                        {"h_dot_prod", pwl_to_json(c.performance.h_dot_prod)},
                        {"feed_flows", std::move(flows)}};
    j["hen_config"] = {{"n_stages", c.hen_config.n_stages},
                       {"dt_min", c.hen_config.dt_min},
                       {"cold_utility",
                        {{"t_in", c.hen_config.cold_utility.t_in},
                         {"t_out", c.hen_config.cold_utility.t_out}}},
                       {"hot_utility",
                        {{"t_in", c.hen_config.hot_utility.t_in},
                         {"t_out", c.hen_config.hot_utility.t_out}}}};
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// validate_case
// ---------------------------------------------------------------------------

std::vector<std::string> validate_case(const CaseDefinition& c) {
    std::vector<std::string> diags;
    auto say = [&](const std::string& s) { diags.push_back(s); };

    if (!(c.opvar.lower < c.opvar.upper)) say("opvar: lower must be below upper");
    if (c.hen_config.n_stages < 1) say("hen_config: n_stages must be >= 1");
    if (c.hen_config.dt_min <= 0.0) say("hen_config: dt_min must be positive");

    const auto& e = c.economics;
    if (e.beta <= 0.0 || e.beta > 1.0) say("economics: cost exponent out of (0,1]");
    for (double v : {e.t_full_load, e.af_inv, e.c_sys, e.c_el, e.c_f_hex, e.c_v_hex, e.eps_hu,
                     e.eps_cu})
        if (v < 0.0) say("economics: negative cost or factor");
    for (const auto& [name, cost] : e.c_feedstock)
        if (cost < 0.0) say("economics: negative feedstock cost for " + name);

    const int grid = 7;
    for (const auto& s : c.streams) {
        if (s.kind == StreamKind::cs) {
            if (!s.t_in.is_constant()) say(s.id + ": combustion-system inlet must be constant");
            if (!s.t_out.is_free() || !s.f.is_free())
                say(s.id + ": combustion-system outlet and flow capacity must be free");
            else if (s.t_out.free_upper() >= s.t_in.value_at(c.opvar.lower))
                say(s.id + ": outlet upper bound must stay below the inlet temperature");
            continue;
        }
        for (int k = 0; k < grid; ++k) {
            const double u =
                c.opvar.lower + (c.opvar.upper - c.opvar.lower) * k / static_cast<double>(grid - 1);
            double t_in, t_out, f;
            try {
                std::tie(t_in, t_out, f) = stream_parameter_at(s, u);
            } catch (const domain_error& err) {
                say(s.id + ": " + err.what());
                break;
            }
            std::ostringstream at;
            at << " at U = " << u;
            if (f <= 0.0) say(s.id + ": flow capacity must be positive" + at.str());
            if (s.kind == StreamKind::hot && t_in < t_out)
                say(s.id + ": hot stream with t_in < t_out" + at.str());
            if (s.kind == StreamKind::cold && t_in > t_out)
                say(s.id + ": cold stream with t_in > t_out" + at.str());
        }
        if (s.u_coeff <= 0.0) say(s.id + ": heat transfer coefficient must be positive");
    }

    // performance models: defined on the range, production strictly increasing
    for (const auto* m :
         {&c.performance.m_prod_total, &c.performance.h_dot_prod}) {
        for (int s = 0; s < m->segments(); ++s)
            if (m->slope(s) <= 0.0) {
                say("performance: production model must be strictly increasing");
                break;
            }
    }

    // utility approach sanity at the stream ends they serve
    const double dt_min = c.hen_config.dt_min;
    for (const auto& s : c.streams) {
        if (s.kind == StreamKind::hot) {
            const double t_out_min = s.t_out.min_over(c.opvar.lower, c.opvar.upper);
            if (t_out_min < c.hen_config.cold_utility.t_in + dt_min)
                say(s.id + ": outlet temperature runs below the cold utility approach");
        } else if (s.kind == StreamKind::cold) {
            const double t_out_max = s.t_out.max_over(c.opvar.lower, c.opvar.upper);
            if (t_out_max > c.hen_config.hot_utility.t_in - dt_min)
                say(s.id + ": outlet temperature runs above the hot utility approach");
        }
    }
    return diags;
}

// ---------------------------------------------------------------------------
// structural equality (round-trip checks)
// ---------------------------------------------------------------------------

bool operator==(const CaseDefinition& a, const CaseDefinition& b) {
    if (a.opvar.name != b.opvar.name || a.opvar.lower != b.opvar.lower ||
        a.opvar.upper != b.opvar.upper)
        return false;
    if (a.streams.size() != b.streams.size() || a.products.size() != b.products.size())
        return false;
    for (size_t i = 0; i < a.streams.size(); ++i) {
        const auto& x = a.streams[i];
        const auto& y = b.streams[i];
        if (x.id != y.id || x.kind != y.kind || x.u_coeff != y.u_coeff) return false;
        if (!(x.t_in == y.t_in && x.t_out == y.t_out && x.f == y.f)) return false;
    }
    for (size_t i = 0; i < a.products.size(); ++i) {
        const auto& x = a.products[i];
        const auto& y = b.products[i];
        if (x.index != y.index || x.name != y.name || x.h_prod != y.h_prod ||
            x.rho_prod != y.rho_prod || x.mu_prod != y.mu_prod)
            return false;
    }
    const auto& ea = a.economics;
    const auto& eb = b.economics;
    if (ea.t_full_load != eb.t_full_load || ea.af_inv != eb.af_inv || ea.af_op != eb.af_op ||
        ea.c_sys != eb.c_sys || ea.c_el != eb.c_el || ea.c_feedstock != eb.c_feedstock ||
        ea.c_f_hex != eb.c_f_hex || ea.c_v_hex != eb.c_v_hex || ea.beta != eb.beta ||
        ea.eps_hu != eb.eps_hu || ea.eps_cu != eb.eps_cu)
        return false;
    auto pwl_eq = [](const Pwl1D& x, const Pwl1D& y) {
        return x.breakpoints == y.breakpoints && x.values == y.values;
    };
    if (!pwl_eq(a.performance.p_sys, b.performance.p_sys) ||
        !pwl_eq(a.performance.m_prod_total, b.performance.m_prod_total) ||
        !pwl_eq(a.performance.h_dot_prod, b.performance.h_dot_prod))
        return false;
    if (a.performance.feed_flows.size() != b.performance.feed_flows.size()) return false;
    for (size_t i = 0; i < a.performance.feed_flows.size(); ++i) {
        if (a.performance.feed_flows[i].first != b.performance.feed_flows[i].first ||
            !pwl_eq(a.performance.feed_flows[i].second, b.performance.feed_flows[i].second))
            return false;
    }
    const auto& ha = a.hen_config;
    const auto& hb = b.hen_config;
    return ha.n_stages == hb.n_stages && ha.dt_min == hb.dt_min &&
           ha.cold_utility.t_in == hb.cold_utility.t_in &&
           ha.cold_utility.t_out == hb.cold_utility.t_out &&
           ha.hot_utility.t_in == hb.hot_utility.t_in &&
           ha.hot_utility.t_out == hb.hot_utility.t_out;
}

}  // namespace henopt
