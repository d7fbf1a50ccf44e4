#include <cinttypes>
#include <cstdio>
#include <sstream>
#include <string>

#include "henopt/errors.hpp"
#include "henopt/milp.hpp"

namespace henopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string col_name(int idx) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "x%07d", idx);
    return buf;
}

std::string row_name(int idx) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "c%07d", idx);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string emit_mps(const MilpModel& m) {
    std::ostringstream out;
    out << "NAME          HENOPT\n";

    // Name map as comments so the file stays self-describing.
    for (int i = 0; i < m.variable_count(); ++i)
        out << "* VAR " << col_name(i) << " " << m.variables()[i].name << "\n";
    for (int i = 0; i < m.constraint_count(); ++i)
        if (!m.constraints()[i].name.empty())
            out << "* ROW " << row_name(i) << " " << m.constraints()[i].name << "\n";

    out << "ROWS\n";
    out << " N  OBJ\n";
    for (int i = 0; i < m.constraint_count(); ++i) {
        const char* type = nullptr;
        switch (m.constraints()[i].rel) {
            case Relation::less_equal: type = "L"; break;
            case Relation::equal: type = "E"; break;
            case Relation::greater_equal: type = "G"; break;
        }
        out << " " << type << "  " << row_name(i) << "\n";
    }

    // Column-wise entries in declaration order.
    std::vector<std::vector<std::pair<int, double>>> columns(m.variable_count());
    for (int r = 0; r < m.constraint_count(); ++r)
        for (const auto& [var, coeff] : m.constraints()[r].terms)
            columns[var].emplace_back(r, coeff);
    std::vector<double> obj(m.variable_count(), 0.0);
    for (const auto& [var, coeff] : m.objective_terms()) obj[var] = coeff;

    out << "COLUMNS\n";
    bool in_integer = false;
    int marker = 0;
    for (int v = 0; v < m.variable_count(); ++v) {
        const bool is_int = m.variables()[v].kind == VarKind::binary;
        if (is_int && !in_integer) {
            out << "    MARKER" << marker++ << "  'MARKER'  'INTORG'\n";
            in_integer = true;
        } else if (!is_int && in_integer) {
            out << "    MARKER" << marker++ << "  'MARKER'  'INTEND'\n";
            in_integer = false;
        }
        const std::string cn = col_name(v);
        if (obj[v] != 0.0) out << "    " << cn << "  OBJ  " << num(obj[v]) << "\n";
        for (const auto& [r, coeff] : columns[v])
            out << "    " << cn << "  " << row_name(r) << "  " << num(coeff) << "\n";
        if (obj[v] == 0.0 && columns[v].empty())
            out << "    " << cn << "  OBJ  0\n";  // keep unused columns declared
    }
    if (in_integer) out << "    MARKER" << marker++ << "  'MARKER'  'INTEND'\n";

    out << "RHS\n";
    if (m.objective_constant() != 0.0)
        out << "    RHS  OBJ  " << num(-m.objective_constant()) << "\n";
    for (int r = 0; r < m.constraint_count(); ++r)
        if (m.constraints()[r].rhs != 0.0)
            out << "    RHS  " << row_name(r) << "  " << num(m.constraints()[r].rhs) << "\n";

    out << "BOUNDS\n";
    for (int v = 0; v < m.variable_count(); ++v) {
        const auto& def = m.variables()[v];
        const std::string cn = col_name(v);
        if (def.kind == VarKind::binary) {
            out << " LO BND  " << cn << "  0\n";
            out << " UP BND  " << cn << "  1\n";
            continue;
        }
        if (def.lower == -kInf && def.upper == kInf) {
            out << " FR BND  " << cn << "\n";
        } else if (def.lower == def.upper) {
            out << " FX BND  " << cn << "  " << num(def.lower) << "\n";
        } else {
            if (def.lower == -kInf)
                out << " MI BND  " << cn << "\n";
            else if (def.lower != 0.0)
                out << " LO BND  " << cn << "  " << num(def.lower) << "\n";
            if (def.upper != kInf) out << " UP BND  " << cn << "  " << num(def.upper) << "\n";
        }
    }
    out << "ENDATA\n";
    return out.str();
}

Solution parse_solution_file(const MilpModel& m, const std::string& text) {
    Solution sol;
    sol.values.assign(m.variable_count(), 0.0);
    std::istringstream in(text);
    std::string key;
    bool have_status = false;
    while (in >> key) {
        if (key == "status") {
            std::string s;
            in >> s;
            if (s == "optimal")
                sol.status = SolveStatus::optimal_within_gap;
            else if (s == "infeasible")
                sol.status = SolveStatus::infeasible;
            else if (s == "timeout_no_solution")
                sol.status = SolveStatus::timeout_no_solution;
            else if (s == "timeout_with_incumbent")
                sol.status = SolveStatus::timeout_with_incumbent;
            else
                throw solver_error("unknown status in solution file: " + s);
            have_status = true;
        } else if (key == "objective") {
            in >> sol.objective_value;
        } else if (key == "gap") {
            in >> sol.mip_gap;
        } else if (key == "seconds") {
            in >> sol.solve_seconds;
        } else if (key == "columns") {
            int n = 0;
            in >> n;
            for (int i = 0; i < n; ++i) {
                std::string name;
                double value = 0.0;
                if (!(in >> name >> value))
                    throw solver_error("truncated columns section in solution file");
                if (name.size() != 8 || name[0] != 'x')
                    throw solver_error("unexpected column name in solution file: " + name);
                const int idx = std::atoi(name.c_str() + 1);
                if (idx < 0 || idx >= m.variable_count())
                    throw solver_error("column index out of range in solution file: " + name);
                sol.values[static_cast<size_t>(idx)] = value;
            }
        } else {
            throw solver_error("unknown key in solution file: " + key);
        }
    }
    if (!have_status) throw solver_error("solution file missing status");
    return sol;
}

}  // namespace henopt
