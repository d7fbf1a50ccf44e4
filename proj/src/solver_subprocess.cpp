#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>

#include "henopt/errors.hpp"
#include "henopt/milp.hpp"

namespace henopt {

namespace fs = std::filesystem;

namespace {

std::string driver_command(const SolveOptions& opts) {
    if (!opts.solver_command.empty()) return opts.solver_command;
    if (const char* env = std::getenv("HENOPT_SOLVER_CMD"); env && *env) return env;
#ifdef HENOPT_SOLVER_SCRIPT
    return std::string("python3 ") + HENOPT_SOLVER_SCRIPT;
#else
    return "";
#endif
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path make_work_dir() {
    static std::atomic<int> counter{0};
    const fs::path base = fs::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
        fs::path dir = base / ("henopt-" + std::to_string(::getpid()) + "-" +
                               std::to_string(counter.fetch_add(1)));
        std::error_code ec;
        if (fs::create_directory(dir, ec)) return dir;
    }
    throw solver_error("cannot create solver work directory");
}

}  // namespace

bool subprocess_backend_available(const SolveOptions& opts) {
    const std::string cmd = driver_command(opts);
    if (cmd.empty()) return false;

    static std::mutex mu;
    static std::string probed_cmd;
    static bool probed_ok = false;
    std::lock_guard<std::mutex> lock(mu);
    if (cmd == probed_cmd) return probed_ok;
    const std::string full = cmd + " --probe > /dev/null 2>&1";
    probed_ok = std::system(full.c_str()) == 0;
    probed_cmd = cmd;
    return probed_ok;
}

Solution solve_subprocess(const MilpModel& m, const SolveOptions& opts) {
    const std::string cmd = driver_command(opts);
    if (cmd.empty())
        throw solver_error("no solver command configured (set HENOPT_SOLVER_CMD)");

    const fs::path dir = make_work_dir();
    const fs::path mps_path = dir / "model.mps";
    const fs::path sol_path = dir / "model.sol";
    const fs::path log_path = dir / "solver.log";

    {
        std::ofstream out(mps_path);
        out << emit_mps(m);
        if (!out) throw solver_error("cannot write " + mps_path.string());
    }

    std::ostringstream full;
    full << cmd << " " << mps_path << " " << sol_path << " --gap " << opts.mip_gap_target
         << " --time-limit " << opts.time_limit_s << " --threads " << opts.threads << " > "
         << log_path << " 2>&1";
    const int rc = std::system(full.str().c_str());
    if (rc != 0) {
        std::string log = read_file(log_path);
        throw solver_error("solver driver failed (exit " + std::to_string(rc) + "): " +
                           log.substr(0, 2000));
    }

    Solution sol = parse_solution_file(m, read_file(sol_path));
    std::error_code ec;
    fs::remove_all(dir, ec);

    if (sol.has_solution()) {
        // Snap binaries and treat near-target gaps as met.
        for (int j = 0; j < m.variable_count(); ++j)
            if (m.variables()[j].kind == VarKind::binary)
                sol.values[j] = std::round(sol.values[j]);
        if (sol.status == SolveStatus::timeout_with_incumbent &&
            sol.mip_gap <= opts.mip_gap_target)
            sol.status = SolveStatus::optimal_within_gap;
    }
    return sol;
}

}  // namespace henopt
