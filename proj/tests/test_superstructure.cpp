#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "henopt/errors.hpp"
#include "henopt/superstructure.hpp"
#include "oracles.hpp"

using namespace henopt;

namespace {

const std::string kDataDir = HENOPT_DATA_DIR;

StreamDef make_stream(const std::string& id, StreamKind kind, double t_in, double t_out,
                      double f) {
    StreamDef s;
    s.id = id;
    s.kind = kind;
    s.t_in = ParamModel::constant(t_in);
    s.t_out = ParamModel::constant(t_out);
    s.f = ParamModel::constant(f);
    s.u_coeff = 0.5;
    s.op_lower = 1.0;
    s.op_upper = 2.0;
    return s;
}

CaseDefinition tiny_case(const std::vector<StreamDef>& streams, int stages = 1,
                         double dt_min = 1.0) {
    CaseDefinition c;
    c.opvar = {"U", 1.0, 2.0};
    c.streams = streams;
    c.products.push_back({1, "fuel", 44.2, 750.0, 1.0});
    c.economics = {8000.0, 0.05, 1.0, 1e7,  20.0, {{"H2O", 3.54}},
                   1013.6, 61.8, 0.8,  1.05, 0.05};
    c.performance.p_sys = Pwl1D::line(1.0, 800.0, 2.0, 1100.0);
    c.performance.m_prod_total = Pwl1D::line(1.0, 39.0, 2.0, 53.0);
    c.performance.h_dot_prod = Pwl1D::line(1.0, 480.0, 2.0, 650.0);
    c.performance.feed_flows.emplace_back("H2O", Pwl1D::line(1.0, 0.35, 2.0, 0.36));
    c.hen_config = {stages, dt_min, {20.0, 25.0}, {900.0, 900.0}};
    return c;
}

LinExpr total_utility(const HenBlock& h) {
    LinExpr e;
    for (int i = 0; i < h.hot_count(); ++i)
        if (h.q_cu[i].valid()) e.add(h.q_cu[i], 1.0);
    for (int j = 0; j < h.cold_count(); ++j) e.add(h.q_hu[j], 1.0);
    return e;
}

SolveOptions bb_opts() {
    SolveOptions o;
    o.backend = SolveOptions::Backend::in_process;
    o.mip_gap_target = 1e-9;
    o.time_limit_s = 300.0;
    return o;
}

}  // namespace

TEST_CASE("big-M for a pair is the smaller maximum duty") {
    auto hot = make_stream("H", StreamKind::hot, 200.0, 100.0, 1.0);   // 100 kW
    auto cold = make_stream("C", StreamKind::cold, 50.0, 90.0, 1.0);   // 40 kW
    CHECK(big_m_for_pair(hot, cold, 1.0) == doctest::Approx(40.0));
    CHECK(big_m_for_pair(hot, cold, 1.0) ==
          big_m_for_pair(hot, cold, 1.0));  // independent of repeated evaluation

    // No temperature overlap: hot cannot reach the cold stream at all.
    auto cool_hot = make_stream("H2", StreamKind::hot, 40.0, 35.0, 2.0);
    auto hot_cold = make_stream("C2", StreamKind::cold, 116.9, 124.2, 20.0);
    CHECK(big_m_for_pair(cool_hot, hot_cold, 1.0) == 0.0);
}

TEST_CASE("reference pair big-M follows the tighter stream") {
    CaseDefinition c = load_case(kDataDir + "/reference_case.json");
    const StreamDef* h8 = c.find_stream("H8");
    const StreamDef* c4 = c.find_stream("C4");
    REQUIRE(h8);
    REQUIRE(c4);
    CHECK(big_m_for_pair(*h8, *c4, 1.0) == doctest::Approx(94.4));
}

TEST_CASE("single-match network recovers the full overlapping duty") {
    // 1 hot (150->50, F=1), 1 cold (20->120, F=1), 1 stage: both directions
    // admit the full 100 kW at the minimum approach of 1 K.
    CaseDefinition c = tiny_case({make_stream("H1", StreamKind::hot, 150.0, 50.0, 1.0),
                                  make_stream("C1", StreamKind::cold, 20.0, 120.0, 1.0)});
    MilpModel m;
    HenBlock h = build_hen(m, c, HenMode::coupled_mode());
    m.set_objective(total_utility(h));

    Solution milp = solve_branch_and_bound(m, bb_opts());
    REQUIRE(milp.status == SolveStatus::optimal_within_gap);
    const double enumerated = oracle::enumerate_binary_patterns(m, oracle::all_binaries(m));
    CHECK(milp.objective_value == doctest::Approx(enumerated).epsilon(1e-6));
    // Full recovery: hot has 100 kW, cold needs 100 kW, approaches 30/30 K.
    CHECK(milp.objective_value == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));

    HenDesign d = extract_design(milp, h, c);
    REQUIRE(d.matches.size() == 1);
    CHECK(d.matches[0].duty == doctest::Approx(100.0));
    CHECK(check_solution_structure(milp, h, c).empty());
}

TEST_CASE("approach-limited instance leaves duty on the table") {
    // With a 31 K minimum approach the cold outlet pinches the match at 99 kW.
    CaseDefinition c = tiny_case({make_stream("H1", StreamKind::hot, 150.0, 50.0, 1.0),
                                  make_stream("C1", StreamKind::cold, 20.0, 120.0, 1.0)},
                                 1, 31.0);
    MilpModel m;
    HenBlock h = build_hen(m, c, HenMode::coupled_mode());
    m.set_objective(total_utility(h));
    Solution milp = solve_branch_and_bound(m, bb_opts());
    REQUIRE(milp.status == SolveStatus::optimal_within_gap);
    const double enumerated = oracle::enumerate_binary_patterns(m, oracle::all_binaries(m));
    CHECK(milp.objective_value == doctest::Approx(enumerated).epsilon(1e-6));
    CHECK(milp.objective_value == doctest::Approx(2.0).epsilon(1e-6));  // 1 kW on each utility
    HenDesign d = extract_design(milp, h, c);
    REQUIRE(d.matches.size() == 1);
    CHECK(d.matches[0].duty == doctest::Approx(99.0));
}

TEST_CASE("randomized tiny instances match the enumeration oracle") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> tin_h(120.0, 220.0), tout_c(90.0, 160.0);
    std::uniform_real_distribution<double> drop(30.0, 80.0), fcap(0.5, 3.0);
    std::uniform_int_distribution<int> count(1, 2);

    for (int inst = 0; inst < 5; ++inst) {
        std::vector<StreamDef> streams;
        const int nh = count(rng), nc = count(rng);
        for (int i = 0; i < nh; ++i) {
            const double tin = tin_h(rng);
            streams.push_back(make_stream("H" + std::to_string(i + 1), StreamKind::hot, tin,
                                          tin - drop(rng), fcap(rng)));
        }
        for (int j = 0; j < nc; ++j) {
            const double tout = tout_c(rng);
            streams.push_back(make_stream("C" + std::to_string(j + 1), StreamKind::cold,
                                          tout - drop(rng), tout, fcap(rng)));
        }
        CaseDefinition c = tiny_case(streams);
        MilpModel m;
        HenBlock h = build_hen(m, c, HenMode::coupled_mode());
        m.set_objective(total_utility(h));

        Solution milp = solve_branch_and_bound(m, bb_opts());
        REQUIRE(milp.status == SolveStatus::optimal_within_gap);
        const double enumerated = oracle::enumerate_binary_patterns(m, oracle::all_binaries(m));
        const double scale = std::max(1.0, std::fabs(enumerated));
        CHECK(std::fabs(milp.objective_value - enumerated) / scale <= 1e-6);
        CHECK(check_solution_structure(milp, h, c).empty());
    }
}

TEST_CASE("reference case builds a coupled block of the expected shape") {
    CaseDefinition c = load_case(kDataDir + "/reference_case.json");
    MilpModel m;
    HenBlock h = build_hen(m, c, HenMode::coupled_mode());
    CHECK(h.hot_count() == 15);  // 12 hot + 3 cs
    CHECK(h.cold_count() == 7);
    CHECK(h.stages == 3);
    // order-of-magnitude check on the model size
    CHECK(m.variable_count() >= 1000);
    CHECK(m.variable_count() <= 10000);
    MESSAGE("reference model: ", m.variable_count(), " vars (", m.binary_count(), " binary), ",
            m.constraint_count(), " constraints");

    int pruned = 0, active = 0;
    for (int i = 0; i < h.hot_count(); ++i)
        for (int j = 0; j < h.cold_count(); ++j)
            (h.pair_active(i, j) ? active : pruned)++;
    CHECK(pruned > 0);  // thermodynamically impossible pairs are dropped
    CHECK(active > 0);
    MESSAGE("pairs: ", active, " active, ", pruned, " pruned");
}

TEST_CASE("fixed operating point collapses the operating encodings") {
    CaseDefinition c = load_case(kDataDir + "/reference_case.json");
    MilpModel coupled, fixed;
    HenBlock hc = build_hen(coupled, c, HenMode::coupled_mode());
    HenBlock hf = build_hen(fixed, c, HenMode::fixed_opvar(1.305));
    CHECK(fixed.variable(hf.opvar).lower == 1.305);
    CHECK(fixed.variable(hf.opvar).upper == 1.305);
    CHECK(fixed.binary_count() < coupled.binary_count());
    // whole-stream duties are pinned to their fixed-point values
    const StreamDef* h9 = c.find_stream("H9");
    REQUIRE(h9);
    auto [tin, tout, f] = stream_parameter_at(*h9, 1.305);
    int idx = -1;
    for (int i = 0; i < hf.hot_count(); ++i)
        if (hf.hot[i]->id == "H9") idx = i;
    REQUIRE(idx >= 0);
    CHECK(fixed.variable(hf.q_total_hot[idx]).lower ==
          doctest::Approx(f * (tin - tout)).epsilon(1e-12));

    CHECK_THROWS_AS(build_hen(fixed, c, HenMode::fixed_opvar(1.5)), domain_error);
}

TEST_CASE("extraction reproduces fabricated empirical-design totals") {
    CaseDefinition c = load_case(kDataDir + "/reference_case.json");
    MilpModel m;
    HenBlock h = build_hen(m, c, HenMode::coupled_mode());

    Solution sol;
    sol.status = SolveStatus::optimal_within_gap;
    sol.values.assign(m.variable_count(), 0.0);
    sol.values[h.opvar.index] = 1.275;

    // 17 matches across active pairs, weighted by their duty caps.
    std::vector<std::pair<int, int>> picked;
    double weight = 0.0;
    for (int i = 0; i < h.hot_count() && picked.size() < 17; ++i)
        for (int j = 0; j < h.cold_count() && picked.size() < 17; ++j)
            if (h.pair_active(i, j) && h.big_m[i][j] >= 20.0) {
                picked.emplace_back(i, j);
                weight += h.big_m[i][j];
            }
    REQUIRE(picked.size() == 17);
    for (auto [i, j] : picked) {
        sol.values[h.z[i][j][0].index] = 1.0;
        sol.values[h.q[i][j][0].index] = h.big_m[i][j] / weight * 717.34;
        sol.values[h.dt[i][j][0].index] = 20.0;
        sol.values[h.dt[i][j][1].index] = 10.0;
    }
    // 9 cold utilities weighted by stream duty, one 5.90 kW hot utility.
    std::vector<int> cu;
    double cu_weight = 0.0;
    for (int i = 0; i < h.hot_count() && cu.size() < 9; ++i) {
        if (h.is_cs(i)) continue;
        cu.push_back(i);
        cu_weight += m.variable(h.q_total_hot[i]).upper;
    }
    REQUIRE(cu.size() == 9);
    for (int i : cu) {
        sol.values[h.z_cu[i].index] = 1.0;
        sol.values[h.q_cu[i].index] = m.variable(h.q_total_hot[i]).upper / cu_weight * 222.25;
        sol.values[h.t_hot[i][h.stages].index] = m.variable(h.t_hot[i][h.stages]).lower;
    }
    int c6 = -1;
    for (int j = 0; j < h.cold_count(); ++j)
        if (h.cold[j]->id == "C6") c6 = j;
    REQUIRE(c6 >= 0);
    sol.values[h.z_hu[c6].index] = 1.0;
    sol.values[h.q_hu[c6].index] = 5.90;
    sol.values[h.t_cold[c6][0].index] = 100.0;
    for (int i = 0; i < h.hot_count(); ++i) {
        if (!h.is_cs(i)) continue;
        sol.values[h.cs_flow[i].index] = h.hot[i]->f.free_lower();
        sol.values[h.cs_t_out[i].index] = 890.0;
    }

    HenDesign d = extract_design(sol, h, c);
    CHECK(d.hex_count == 27);
    CHECK(d.matches.size() == 17);
    CHECK(d.total_match_duty() == doctest::Approx(717.34).epsilon(1e-9));
    CHECK(d.total_cold_utility() == doctest::Approx(222.25).epsilon(1e-9));
    CHECK(d.total_hot_utility() == doctest::Approx(5.90).epsilon(1e-9));
    CHECK(d.u == doctest::Approx(1.275));
    CHECK(d.cs_settings.size() == 3);
    for (const auto& match : d.matches) {
        CHECK(match.area > 0.0);
        CHECK(match.lmtd == doctest::Approx(chen_lmtd(20.0, 10.0)));
    }
}

TEST_CASE("all-zero existence yields an empty design with utilities carrying the load") {
    CaseDefinition c = tiny_case({make_stream("H1", StreamKind::hot, 150.0, 50.0, 1.0),
                                  make_stream("C1", StreamKind::cold, 20.0, 120.0, 1.0)});
    MilpModel m;
    HenBlock h = build_hen(m, c, HenMode::coupled_mode());
    // forbid the match, then minimize utilities
    for (int k = 0; k < h.stages; ++k)
        if (h.z[0][0][k].valid()) m.set_bounds(h.z[0][0][k], 0.0, 0.0);
    m.set_objective(total_utility(h));
    Solution s = solve_branch_and_bound(m, bb_opts());
    REQUIRE(s.status == SolveStatus::optimal_within_gap);
    HenDesign d = extract_design(s, h, c);
    CHECK(d.matches.empty());
    CHECK(d.total_cold_utility() == doctest::Approx(100.0));
    CHECK(d.total_hot_utility() == doctest::Approx(100.0));
    CHECK(check_solution_structure(s, h, c).empty());
}

TEST_CASE("chen approximation reproduces the log mean within a percent") {
    auto true_lmtd = [](double a, double b) { return (a - b) / std::log(a / b); };
    CHECK(chen_lmtd(30.0, 30.0) == doctest::Approx(30.0));
    CHECK(chen_lmtd(40.0, 10.0) == doctest::Approx(true_lmtd(40.0, 10.0)).epsilon(0.02));
    CHECK(chen_lmtd(100.0, 5.0) == doctest::Approx(true_lmtd(100.0, 5.0)).epsilon(0.10));
}
