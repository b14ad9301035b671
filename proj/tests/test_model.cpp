#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracle_lp.hpp"
#include "test_support.hpp"

using namespace h2plan;
using testkit::toy_plant;
using testkit::toy_scenario;

namespace {

// independent high-precision capital recovery, on a different numeric path
long double annuity_oracle(long double capex, int years, long double rate) {
    if (rate == 0.0L) return capex / years;
    const long double down = 1.0L - std::pow(1.0L + rate, static_cast<long double>(-years));
    return capex * rate / down;
}

}  // namespace

TEST_CASE("capex annualisation matches the closed form") {
    const double a = annualize_capex(1.7e6, 13, 0.05);
    CHECK(std::abs(a - static_cast<double>(annuity_oracle(1.7e6L, 13, 0.05L))) < 1e-4);
    CHECK(a == doctest::Approx(180974.8007851370).epsilon(1e-12));

    const double b = annualize_capex(75000, 25, 0.05);
    CHECK(std::abs(b - static_cast<double>(annuity_oracle(75000.0L, 25, 0.05L))) < 1e-6);
    CHECK(b == doctest::Approx(5321.4342974422).epsilon(1e-12));

    CHECK(annualize_capex(100, 1, 0.05) == doctest::Approx(105.0).epsilon(1e-14));

    // zero rate falls back to straight line
    CHECK(annualize_capex(1000, 10, 0.0) == doctest::Approx(100.0));
    CHECK_THROWS_AS(annualize_capex(1000, 0, 0.05), RangeError);
    CHECK_THROWS_AS(annualize_capex(1000, 10, -0.01), RangeError);
}

TEST_CASE("delivery indicator under the half-open convention") {
    FuturesProduct q1;
    q1.id = "q1";
    q1.h_begin = 1;
    q1.h_end_excl = resolve_window_end(1, 2191, {1, 2191, 4381, 6571});
    FuturesProduct q2;
    q2.id = "q2";
    q2.h_begin = 2191;
    q2.h_end_excl = resolve_window_end(2191, 4380, {1, 2191, 4381, 6571});

    CHECK(delivery_indicator(q1, 1) == 1);
    CHECK(delivery_indicator(q1, 2190) == 1);
    CHECK(delivery_indicator(q1, 2191) == 0);
    CHECK(delivery_indicator(q2, 2191) == 1);
    CHECK(q1.window_hours() == 2190);
    CHECK(q2.window_hours() == 2190);

    FuturesProduct year;
    year.id = "y";
    year.h_begin = 1;
    year.h_end_excl = 8761;
    CHECK(delivery_indicator(year, 1) == 1);
    CHECK(delivery_indicator(year, 8760) == 1);
}

TEST_CASE("registry column and row counts are deterministic") {
    // one scenario, two hours, one PPA, one futures id (both delivery profiles)
    PlantConfig cfg = toy_plant(2);
    const ScenarioSet set = ScenarioSet::uniform({toy_scenario("t", 2, 50.0, 0.5, 1.0)});
    const AssembledModel m = assemble_two_stage(cfg, set, Phase::Optimize);

    // design: 4 equipment + 2 futures + 1 tariff slot + 1 ppa
    CHECK(m.design.count() == 8);
    // operational block: (8 + 2A) columns per hour plus H+1 storage levels
    const int block = (8 + 2 * 1) * 2 + 3;
    CHECK(m.blocks[0].count() == block);
    // auxiliaries: value-at-risk level + one excess per scenario
    CHECK(m.lp.num_columns() == 8 + block + 2);

    // rows: per hour 5 caps + 3 balances + A ppa balances + soc step + 2 green caps,
    // per scenario H+1 soc caps + init + terminal + excess
    CHECK(m.lp.num_rows() == 2 * (11 + 1) + 3 + 3);

    // beta only reweights the objective; the constraint matrix is unchanged
    PlantConfig averse = cfg;
    averse.risk.beta = 0.9;
    const AssembledModel m2 = assemble_two_stage(averse, set, Phase::Optimize);
    REQUIRE(m2.lp.num_rows() == m.lp.num_rows());
    REQUIRE(m2.lp.num_columns() == m.lp.num_columns());
    for (int i = 0; i < m.lp.num_rows(); ++i) {
        auto [ca, va] = m.lp.row_entries(i);
        auto [cb, vb] = m2.lp.row_entries(i);
        REQUIRE(ca.size() == cb.size());
        for (std::size_t k = 0; k < ca.size(); ++k) {
            CHECK(ca[k] == cb[k]);
            CHECK(va[k] == vb[k]);
        }
        CHECK(m.lp.row_rhs(i) == m2.lp.row_rhs(i));
    }
}

TEST_CASE("all-zero instance admits the zero dispatch") {
    PlantConfig cfg = toy_plant(2);
    const ScenarioSet set = ScenarioSet::uniform({toy_scenario("z", 2, 0.0, 0.0, 0.0)});
    AssembledModel m = assemble_two_stage(cfg, set, Phase::Optimize);
    const Solution s = solve(m.lp);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("balance chain forces the unique dispatch for a sized design") {
    PlantConfig cfg = toy_plant(2);
    const double eta = cfg.ez_efficiency;  // 0.56
    const ScenarioSet set = ScenarioSet::uniform({toy_scenario("d", 2, 50.0, 0.0, eta)});
    AssembledModel m = assemble_two_stage(cfg, set, Phase::Test);
    DesignDecisions d;
    d.ez_power_mw = 1.0;
    d.network_power_mw = 1.0;
    d.network_subscription_mw = {1.0};
    fix_design(m, d, cfg);
    const Solution s = solve(m.lp);
    REQUIRE(s.status == SolveStatus::Optimal);
    const ScenarioColumns& b = m.blocks[0];
    for (int h = 1; h <= 2; ++h) {
        CHECK(s.value(b.ez_in(h)) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(s.value(b.nw(h)) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(s.value(b.da_out(h)) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(s.value(b.hd_curt(h)) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("hand-built storage round trip satisfies every row") {
    PlantConfig cfg = toy_plant(3);
    cfg.ez_efficiency = 0.5;
    cfg.storage.hourly_loss = 0.0;
    std::vector<double> demand = {0.0, 2.0, 0.0};
    Scenario sc = toy_scenario("soc", 3, 10.0, 0.0, 0.0);
    sc.demand = testkit::series_of(demand, Unit::MwH2);
    const ScenarioSet set = ScenarioSet::uniform({sc});
    AssembledModel m = assemble_two_stage(cfg, set, Phase::Optimize);

    std::vector<double> x(static_cast<std::size_t>(m.lp.num_columns()), 0.0);
    auto put = [&](int col, double v) { x[static_cast<std::size_t>(col)] = v; };
    put(m.design.ez_p, 4.0);
    put(m.design.hs_e, 10.0);
    put(m.design.hs_p, 5.0);
    put(m.design.nw_p, 4.0);
    put(m.design.nw_sub[0], 4.0);
    const ScenarioColumns& b = m.blocks[0];
    // hour 1: run the electrolyzer at 4 MW, store the 2 MWh of hydrogen
    put(b.ez_in(1), 4.0);
    put(b.nw(1), 4.0);
    put(b.da_out(1), 4.0);
    put(b.hs_in(1), 2.0);
    // hour 2: discharge 2 MWh to serve demand
    put(b.hs_out(2), 2.0);
    // storage level: starts at half of 10
    put(b.soc(1), 5.0);
    put(b.soc(2), 7.0);
    put(b.soc(3), 5.0);
    put(b.soc(4), 5.0);

    const auto rep = check_point(m.lp, x);
    CHECK(rep.max_bound_violation == doctest::Approx(0.0));
    CHECK(rep.max_row_violation == doctest::Approx(0.0));

    // draining the store at the horizon violates the terminal condition
    put(b.soc(4), 4.0);
    const auto bad = check_point(m.lp, x);
    CHECK(bad.max_row_violation > 0.9);
}

TEST_CASE("certified output is capped by PPA-powered production") {
    PlantConfig cfg = toy_plant(1);
    cfg.ez_efficiency = 0.56;
    cfg.rfnbo_subsidy_eur_mwh = 100.0;
    cfg.bounds.ez_power_mw = 8.0;
    Scenario sc = toy_scenario("green", 1, 20.0, 1.0, 8.0 * 0.56);
    const ScenarioSet set = ScenarioSet::uniform({sc});
    AssembledModel m = assemble_two_stage(cfg, set, Phase::Optimize);
    m.lp.fix_column(m.design.ppa[0], 10.0);  // 10 MW available at full availability
    const Solution s = solve(m.lp);
    REQUIRE(s.status == SolveStatus::Optimal);
    const ScenarioColumns& b = m.blocks[0];
    CHECK(s.value(b.ez_in(1)) == doctest::Approx(8.0).epsilon(1e-8));
    // delta <= min(ppa 10, ez 8) * 0.56
    CHECK(s.value(b.delta(1)) == doctest::Approx(4.48).epsilon(1e-8));
}

TEST_CASE("no-arbitrage pins day-ahead sales to zero") {
    PlantConfig cfg = toy_plant(24);
    cfg.no_arbitrage = true;
    // plentiful cheap PPA surplus makes resale attractive when allowed
    Scenario sc = toy_scenario("surplus", 24, 80.0, 1.0, 0.5);
    cfg.ppas[0].price_eur_mwh = 10.0;
    const ScenarioSet set = ScenarioSet::uniform({sc});

    AssembledModel na = assemble_two_stage(cfg, set, Phase::Optimize);
    const Solution s_na = solve(na.lp);
    REQUIRE(s_na.status == SolveStatus::Optimal);
    double sold = 0.0;
    for (int h = 1; h <= 24; ++h) sold += s_na.value(na.blocks[0].da_in(h));
    CHECK(sold == doctest::Approx(0.0));

    PlantConfig free_cfg = cfg;
    free_cfg.no_arbitrage = false;
    AssembledModel fr = assemble_two_stage(free_cfg, set, Phase::Optimize);
    const Solution s_fr = solve(fr.lp);
    REQUIRE(s_fr.status == SolveStatus::Optimal);
    // relaxing the resale restriction can only improve the optimum
    CHECK(s_fr.objective <= s_na.objective + 1e-6 * std::abs(s_na.objective));

    // the test phase never applies the restriction
    AssembledModel test_phase = assemble_two_stage(cfg, set, Phase::Test);
    bool any_sellable = false;
    for (int h = 1; h <= 24; ++h)
        if (test_phase.lp.upper(test_phase.blocks[0].da_in(h)) > 0.0) any_sellable = true;
    CHECK(any_sellable);
}

TEST_CASE("take-or-pay PPA cost ignores curtailment split") {
    PlantConfig cfg = toy_plant(2);
    Scenario sc = toy_scenario("top", 2, 0.0, 0.5, 0.0);
    const ScenarioSet set = ScenarioSet::uniform({sc});
    AssembledModel m = assemble_two_stage(cfg, set, Phase::Optimize);

    std::vector<double> x(static_cast<std::size_t>(m.lp.num_columns()), 0.0);
    x[static_cast<std::size_t>(m.design.ppa[0])] = 1.0;  // 1 MWp, availability 0.5 for 2 hours
    const double base_cost = m.scenario_cost[0].eval(x);
    CHECK(base_cost == doctest::Approx(66.0));  // 1 MWh at 66 EUR/MWh, paid despite zero dispatch

    // moving output between dispatch and curtailment leaves the cost unchanged
    x[static_cast<std::size_t>(m.blocks[0].ppa_curt(0, 1))] = 0.5;
    x[static_cast<std::size_t>(m.blocks[0].ppa_out(0, 2))] = 0.5;
    CHECK(m.scenario_cost[0].eval(x) == doctest::Approx(base_cost));
}

TEST_CASE("operational cost carries the phase curtailment penalty") {
    PlantConfig cfg = toy_plant(1);
    Scenario sc = toy_scenario("pen", 1, 50.0, 0.0, 1.0);
    const ScenarioSet set = ScenarioSet::uniform({sc});

    AssembledModel opt = assemble_two_stage(cfg, set, Phase::Optimize);
    AssembledModel tst = assemble_two_stage(cfg, set, Phase::Test);
    std::vector<double> x_opt(static_cast<std::size_t>(opt.lp.num_columns()), 0.0);
    std::vector<double> x_tst(static_cast<std::size_t>(tst.lp.num_columns()), 0.0);
    x_opt[static_cast<std::size_t>(opt.blocks[0].hd_curt(1))] = 1.0;
    x_tst[static_cast<std::size_t>(tst.blocks[0].hd_curt(1))] = 1.0;
    CHECK(opt.scenario_cost[0].eval(x_opt) == doctest::Approx(10000.0));
    CHECK(tst.scenario_cost[0].eval(x_tst) == doctest::Approx(1000.0));

    // buy one, sell one at the same price nets to zero
    std::vector<double> x0(static_cast<std::size_t>(tst.lp.num_columns()), 0.0);
    x0[static_cast<std::size_t>(tst.blocks[0].da_out(1))] = 1.0;
    x0[static_cast<std::size_t>(tst.blocks[0].da_in(1))] = 1.0;
    CHECK(tst.scenario_cost[0].eval(x0) == doctest::Approx(0.0));
}

TEST_CASE("design cost expression") {
    PlantConfig cfg = toy_plant(2);
    const ScenarioSet set = ScenarioSet::uniform({toy_scenario("jd", 2, 50.0, 0.5, 1.0)});
    AssembledModel m = assemble_two_stage(cfg, set, Phase::Optimize);

    std::vector<double> x(static_cast<std::size_t>(m.lp.num_columns()), 0.0);
    CHECK(m.design_cost.eval(x) == doctest::Approx(0.0));

    x[static_cast<std::size_t>(m.design.ez_p)] = 1.0;
    CHECK(m.design_cost.eval(x) == doctest::Approx(180974.8007851370).epsilon(1e-10));

    x[static_cast<std::size_t>(m.design.ez_p)] = 0.0;
    x[static_cast<std::size_t>(m.design.futures[0])] = 8760.0;  // baseload y at 70
    CHECK(m.design_cost.eval(x) == doctest::Approx(613200.0));
}

TEST_CASE("risk weighting: the linearized tail matches the worst scenario") {
    // ten fixed scenario costs 1e6..1e7 via pinned columns
    auto build = [&](double beta) {
        LinearProgram lp;
        std::vector<LinearExpr> costs;
        std::vector<double> probs(10, 0.1);
        for (int s = 0; s < 10; ++s) {
            const int col = lp.add_column("cost" + std::to_string(s), (s + 1) * 1e6, (s + 1) * 1e6);
            LinearExpr e;
            e.add(col, 1.0);
            costs.push_back(e);
        }
        LinearExpr jd;  // no design cost
        int eta = -1;
        std::vector<int> zetas;
        build_cvar_objective(lp, costs, probs, beta, 0.9, jd, eta, zetas);
        return solve(lp);
    };

    const Solution tail_only = build(1.0);
    REQUIRE(tail_only.status == SolveStatus::Optimal);
    CHECK(tail_only.objective == doctest::Approx(1e7).epsilon(1e-9));

    const Solution neutral = build(0.0);
    REQUIRE(neutral.status == SolveStatus::Optimal);
    CHECK(neutral.objective == doctest::Approx(5.5e6).epsilon(1e-12));

    const Solution mixed = build(0.9);
    REQUIRE(mixed.status == SolveStatus::Optimal);
    CHECK(mixed.objective == doctest::Approx(0.1 * 5.5e6 + 0.9 * 1e7).epsilon(1e-9));

    LinearProgram lp;
    LinearExpr jd;
    int eta = -1;
    std::vector<int> zetas;
    CHECK_THROWS_AS(build_cvar_objective(lp, {}, {}, 0.5, 1.0, jd, eta, zetas), ConfigError);
}

TEST_CASE("optimum ignores huge design bounds") {
    PlantConfig cfg = toy_plant(24);
    cfg.bounds.ez_power_mw = 1e6;
    cfg.bounds.storage_energy_mwh = 1e6;
    cfg.bounds.storage_power_mw = 1e6;
    cfg.bounds.network_power_mw = 1e6;
    Scenario sc = toy_scenario("big", 24, 45.0, 0.4, 1.5);
    AssembledModel m = assemble_two_stage(cfg, ScenarioSet::uniform({sc}), Phase::Optimize);
    const Solution s = solve(m.lp);
    REQUIRE(s.status == SolveStatus::Optimal);
    const DesignDecisions d = m.extract_design(s, cfg);
    CHECK(d.ez_power_mw < 1e5);
    CHECK(d.storage_energy_mwh < 1e5);
    CHECK(d.network_power_mw < 1e5);
}
