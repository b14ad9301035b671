#include <cmath>

#include "doctest.h"
#include "test_support.hpp"

#include "h2plan/policies.hpp"

using namespace h2plan;
using testkit::toy_plant;
using testkit::toy_scenario;

TEST_CASE("expert PPA split reproduces the case-study sizing") {
    std::vector<std::pair<PpaContract, double>> contracts = {
        {{"albi_solar", PpaContract::Tech::Solar, 66.0, kInf}, 0.168},
        {{"calais_wind", PpaContract::Tech::Wind, 65.0, kInf}, 0.427},
    };
    const auto sizing = pessimistic_expert_ppa_sizing(contracts, 34000.0, 8760);
    CHECK(sizing.at("albi_solar") == doctest::Approx(11.5514242227).epsilon(1e-9));
    CHECK(sizing.at("calais_wind") == doctest::Approx(4.5448226450).epsilon(1e-9));
    // within 5% of the published 11.9 / 4.6 MWp
    CHECK(std::abs(sizing.at("albi_solar") - 11.9) / 11.9 < 0.05);
    CHECK(std::abs(sizing.at("calais_wind") - 4.6) / 4.6 < 0.05);

    const auto zeros = pessimistic_expert_ppa_sizing(contracts, 0.0, 8760);
    CHECK(zeros.at("albi_solar") == 0.0);
    CHECK(zeros.at("calais_wind") == 0.0);

    // cheapest contract of each technology wins
    contracts.push_back({{"lemans_solar", PpaContract::Tech::Solar, 68.0, kInf}, 0.15});
    const auto pick = pessimistic_expert_ppa_sizing(contracts, 1000.0, 8760);
    CHECK(pick.at("albi_solar") > 0.0);
    CHECK(pick.at("lemans_solar") == 0.0);

    std::vector<std::pair<PpaContract, double>> solar_only = {contracts[0]};
    CHECK_THROWS_AS(pessimistic_expert_ppa_sizing(solar_only, 1000.0, 8760), PolicyError);
}

TEST_CASE("policy labels follow the published notation") {
    PolicySpec as;
    as.kind = PolicyKind::AverageScenario;
    as.no_arbitrage = true;
    CHECK(label(as) == "D_AS(NA)");

    PolicySpec pe;
    pe.kind = PolicyKind::PessimisticExpert;
    CHECK(label(pe) == "D_PE");
    pe.demand_averaging = true;
    CHECK(label(pe) == "D_PE(A.dem)");

    PolicySpec st;
    st.kind = PolicyKind::Stochastic;
    st.beta = 0.9;
    st.tags = {"da", "p"};
    CHECK(label(st) == "S_β0.9(da,p)");
    st.no_arbitrage = true;
    CHECK(label(st) == "S_β0.9(NA)(da,p)");
    st.beta = 0.0;
    CHECK(label(st) == "S_β0(NA)(da,p)");
    st.no_arbitrage = false;
    st.beta = 0.9;
    st.tags = {"da", "p", "dem"};
    CHECK(label(st) == "S_β0.9(da,p,dem)");
}

TEST_CASE("labels round-trip through the parser") {
    const std::vector<std::string> canon = {
        "D_AS(NA)",         "D_PE",
        "D_PE(A.dem)",      "S_β0(NA)(da,p)",
        "S_β0.9(da,p)", "S_β0.9(NA)(da,p)",
        "S_β0.9(da,p,dem)"};
    for (const auto& text : canon) {
        const PolicySpec spec = parse_label(text);
        CHECK(label(spec) == text);
    }
    // ASCII beta accepted on input, canonicalised on output
    CHECK(label(parse_label("S_b0.9(da,p)")) == "S_β0.9(da,p)");
    CHECK_THROWS_AS(parse_label("X_unknown"), PolicyError);
    CHECK_THROWS_AS(parse_label("S_β0.9(da,p"), PolicyError);
    CHECK_THROWS_AS(parse_label("S_β0.9(da,q)"), PolicyError);
}

TEST_CASE("spec validation ties flags to policy kinds") {
    PolicySpec bad_as;
    bad_as.kind = PolicyKind::AverageScenario;
    bad_as.no_arbitrage = false;
    CHECK_THROWS_AS(bad_as.validate(), PolicyError);

    PolicySpec bad_pe;
    bad_pe.kind = PolicyKind::PessimisticExpert;
    bad_pe.no_arbitrage = true;
    CHECK_THROWS_AS(bad_pe.validate(), PolicyError);
}

TEST_CASE("stochastic beta zero on one scenario equals the deterministic solve") {
    PlantConfig cfg = toy_plant(24);
    Scenario sc = toy_scenario("one", 24, 45.0, 0.4, 1.0);
    const ScenarioSet set = ScenarioSet::uniform({sc});

    PolicySpec det;
    det.kind = PolicyKind::AverageScenario;
    det.no_arbitrage = true;

    PolicySpec sto;
    sto.kind = PolicyKind::Stochastic;
    sto.beta = 0.0;
    sto.no_arbitrage = true;

    const PolicySolution a = solve_policy(det, set, cfg);
    const PolicySolution b = solve_policy(sto, set, cfg);
    CHECK(a.design.ez_power_mw == doctest::Approx(b.design.ez_power_mw).epsilon(1e-6));
    CHECK(a.design.storage_energy_mwh == doctest::Approx(b.design.storage_energy_mwh).epsilon(1e-6));
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-8));
}

TEST_CASE("demand tag must match the in-sample set") {
    PlantConfig cfg = toy_plant(24);
    const ScenarioSet flat = ScenarioSet::uniform(
        {toy_scenario("a", 24, 40.0, 0.4, 1.0), toy_scenario("b", 24, 60.0, 0.5, 1.0)});

    PolicySpec tagged;
    tagged.kind = PolicyKind::Stochastic;
    tagged.beta = 0.9;
    tagged.tags = {"da", "p", "dem"};
    CHECK_THROWS_AS(solve_policy(tagged, flat, cfg), PolicyError);

    ScenarioSet mixed = flat;
    mixed.scenarios[1].demand = HourlySeries::constant(2.0, 24, Unit::MwH2);
    PolicySpec untagged = tagged;
    untagged.tags = {"da", "p"};
    CHECK_THROWS_AS(solve_policy(untagged, mixed, cfg), PolicyError);
    CHECK_NOTHROW(solve_policy(tagged, mixed, cfg));
}

TEST_CASE("expert policy pins the heuristic PPA capacities") {
    PlantConfig cfg = toy_plant(24);
    cfg.ppas.push_back({"park_w", PpaContract::Tech::Wind, 60.0, kInf});
    Scenario sc = toy_scenario("pe", 24, 55.0, 0.5, 1.0);
    sc.ppa_availability["park_w"] = HourlySeries::constant(0.4, 24, Unit::AvailabilityFraction);
    const ScenarioSet set = ScenarioSet::uniform({sc});

    PolicySpec pe;
    pe.kind = PolicyKind::PessimisticExpert;
    const double annual_electrical = 240.0;
    const PolicySolution ps = solve_policy(pe, set, cfg, {}, annual_electrical);

    // half of the requirement from each technology at the in-sample capacity factor
    CHECK(ps.design.ppa_peak_mw.at("park_a") == doctest::Approx(120.0 / (0.5 * 24)).epsilon(1e-8));
    CHECK(ps.design.ppa_peak_mw.at("park_w") == doctest::Approx(120.0 / (0.4 * 24)).epsilon(1e-8));
}

TEST_CASE("discrete tail expectation") {
    std::vector<double> costs;
    std::vector<double> probs(10, 0.1);
    for (int i = 1; i <= 10; ++i) costs.push_back(1e6 * i);
    CHECK(discrete_cvar(costs, probs, 0.9) == doctest::Approx(1e7).epsilon(1e-12));
    CHECK(discrete_cvar(costs, probs, 0.0) == doctest::Approx(5.5e6).epsilon(1e-12));
    // middle quantile: worst half expectation at alpha = 0.5
    CHECK(discrete_cvar(costs, probs, 0.5) == doctest::Approx(8e6).epsilon(1e-12));
    CHECK_THROWS_AS(discrete_cvar(costs, probs, 1.0), ConfigError);
}
