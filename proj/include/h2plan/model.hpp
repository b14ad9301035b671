#pragma once

#include <map>
#include <string>
#include <vector>

#include "h2plan/lp.hpp"
#include "h2plan/scenario.hpp"

namespace h2plan {

/// Capital recovery: capex * r(1+r)^LT / ((1+r)^LT - 1). A zero rate falls
/// back to straight-line capex / lifetime.
double annualize_capex(double capex, int lifetime_years, double rate);

/// 1 iff hour h lies inside the product's delivery window.
int delivery_indicator(const FuturesProduct& product, int h);

struct StorageParams {
    double capex_energy_eur_mwh = 75000.0;
    double capex_power_eur_mw = 50000.0;
    int lifetime_years = 25;
    double charge_efficiency = 1.0;
    double discharge_efficiency = 1.0;
    double hourly_loss = 0.0;          // self-discharge fraction per hour
    double initial_soc_fraction = 0.5;
};

struct NetworkTariff {
    enum class SlotScheme { Single, SeasonPeak, Custom };

    SlotScheme scheme = SlotScheme::SeasonPeak;
    std::vector<double> subscription_cost_eur_mw_yr;  // per slot; missing entries read as 0
    std::vector<double> energy_charge_eur_mwh;        // per slot; missing entries read as 0
    std::vector<int> custom_slot_of_hour;             // 0-based slots, indexed by hour-1

    int slot_count() const;
    int slot_of_hour(int h) const;  // 0-based
    double subscription_cost(int slot) const;
    double energy_charge_at(int h) const;
};

/// Upper bounds on the first-stage decisions; +inf means unconstrained.
struct DesignBounds {
    double ez_power_mw = kInf;
    double storage_energy_mwh = kInf;
    double storage_power_mw = kInf;
    double network_power_mw = kInf;
    double network_subscription_mw = kInf;
};

struct RiskParams {
    double alpha = 0.9;  // CVaR quantile
    double beta = 0.0;   // weight on the CVaR term
};

struct PlantConfig {
    int horizon = kHoursPerYear;

    double ez_capex_eur_mw = 1.7e6;
    int ez_lifetime_years = 13;
    double ez_efficiency = 0.56;  // MWh H2 per MWh electricity

    StorageParams storage;

    double network_capex_eur_mw = 75000.0;
    int network_lifetime_years = 25;

    double discount_rate = 0.05;
    DesignBounds bounds;
    std::vector<PpaContract> ppas;
    std::vector<FuturesProduct> futures;
    NetworkTariff tariff;

    double curtail_penalty_optimize = 10000.0;  // EUR per MWh H2
    double curtail_penalty_test = 1000.0;
    double rfnbo_subsidy_eur_mwh = 0.0;  // per MWh H2 of certified output
    double rfnbo_min_share = 0.0;        // minimum certified fraction of yearly production

    RiskParams risk;
    bool no_arbitrage = false;
    double h2_kg_per_mwh = 33.33;

    void validate() const;
    double annualized_ez() const;
    double annualized_storage_energy() const;
    double annualized_storage_power() const;
    double annualized_network() const;
};

struct DesignDecisions {
    double ez_power_mw = 0.0;
    double storage_energy_mwh = 0.0;
    double storage_power_mw = 0.0;
    double network_power_mw = 0.0;
    std::map<std::string, double> baseload_mwh;   // futures id -> MWh
    std::map<std::string, double> peakload_mwh;   // futures id -> MWh
    std::vector<double> network_subscription_mw;  // per tariff slot
    std::map<std::string, double> ppa_peak_mw;    // park id -> MWp
};

struct LinearExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    void add(int col, double coeff) { if (coeff != 0.0) terms.emplace_back(col, coeff); }
    double eval(std::span<const double> x) const;
};

struct DesignColumns {
    int ez_p = -1, hs_e = -1, hs_p = -1, nw_p = -1;
    std::vector<int> futures;  // aligned with PlantConfig::futures
    std::vector<int> nw_sub;   // one per tariff slot
    std::vector<int> ppa;      // aligned with PlantConfig::ppas
    int count() const;
};

/// Column offsets of one scenario's operational block. Columns are grouped by
/// symbol, hours contiguous inside each group; the storage level has H+1
/// entries.
struct ScenarioColumns {
    int base = 0;
    int H = 0;
    int parks = 0;

    int da_out(int h) const { return base + 0 * H + h - 1; }
    int da_in(int h) const { return base + 1 * H + h - 1; }
    int ez_in(int h) const { return base + 2 * H + h - 1; }
    int hs_in(int h) const { return base + 3 * H + h - 1; }
    int hs_out(int h) const { return base + 4 * H + h - 1; }
    int nw(int h) const { return base + 5 * H + h - 1; }
    int hd_curt(int h) const { return base + 6 * H + h - 1; }
    int delta(int h) const { return base + 7 * H + h - 1; }
    int ppa_out(int a, int h) const { return base + (8 + 2 * a) * H + h - 1; }
    int ppa_curt(int a, int h) const { return base + (9 + 2 * a) * H + h - 1; }
    int soc(int h) const { return base + (8 + 2 * parks) * H + h - 1; }  // h in 1..H+1
    int count() const { return (9 + 2 * parks) * H + 1; }
};

enum class Phase { Optimize, Test };

struct AssembledModel {
    LinearProgram lp;
    Phase phase = Phase::Optimize;
    DesignColumns design;
    std::vector<ScenarioColumns> blocks;
    std::vector<LinearExpr> scenario_cost;  // J^o per scenario
    LinearExpr design_cost;                 // J^d
    std::vector<double> probabilities;
    int eta_col = -1;
    std::vector<int> zeta_cols;

    DesignDecisions extract_design(const Solution& sol, const PlantConfig& cfg) const;
    double design_cost_value(const Solution& sol) const { return design_cost.eval(sol.x); }
    double scenario_cost_value(int s, const Solution& sol) const {
        return scenario_cost[static_cast<std::size_t>(s)].eval(sol.x);
    }
};

// --- builders ---------------------------------------------------------------

DesignColumns register_design_columns(LinearProgram& lp, const PlantConfig& cfg);
ScenarioColumns register_scenario_columns(LinearProgram& lp, const PlantConfig& cfg,
                                          const Scenario& sc, int scenario_index);

/// Hourly coupling, balance, market and storage constraints for one scenario.
void build_stage_constraints(const Scenario& sc, const PlantConfig& cfg, LinearProgram& lp,
                             const DesignColumns& design, const ScenarioColumns& block,
                             int scenario_index);

/// Certified-green output caps, plus the minimum yearly share when configured.
void build_rfnbo(const Scenario& sc, const PlantConfig& cfg, LinearProgram& lp,
                 const DesignColumns& design, const ScenarioColumns& block, int scenario_index);

LinearExpr build_design_cost(const PlantConfig& cfg, const DesignColumns& design);

LinearExpr build_operational_cost(const Scenario& sc, const PlantConfig& cfg,
                                  const DesignColumns& design, const ScenarioColumns& block,
                                  Phase phase);

/// Adds the value-at-risk auxiliary, per-scenario excess variables and the
/// weighted objective  J^d + (1-beta) E[J^o] + beta (eta + E[excess]/(1-alpha)).
void build_cvar_objective(LinearProgram& lp, const std::vector<LinearExpr>& scenario_costs,
                          const std::vector<double>& probabilities, double beta, double alpha,
                          const LinearExpr& design_cost, int& eta_col, std::vector<int>& zeta_cols);

/// Pins every day-ahead sale column to zero.
void apply_no_arbitrage(AssembledModel& model);

AssembledModel assemble_two_stage(const PlantConfig& cfg, const ScenarioSet& set, Phase phase);

/// Clamps the first-stage columns to the given decisions (dispatch mode).
void fix_design(AssembledModel& model, const DesignDecisions& d, const PlantConfig& cfg);

}  // namespace h2plan
