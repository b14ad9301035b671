#pragma once

#include <optional>
#include <string>
#include <vector>

#include "h2plan/model.hpp"

namespace h2plan {

struct HourlyTrace {
    std::vector<double> da_buy, da_sell, ez_in, hs_in, hs_out, nw, hd_curt, certified;
    std::vector<double> soc;  // H+1 entries
    std::map<std::string, std::vector<double>> ppa_out, ppa_curt;
};

struct DispatchAggregates {
    double da_bought_mwh = 0.0;
    double da_sold_mwh = 0.0;
    double ppa_energy_paid_mwh = 0.0;  // availability energy, paid whether used or not
    double curtailed_h2_mwh = 0.0;
    double served_h2_mwh = 0.0;
    double produced_h2_mwh = 0.0;
    double certified_h2_mwh = 0.0;  // hour-by-hour PPA-correlated output
    double grid_consumption_mwh = 0.0;
    double ez_load_factor = 0.0;  // 0 when no electrolyzer is installed
};

struct DispatchResult {
    std::string scenario_label;
    double operational_cost_eur = 0.0;
    DispatchAggregates agg;
    std::optional<HourlyTrace> trace;
};

/// Annual cost of a fixed set of design decisions at the prices in cfg.
double design_cost_value(const PlantConfig& cfg, const DesignDecisions& d);

/// Solves one scenario's dispatch with the design pinned, resale always
/// allowed and the test curtailment penalty active.
DispatchResult dispatch(const DesignDecisions& d, const Scenario& sc, const PlantConfig& cfg,
                        bool keep_trace = false, const SolverOptions& opts = {});

/// Levelised cost of hydrogen in EUR/kg against the contracted demand.
double lcoh(double design_cost_eur, double operational_cost_eur, const HourlySeries& demand,
            double kg_per_mwh);

struct TestReport {
    std::string design_label;
    std::string test_set_id;
    std::string config_hash;
    double design_cost_eur = 0.0;
    std::vector<std::string> scenario_labels;
    std::vector<double> operational_cost_eur;
    std::vector<double> lcoh_eur_kg;
    std::vector<double> load_factors;
    std::vector<double> rfnbo_shares;
    double mean_lcoh = 0.0;
    double worst_lcoh = 0.0;

    int size() const { return static_cast<int>(lcoh_eur_kg.size()); }
};

/// Dispatches every scenario of the test set independently and collects the
/// per-scenario LCOH distribution. Scenario order is preserved whatever the
/// number of worker threads.
TestReport run_test_set(const DesignDecisions& d, const ScenarioSet& test_set,
                        const PlantConfig& cfg, int jobs = 1, bool keep_traces = false,
                        std::vector<DispatchResult>* results_out = nullptr);

}  // namespace h2plan
