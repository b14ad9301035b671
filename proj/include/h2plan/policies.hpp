#pragma once

#include <set>
#include <string>
#include <vector>

#include "h2plan/model.hpp"

namespace h2plan {

enum class PolicyKind { AverageScenario, PessimisticExpert, Stochastic };

struct PolicySpec {
    PolicyKind kind = PolicyKind::Stochastic;
    double beta = 0.0;               // stochastic policies only
    bool no_arbitrage = false;       // forced on for AverageScenario, off for PessimisticExpert
    std::set<std::string> tags;      // uncertainty suffixes: da, p, dem
    bool demand_averaging = false;   // PessimisticExpert averaged-demand variant

    void validate() const;
};

std::string label(const PolicySpec& spec);
PolicySpec parse_label(const std::string& text);

/// Splits the yearly electrical requirement half/half between the cheapest
/// solar and the cheapest wind contract, sized by mean capacity factor.
std::map<std::string, double> pessimistic_expert_ppa_sizing(
    const std::vector<std::pair<PpaContract, double>>& contracts_with_cf,
    double annual_electrical_mwh, int hours);

struct ObjectiveBreakdown {
    double design_cost = 0.0;
    double expected_operational = 0.0;
    double cvar_operational = 0.0;
};

struct PolicySolution {
    std::string policy_label;
    PolicySpec spec;
    DesignDecisions design;
    ObjectiveBreakdown in_sample;
    double objective = 0.0;                  // composite value reported by the solver
    std::vector<double> scenario_costs;      // in-sample J^o per scenario
    double expected_consumption_mwh = 0.0;   // in-sample E[sum u_nw]
    std::string scenario_set_id;
    std::string config_hash;
};

/// Empirical CVaR of a discrete cost distribution.
double discrete_cvar(const std::vector<double>& costs, const std::vector<double>& probabilities,
                     double alpha);

/// Optimises the in-sample model according to the policy and returns the
/// design decisions with their in-sample breakdown. annual_electrical_mwh
/// overrides the expert policy's sizing basis; pass a non-finite value to use
/// expected demand / electrolyzer efficiency.
PolicySolution solve_policy(const PolicySpec& spec, const ScenarioSet& in_sample,
                            const PlantConfig& cfg, const SolverOptions& opts = {},
                            double annual_electrical_mwh = kInf);

}  // namespace h2plan
