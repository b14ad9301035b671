#pragma once

#include <string>

#include "h2plan/policies.hpp"
#include "h2plan/simulate.hpp"

namespace h2plan {

/// Relative improvement of report B over baseline A, on mean and worst LCOH.
/// Positive values mean B performed better.
struct PolicyDelta {
    std::string metric;
    std::string baseline;
    std::string comparison;
    double mean_delta = 0.0;   // (mean_A - mean_B) / mean_A
    double worst_delta = 0.0;  // (worst_A - worst_B) / worst_A
};

PolicyDelta policy_delta(const TestReport& a, const TestReport& b, const std::string& name);

/// Expected hedged energy (PPA availability plus futures volume) over expected
/// grid consumption for the in-sample scenarios. May exceed 1 when over-hedged.
double hedge_ratio(const PolicySolution& solution, const ScenarioSet& in_sample,
                   const PlantConfig& cfg);

/// Certified-green share of yearly production for one dispatched scenario.
double rfnbo_share(const DispatchResult& result);

/// (mean, worst) LCOH of a report; test scenarios are weighted equally.
std::pair<double, double> lcoh_summary(const TestReport& report);

}  // namespace h2plan
