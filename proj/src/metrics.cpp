#include "h2plan/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace h2plan {

PolicyDelta policy_delta(const TestReport& a, const TestReport& b, const std::string& name) {
    if (a.test_set_id != b.test_set_id)
        throw ComparisonError("reports were produced on different test sets ('" + a.test_set_id +
                              "' vs '" + b.test_set_id + "')");
    if (a.mean_lcoh == 0.0 || a.worst_lcoh == 0.0)
        throw DegenerateError("baseline report has a zero LCOH, delta undefined");
    PolicyDelta d;
    d.metric = name;
    d.baseline = a.design_label;
    d.comparison = b.design_label;
    d.mean_delta = (a.mean_lcoh - b.mean_lcoh) / a.mean_lcoh;
    d.worst_delta = (a.worst_lcoh - b.worst_lcoh) / a.worst_lcoh;
    return d;
}

double hedge_ratio(const PolicySolution& solution, const ScenarioSet& in_sample,
                   const PlantConfig& cfg) {
    in_sample.validate();
    if (!(solution.expected_consumption_mwh > 0.0))
        throw DegenerateError("expected consumption is zero, hedge ratio undefined");

    double ppa_energy = 0.0;
    for (const auto& contract : cfg.ppas) {
        auto it = solution.design.ppa_peak_mw.find(contract.park_id);
        if (it == solution.design.ppa_peak_mw.end() || it->second == 0.0) continue;
        double expected_avail = 0.0;
        for (int s = 0; s < in_sample.size(); ++s)
            expected_avail += in_sample.probabilities[static_cast<std::size_t>(s)] *
                              in_sample.scenarios[static_cast<std::size_t>(s)]
                                  .ppa_availability.at(contract.park_id)
                                  .sum();
        ppa_energy += it->second * expected_avail;
    }
    double futures_energy = 0.0;
    for (const auto& [id, mwh] : solution.design.baseload_mwh) futures_energy += mwh;
    for (const auto& [id, mwh] : solution.design.peakload_mwh) futures_energy += mwh;

    return (ppa_energy + futures_energy) / solution.expected_consumption_mwh;
}

double rfnbo_share(const DispatchResult& result) {
    if (!(result.agg.produced_h2_mwh > 0.0))
        throw DegenerateError("no production in scenario '" + result.scenario_label + "'");
    return std::clamp(result.agg.certified_h2_mwh / result.agg.produced_h2_mwh, 0.0, 1.0);
}

std::pair<double, double> lcoh_summary(const TestReport& report) {
    if (report.size() == 0) throw SchemaError("empty test report");
    double sum = 0.0, worst = -kInf;
    for (double v : report.lcoh_eur_kg) {
        sum += v;
        worst = std::max(worst, v);
    }
    return {sum / static_cast<double>(report.size()), worst};
}

}  // namespace h2plan
