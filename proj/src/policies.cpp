#include "h2plan/policies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace h2plan {

void PolicySpec::validate() const {
    if (kind == PolicyKind::AverageScenario && !no_arbitrage)
        throw PolicyError("the average-scenario policy requires the no-arbitrage formulation");
    if (kind == PolicyKind::PessimisticExpert && no_arbitrage)
        throw PolicyError("the pessimistic-expert policy does not use the no-arbitrage formulation");
    if (kind != PolicyKind::Stochastic) {
        if (!tags.empty()) throw PolicyError("uncertainty tags apply to stochastic policies only");
        if (beta != 0.0) throw PolicyError("beta applies to stochastic policies only");
    }
    if (kind != PolicyKind::PessimisticExpert && demand_averaging)
        throw PolicyError("demand averaging is a pessimistic-expert variant");
    if (beta < 0.0 || beta > 1.0) throw PolicyError("beta must lie in [0,1]");
    for (const auto& t : tags)
        if (t != "da" && t != "p" && t != "dem") throw PolicyError("unknown uncertainty tag '" + t + "'");
}

std::string label(const PolicySpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case PolicyKind::AverageScenario: return "D_AS(NA)";
        case PolicyKind::PessimisticExpert: return spec.demand_averaging ? "D_PE(A.dem)" : "D_PE";
        case PolicyKind::Stochastic: break;
    }
    char beta_buf[32];
    std::snprintf(beta_buf, sizeof(beta_buf), "%g", spec.beta);
    std::string out = std::string("S_β") + beta_buf;
    if (spec.no_arbitrage) out += "(NA)";
    std::string tag_part;
    for (const char* t : {"da", "p", "dem"})
        if (spec.tags.count(t)) {
            if (!tag_part.empty()) tag_part += ",";
            tag_part += t;
        }
    if (!tag_part.empty()) out += "(" + tag_part + ")";
    return out;
}

PolicySpec parse_label(const std::string& text) {
    PolicySpec spec;
    std::string_view s(text);

    auto take_group = [&](std::string_view& v) -> std::string {
        if (v.empty() || v.front() != '(') return {};
        const auto close = v.find(')');
        if (close == std::string_view::npos) throw PolicyError("unbalanced parentheses in '" + text + "'");
        std::string inner(v.substr(1, close - 1));
        v.remove_prefix(close + 1);
        return inner;
    };

    if (s.rfind("D_AS", 0) == 0) {
        s.remove_prefix(4);
        spec.kind = PolicyKind::AverageScenario;
        spec.no_arbitrage = true;
        const std::string g = take_group(s);
        if (!g.empty() && g != "NA") throw PolicyError("unexpected suffix '" + g + "' in '" + text + "'");
        if (!s.empty()) throw PolicyError("trailing text in policy label '" + text + "'");
        return spec;
    }
    if (s.rfind("D_PE", 0) == 0) {
        s.remove_prefix(4);
        spec.kind = PolicyKind::PessimisticExpert;
        const std::string g = take_group(s);
        if (g == "A.dem")
            spec.demand_averaging = true;
        else if (!g.empty())
            throw PolicyError("unexpected suffix '" + g + "' in '" + text + "'");
        if (!s.empty()) throw PolicyError("trailing text in policy label '" + text + "'");
        return spec;
    }

    // stochastic labels: S_<beta> with optional (NA) and a tag group
    if (s.rfind("S_", 0) != 0) throw PolicyError("unrecognised policy label '" + text + "'");
    s.remove_prefix(2);
    if (s.rfind("β", 0) == 0)
        s.remove_prefix(2);  // UTF-8 beta
    else if (!s.empty() && (s.front() == 'b' || s.front() == 'B'))
        s.remove_prefix(1);
    else
        throw PolicyError("expected a beta value in '" + text + "'");

    std::size_t pos = 0;
    while (pos < s.size() && s[pos] != '(') ++pos;
    const std::string beta_str(s.substr(0, pos));
    s.remove_prefix(pos);
    char* end = nullptr;
    spec.kind = PolicyKind::Stochastic;
    spec.beta = std::strtod(beta_str.c_str(), &end);
    if (beta_str.empty() || (end && *end != '\0'))
        throw PolicyError("cannot parse beta from '" + text + "'");

    while (!s.empty()) {
        const std::string g = take_group(s);
        if (g == "NA") {
            spec.no_arbitrage = true;
            continue;
        }
        std::size_t start = 0;
        while (start <= g.size()) {
            const auto comma = g.find(',', start);
            const std::string tag =
                g.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!tag.empty()) spec.tags.insert(tag);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    spec.validate();
    return spec;
}

std::map<std::string, double> pessimistic_expert_ppa_sizing(
    const std::vector<std::pair<PpaContract, double>>& contracts_with_cf,
    double annual_electrical_mwh, int hours) {
    if (hours < 1) throw RangeError("horizon must be positive");
    if (annual_electrical_mwh < 0.0) throw RangeError("annual electrical requirement must be non-negative");

    std::map<std::string, double> sizing;
    for (const auto& [contract, cf] : contracts_with_cf) sizing[contract.park_id] = 0.0;
    if (annual_electrical_mwh == 0.0) return sizing;

    auto cheapest = [&](PpaContract::Tech tech) -> const std::pair<PpaContract, double>* {
        const std::pair<PpaContract, double>* best = nullptr;
        for (const auto& entry : contracts_with_cf) {
            if (entry.first.technology != tech) continue;
            if (!best || entry.first.price_eur_mwh < best->first.price_eur_mwh ||
                (entry.first.price_eur_mwh == best->first.price_eur_mwh &&
                 entry.first.park_id < best->first.park_id))
                best = &entry;
        }
        return best;
    };

    const auto* solar = cheapest(PpaContract::Tech::Solar);
    const auto* wind = cheapest(PpaContract::Tech::Wind);
    if (!solar) throw PolicyError("no solar contract available for the expert split");
    if (!wind) throw PolicyError("no wind contract available for the expert split");

    for (const auto* pick : {solar, wind}) {
        if (!(pick->second > 0.0))
            throw DegenerateError("capacity factor of " + pick->first.park_id + " is zero");
        sizing[pick->first.park_id] =
            0.5 * annual_electrical_mwh / (pick->second * static_cast<double>(hours));
    }
    return sizing;
}

double discrete_cvar(const std::vector<double>& costs, const std::vector<double>& probabilities,
                     double alpha) {
    if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("alpha must lie in [0,1)");
    if (costs.empty() || costs.size() != probabilities.size())
        throw SchemaError("cost / probability size mismatch");

    std::vector<std::size_t> order(costs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });

    double cum = 0.0;
    double var = costs[order.back()];
    for (std::size_t i : order) {
        cum += probabilities[i];
        if (cum >= alpha - 1e-12) {
            var = costs[i];
            break;
        }
    }
    double excess = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i)
        excess += probabilities[i] * std::max(0.0, costs[i] - var);
    return var + excess / (1.0 - alpha);
}

namespace {

bool identical_series(const HourlySeries& a, const HourlySeries& b) {
    return a.values == b.values;
}

void check_tags_against_set(const PolicySpec& spec, const ScenarioSet& set) {
    if (spec.kind != PolicyKind::Stochastic) return;
    bool demand_varies = false;
    for (std::size_t i = 1; i < set.scenarios.size(); ++i)
        if (!identical_series(set.scenarios[i].demand, set.scenarios.front().demand))
            demand_varies = true;
    if (spec.tags.count("dem") && !demand_varies)
        throw PolicyError("policy expects demand uncertainty but every scenario shares one profile");
    if (!spec.tags.count("dem") && demand_varies)
        throw PolicyError("in-sample demand varies but the policy label carries no dem tag");
    if (!spec.tags.empty() && set.size() < 2)
        throw PolicyError("uncertainty tags require at least two in-sample scenarios");
}

}  // namespace

PolicySolution solve_policy(const PolicySpec& spec, const ScenarioSet& in_sample,
                            const PlantConfig& cfg, const SolverOptions& opts,
                            double annual_electrical_mwh) {
    spec.validate();
    in_sample.validate();
    check_tags_against_set(spec, in_sample);

    PlantConfig c = cfg;
    ScenarioSet work;
    switch (spec.kind) {
        case PolicyKind::AverageScenario:
            c.risk.beta = 0.0;
            c.no_arbitrage = true;
            work = ScenarioSet::uniform({average_scenario(in_sample)});
            break;
        case PolicyKind::PessimisticExpert:
            c.risk.beta = 0.0;
            c.no_arbitrage = false;
            work = ScenarioSet::uniform({average_scenario(in_sample)});
            break;
        case PolicyKind::Stochastic:
            c.risk.beta = spec.beta;
            c.no_arbitrage = spec.no_arbitrage;
            work = in_sample;
            break;
    }

    AssembledModel m = assemble_two_stage(c, work, Phase::Optimize);

    if (spec.kind == PolicyKind::PessimisticExpert) {
        std::vector<std::pair<PpaContract, double>> with_cf;
        for (const auto& contract : c.ppas) {
            double cf = 0.0;
            for (int s = 0; s < in_sample.size(); ++s)
                cf += in_sample.probabilities[static_cast<std::size_t>(s)] *
                      in_sample.scenarios[static_cast<std::size_t>(s)]
                          .ppa_availability.at(contract.park_id)
                          .mean();
            with_cf.emplace_back(contract, cf);
        }
        double annual = annual_electrical_mwh;
        if (!std::isfinite(annual)) {
            double expected_demand = 0.0;
            for (int s = 0; s < in_sample.size(); ++s)
                expected_demand += in_sample.probabilities[static_cast<std::size_t>(s)] *
                                   in_sample.scenarios[static_cast<std::size_t>(s)].demand.sum();
            annual = expected_demand / c.ez_efficiency;
        }
        const auto sizing = pessimistic_expert_ppa_sizing(with_cf, annual, c.horizon);
        for (std::size_t a = 0; a < c.ppas.size(); ++a)
            m.lp.fix_column(m.design.ppa[a], sizing.at(c.ppas[a].park_id));
    }

    const std::string name = label(spec);
    const Solution sol = solve(m.lp, opts);
    if (!sol.optimal())
        throw SolverError("policy " + name + ": solver ended " + status_name(sol.status));

    PolicySolution ps;
    ps.policy_label = name;
    ps.spec = spec;
    ps.design = m.extract_design(sol, c);
    ps.objective = sol.objective;
    ps.in_sample.design_cost = m.design_cost_value(sol);
    for (int s = 0; s < work.size(); ++s)
        ps.scenario_costs.push_back(m.scenario_cost_value(s, sol));
    double expected = 0.0;
    for (int s = 0; s < work.size(); ++s)
        expected += work.probabilities[static_cast<std::size_t>(s)] *
                    ps.scenario_costs[static_cast<std::size_t>(s)];
    ps.in_sample.expected_operational = expected;
    ps.in_sample.cvar_operational = discrete_cvar(ps.scenario_costs, work.probabilities, c.risk.alpha);
    for (int s = 0; s < work.size(); ++s) {
        double nw_total = 0.0;
        for (int h = 1; h <= c.horizon; ++h)
            nw_total += sol.value(m.blocks[static_cast<std::size_t>(s)].nw(h));
        ps.expected_consumption_mwh += work.probabilities[static_cast<std::size_t>(s)] * nw_total;
    }
    return ps;
}

}  // namespace h2plan
