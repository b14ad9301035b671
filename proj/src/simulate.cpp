#include "h2plan/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace h2plan {

double design_cost_value(const PlantConfig& cfg, const DesignDecisions& d) {
    double jd = d.ez_power_mw * cfg.annualized_ez() +
                d.storage_energy_mwh * cfg.annualized_storage_energy() +
                d.storage_power_mw * cfg.annualized_storage_power() +
                d.network_power_mw * cfg.annualized_network();
    for (const auto& f : cfg.futures) {
        const auto& src = f.profile == DeliveryProfile::Baseload ? d.baseload_mwh : d.peakload_mwh;
        auto it = src.find(f.id);
        if (it != src.end()) jd += it->second * f.price_eur_mwh;
    }
    for (std::size_t i = 0; i < d.network_subscription_mw.size(); ++i)
        jd += d.network_subscription_mw[i] * cfg.tariff.subscription_cost(static_cast<int>(i));
    return jd;
}

DispatchResult dispatch(const DesignDecisions& d, const Scenario& sc, const PlantConfig& cfg,
                        bool keep_trace, const SolverOptions& opts) {
    ScenarioSet single;
    single.scenarios.push_back(sc);
    single.probabilities.push_back(1.0);

    AssembledModel m = assemble_two_stage(cfg, single, Phase::Test);
    fix_design(m, d, cfg);
    const Solution sol = solve(m.lp, opts);
    if (!sol.optimal())
        throw SolverError("dispatch of scenario '" + sc.label + "' ended " + status_name(sol.status));

    const ScenarioColumns& b = m.blocks.front();
    const int H = b.H;
    const double eta_ez = cfg.ez_efficiency;

    DispatchResult r;
    r.scenario_label = sc.label;
    r.operational_cost_eur = m.scenario_cost_value(0, sol);

    double ez_total = 0.0;
    for (int h = 1; h <= H; ++h) {
        const double ez = sol.value(b.ez_in(h));
        double ppa_total = 0.0;
        for (int a = 0; a < b.parks; ++a) ppa_total += sol.value(b.ppa_out(a, h));
        ez_total += ez;
        r.agg.da_bought_mwh += sol.value(b.da_out(h));
        r.agg.da_sold_mwh += sol.value(b.da_in(h));
        r.agg.curtailed_h2_mwh += sol.value(b.hd_curt(h));
        r.agg.grid_consumption_mwh += sol.value(b.nw(h));
        r.agg.produced_h2_mwh += ez * eta_ez;
        r.agg.certified_h2_mwh += std::min(ppa_total, ez) * eta_ez;
    }
    r.agg.served_h2_mwh = sc.demand.sum() - r.agg.curtailed_h2_mwh;
    for (std::size_t a = 0; a < cfg.ppas.size(); ++a) {
        const auto& contract = cfg.ppas[a];
        auto it = d.ppa_peak_mw.find(contract.park_id);
        const double peak = it == d.ppa_peak_mw.end() ? 0.0 : it->second;
        r.agg.ppa_energy_paid_mwh += peak * sc.ppa_availability.at(contract.park_id).sum();
    }
    r.agg.ez_load_factor =
        d.ez_power_mw > 0.0 ? ez_total / (static_cast<double>(H) * d.ez_power_mw) : 0.0;

    if (keep_trace) {
        HourlyTrace t;
        auto grab = [&](auto col_fn) {
            std::vector<double> v(static_cast<std::size_t>(H));
            for (int h = 1; h <= H; ++h) v[static_cast<std::size_t>(h - 1)] = sol.value(col_fn(h));
            return v;
        };
        t.da_buy = grab([&](int h) { return b.da_out(h); });
        t.da_sell = grab([&](int h) { return b.da_in(h); });
        t.ez_in = grab([&](int h) { return b.ez_in(h); });
        t.hs_in = grab([&](int h) { return b.hs_in(h); });
        t.hs_out = grab([&](int h) { return b.hs_out(h); });
        t.nw = grab([&](int h) { return b.nw(h); });
        t.hd_curt = grab([&](int h) { return b.hd_curt(h); });
        t.certified.resize(static_cast<std::size_t>(H));
        for (int h = 1; h <= H; ++h) {
            double ppa_total = 0.0;
            for (int a = 0; a < b.parks; ++a) ppa_total += sol.value(b.ppa_out(a, h));
            t.certified[static_cast<std::size_t>(h - 1)] =
                std::min(ppa_total, sol.value(b.ez_in(h))) * eta_ez;
        }
        t.soc.resize(static_cast<std::size_t>(H + 1));
        for (int h = 1; h <= H + 1; ++h) t.soc[static_cast<std::size_t>(h - 1)] = sol.value(b.soc(h));
        for (int a = 0; a < b.parks; ++a) {
            const std::string& park = cfg.ppas[static_cast<std::size_t>(a)].park_id;
            t.ppa_out[park] = grab([&](int h) { return b.ppa_out(a, h); });
            t.ppa_curt[park] = grab([&](int h) { return b.ppa_curt(a, h); });
        }
        r.trace = std::move(t);
    }
    return r;
}

double lcoh(double design_cost_eur, double operational_cost_eur, const HourlySeries& demand,
            double kg_per_mwh) {
    const double total_demand = demand.sum();
    if (!(total_demand > 0.0)) throw DegenerateError("contracted demand is zero, LCOH undefined");
    if (!(kg_per_mwh > 0.0)) throw RangeError("hydrogen mass factor must be positive");
    return (design_cost_eur + operational_cost_eur) / (kg_per_mwh * total_demand);
}

TestReport run_test_set(const DesignDecisions& d, const ScenarioSet& test_set,
                        const PlantConfig& cfg, int jobs, bool keep_traces,
                        std::vector<DispatchResult>* results_out) {
    test_set.validate();
    const int n = test_set.size();
    std::vector<DispatchResult> results(static_cast<std::size_t>(n));

    auto work = [&](int i) {
        const Scenario& sc = test_set.scenarios[static_cast<std::size_t>(i)];
        try {
            results[static_cast<std::size_t>(i)] = dispatch(d, sc, cfg, keep_traces);
        } catch (const Error& e) {
            throw SolverError("test scenario '" + sc.label + "': " + e.what());
        }
    };

    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) work(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::future<void>> workers;
        const int nw = std::min(jobs, n);
        for (int t = 0; t < nw; ++t)
            workers.push_back(std::async(std::launch::async, [&]() {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work(i);
            }));
        for (auto& w : workers) w.get();
    }

    TestReport rep;
    rep.design_cost_eur = design_cost_value(cfg, d);
    double lcoh_sum = 0.0;
    rep.worst_lcoh = -kInf;
    for (int i = 0; i < n; ++i) {
        const auto& res = results[static_cast<std::size_t>(i)];
        const Scenario& sc = test_set.scenarios[static_cast<std::size_t>(i)];
        const double value = lcoh(rep.design_cost_eur, res.operational_cost_eur, sc.demand,
                                  cfg.h2_kg_per_mwh);
        rep.scenario_labels.push_back(res.scenario_label);
        rep.operational_cost_eur.push_back(res.operational_cost_eur);
        rep.lcoh_eur_kg.push_back(value);
        rep.load_factors.push_back(res.agg.ez_load_factor);
        rep.rfnbo_shares.push_back(res.agg.produced_h2_mwh > 0.0
                                       ? std::clamp(res.agg.certified_h2_mwh / res.agg.produced_h2_mwh,
                                                    0.0, 1.0)
                                       : 0.0);
        lcoh_sum += value;
        rep.worst_lcoh = std::max(rep.worst_lcoh, value);
    }
    rep.mean_lcoh = lcoh_sum / static_cast<double>(n);
    if (results_out) *results_out = std::move(results);
    return rep;
}

}  // namespace h2plan
