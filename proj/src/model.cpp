#include "h2plan/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace h2plan {

double annualize_capex(double capex, int lifetime_years, double rate) {
    if (lifetime_years < 1) throw RangeError("asset lifetime must be at least one year");
    if (capex < 0.0) throw RangeError("capex must be non-negative");
    if (rate < 0.0) throw RangeError("discount rate must be non-negative");
    if (rate == 0.0) return capex / static_cast<double>(lifetime_years);
    const double factor = std::pow(1.0 + rate, lifetime_years);
    return capex * rate * factor / (factor - 1.0);
}

int delivery_indicator(const FuturesProduct& product, int h) {
    return product.delivers_at(h) ? 1 : 0;
}

int NetworkTariff::slot_count() const {
    switch (scheme) {
        case SlotScheme::Single: return 1;
        case SlotScheme::SeasonPeak: return 4;
        case SlotScheme::Custom: {
            if (custom_slot_of_hour.empty()) throw ConfigError("custom tariff has no slot map");
            return *std::max_element(custom_slot_of_hour.begin(), custom_slot_of_hour.end()) + 1;
        }
    }
    return 1;
}

int NetworkTariff::slot_of_hour(int h) const {
    switch (scheme) {
        case SlotScheme::Single: return 0;
        case SlotScheme::SeasonPeak: {
            const int m = month_of_hour(h);
            const bool winter = m <= 3 || m >= 11;
            return (winter ? 2 : 0) + peak_indicator(h);
        }
        case SlotScheme::Custom: {
            if (h < 1 || h > static_cast<int>(custom_slot_of_hour.size()))
                throw ConfigError("custom tariff slot map does not cover hour " + std::to_string(h));
            return custom_slot_of_hour[static_cast<std::size_t>(h - 1)];
        }
    }
    return 0;
}

double NetworkTariff::subscription_cost(int slot) const {
    const auto s = static_cast<std::size_t>(slot);
    return s < subscription_cost_eur_mw_yr.size() ? subscription_cost_eur_mw_yr[s] : 0.0;
}

double NetworkTariff::energy_charge_at(int h) const {
    const auto s = static_cast<std::size_t>(slot_of_hour(h));
    return s < energy_charge_eur_mwh.size() ? energy_charge_eur_mwh[s] : 0.0;
}

void PlantConfig::validate() const {
    if (horizon < 1 || horizon > kHoursPerYear)
        throw ConfigError("horizon must lie within one calendar year");
    if (ez_capex_eur_mw < 0 || storage.capex_energy_eur_mwh < 0 || storage.capex_power_eur_mw < 0 ||
        network_capex_eur_mw < 0)
        throw ConfigError("capex values must be non-negative");
    if (ez_lifetime_years < 1 || storage.lifetime_years < 1 || network_lifetime_years < 1)
        throw ConfigError("asset lifetimes must be at least one year");
    if (!(ez_efficiency > 0.0 && ez_efficiency <= 1.0))
        throw ConfigError("electrolyzer efficiency must lie in (0,1]");
    if (!(storage.charge_efficiency > 0.0 && storage.charge_efficiency <= 1.0) ||
        !(storage.discharge_efficiency > 0.0 && storage.discharge_efficiency <= 1.0))
        throw ConfigError("storage power efficiencies must lie in (0,1]");
    if (storage.hourly_loss < 0.0 || storage.hourly_loss >= 1.0)
        throw ConfigError("storage hourly loss must lie in [0,1)");
    if (storage.initial_soc_fraction < 0.0 || storage.initial_soc_fraction > 1.0)
        throw ConfigError("initial state of charge fraction must lie in [0,1]");
    if (discount_rate < 0.0) throw ConfigError("discount rate must be non-negative");
    if (curtail_penalty_optimize < 0.0 || curtail_penalty_test < 0.0)
        throw ConfigError("curtailment penalties must be non-negative");
    if (rfnbo_subsidy_eur_mwh < 0.0) throw ConfigError("subsidy must be non-negative");
    if (rfnbo_min_share < 0.0 || rfnbo_min_share > 1.0)
        throw ConfigError("minimum certified share must lie in [0,1]");
    if (risk.alpha < 0.0 || risk.alpha >= 1.0) throw ConfigError("alpha must lie in [0,1)");
    if (risk.beta < 0.0 || risk.beta > 1.0) throw ConfigError("beta must lie in [0,1]");
    if (!(h2_kg_per_mwh > 0.0)) throw ConfigError("hydrogen mass factor must be positive");
    for (const auto& p : ppas) {
        if (!(p.price_eur_mwh > 0.0)) throw ConfigError("PPA price must be positive for " + p.park_id);
        if (!(p.max_peak_mw > 0.0)) throw ConfigError("PPA peak bound must be positive for " + p.park_id);
    }
    for (const auto& f : futures) {
        if (f.h_begin < 1 || f.window_hours() < 1 || f.h_end_excl > horizon + 1)
            throw ConfigError("futures product " + f.key() + " delivery window outside the horizon");
    }
    tariff.slot_count();  // throws on an unusable custom map
}

double PlantConfig::annualized_ez() const {
    return annualize_capex(ez_capex_eur_mw, ez_lifetime_years, discount_rate);
}
double PlantConfig::annualized_storage_energy() const {
    return annualize_capex(storage.capex_energy_eur_mwh, storage.lifetime_years, discount_rate);
}
double PlantConfig::annualized_storage_power() const {
    return annualize_capex(storage.capex_power_eur_mw, storage.lifetime_years, discount_rate);
}
double PlantConfig::annualized_network() const {
    return annualize_capex(network_capex_eur_mw, network_lifetime_years, discount_rate);
}

double LinearExpr::eval(std::span<const double> x) const {
    double v = constant;
    for (const auto& [col, coeff] : terms) v += coeff * x[static_cast<std::size_t>(col)];
    return v;
}

int DesignColumns::count() const {
    return 4 + static_cast<int>(futures.size() + nw_sub.size() + ppa.size());
}

namespace {

std::string hour_name(int s, int h, const char* sym) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "s%d_h%d_%s", s, h, sym);
    return buf;
}

std::string scen_name(int s, const char* sym) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "s%d_%s", s, sym);
    return buf;
}

}  // namespace

DesignColumns register_design_columns(LinearProgram& lp, const PlantConfig& cfg) {
    DesignColumns d;
    d.ez_p = lp.add_column("x_ez_p", 0.0, cfg.bounds.ez_power_mw, 0.0, {"x_ez_p", -1, -1});
    d.hs_e = lp.add_column("x_hs_e", 0.0, cfg.bounds.storage_energy_mwh, 0.0, {"x_hs_e", -1, -1});
    d.hs_p = lp.add_column("x_hs_p", 0.0, cfg.bounds.storage_power_mw, 0.0, {"x_hs_p", -1, -1});
    d.nw_p = lp.add_column("x_nw_p", 0.0, cfg.bounds.network_power_mw, 0.0, {"x_nw_p", -1, -1});
    for (const auto& f : cfg.futures) {
        const std::string sym = f.profile == DeliveryProfile::Baseload ? "x_baf" : "x_pkf";
        d.futures.push_back(
            lp.add_column(sym + "_" + f.id, 0.0, f.max_mwh, 0.0, {sym + "_" + f.id, -1, -1}));
    }
    for (int i = 0; i < cfg.tariff.slot_count(); ++i)
        d.nw_sub.push_back(lp.add_column("x_nw_sub_" + std::to_string(i), 0.0,
                                         cfg.bounds.network_subscription_mw, 0.0,
                                         {"x_nw_sub_" + std::to_string(i), -1, -1}));
    for (const auto& p : cfg.ppas)
        d.ppa.push_back(
            lp.add_column("x_ppa_" + p.park_id, 0.0, p.max_peak_mw, 0.0, {"x_ppa_" + p.park_id, -1, -1}));
    return d;
}

ScenarioColumns register_scenario_columns(LinearProgram& lp, const PlantConfig& cfg,
                                          const Scenario& sc, int s) {
    const int H = cfg.horizon;
    const int A = static_cast<int>(cfg.ppas.size());
    ScenarioColumns block;
    block.base = lp.num_columns();
    block.H = H;
    block.parks = A;

    auto bulk = [&](const char* sym, double lb, double ub) {
        for (int h = 1; h <= H; ++h) lp.add_column(hour_name(s, h, sym), lb, ub, 0.0, {sym, s, h});
    };
    bulk("u_da_out", 0.0, kInf);
    bulk("u_da_in", 0.0, kInf);
    bulk("u_ez_in", 0.0, kInf);
    bulk("u_hs_in", 0.0, kInf);
    bulk("u_hs_out", 0.0, kInf);
    bulk("u_nw", 0.0, kInf);
    for (int h = 1; h <= H; ++h)
        lp.add_column(hour_name(s, h, "u_hd_curt"), 0.0, sc.demand.at_hour(h), 0.0, {"u_hd_curt", s, h});
    bulk("delta", 0.0, kInf);
    for (int a = 0; a < A; ++a) {
        const std::string out_sym = "u_ppa_out_" + cfg.ppas[static_cast<std::size_t>(a)].park_id;
        const std::string curt_sym = "u_ppa_curt_" + cfg.ppas[static_cast<std::size_t>(a)].park_id;
        for (int h = 1; h <= H; ++h)
            lp.add_column(hour_name(s, h, out_sym.c_str()), 0.0, kInf, 0.0, {out_sym, s, h});
        for (int h = 1; h <= H; ++h)
            lp.add_column(hour_name(s, h, curt_sym.c_str()), 0.0, kInf, 0.0, {curt_sym, s, h});
    }
    for (int h = 1; h <= H + 1; ++h)
        lp.add_column(hour_name(s, h, "z_hs"), 0.0, kInf, 0.0, {"z_hs", s, h});
    return block;
}

void build_stage_constraints(const Scenario& sc, const PlantConfig& cfg, LinearProgram& lp,
                             const DesignColumns& design, const ScenarioColumns& block, int s) {
    const int H = cfg.horizon;
    if (sc.hours() != H) throw SchemaError("scenario horizon does not match the configured horizon");
    const int A = static_cast<int>(cfg.ppas.size());
    const double eta_ez = cfg.ez_efficiency;
    const double keep = 1.0 - cfg.storage.hourly_loss;

    for (int h = 1; h <= H; ++h) {
        lp.add_row(hour_name(s, h, "cap_ez"), Sense::LE, 0.0,
                   {{block.ez_in(h), 1.0}, {design.ez_p, -1.0}});
        lp.add_row(hour_name(s, h, "cap_hs_in"), Sense::LE, 0.0,
                   {{block.hs_in(h), 1.0}, {design.hs_p, -1.0}});
        lp.add_row(hour_name(s, h, "cap_hs_out"), Sense::LE, 0.0,
                   {{block.hs_out(h), 1.0}, {design.hs_p, -1.0}});
        lp.add_row(hour_name(s, h, "cap_nw"), Sense::LE, 0.0,
                   {{block.nw(h), 1.0}, {design.nw_p, -1.0}});
        lp.add_row(hour_name(s, h, "cap_nw_slot"), Sense::LE, 0.0,
                   {{block.nw(h), 1.0},
                    {design.nw_sub[static_cast<std::size_t>(cfg.tariff.slot_of_hour(h))], -1.0}});

        // hourly production + discharge covers storage input and served demand
        lp.add_row(hour_name(s, h, "h2_balance"), Sense::EQ, sc.demand.at_hour(h),
                   {{block.ez_in(h), eta_ez},
                    {block.hs_out(h), 1.0},
                    {block.hs_in(h), -1.0},
                    {block.hd_curt(h), 1.0}});

        lp.add_row(hour_name(s, h, "elec_balance"), Sense::EQ, 0.0,
                   {{block.nw(h), 1.0}, {block.ez_in(h), -1.0}});

        // market perimeter: purchases plus dispatched PPA and futures deliveries
        // equal sales plus site consumption
        std::vector<std::pair<int, double>> market{{block.da_out(h), 1.0},
                                                   {block.da_in(h), -1.0},
                                                   {block.nw(h), -1.0}};
        for (int a = 0; a < A; ++a) market.emplace_back(block.ppa_out(a, h), 1.0);
        for (std::size_t k = 0; k < cfg.futures.size(); ++k) {
            const FuturesProduct& f = cfg.futures[k];
            if (!f.delivers_at(h)) continue;
            const double hq = static_cast<double>(f.window_hours());
            if (f.profile == DeliveryProfile::Baseload)
                market.emplace_back(design.futures[k], 1.0 / hq);
            else if (peak_indicator(h))
                market.emplace_back(design.futures[k], 1.0 / (hq / 2.0));
        }
        lp.add_row(hour_name(s, h, "market_balance"), Sense::EQ, 0.0, std::move(market));

        for (int a = 0; a < A; ++a) {
            const double avail =
                sc.ppa_availability.at(cfg.ppas[static_cast<std::size_t>(a)].park_id).at_hour(h);
            lp.add_row(hour_name(s, h, ("ppa_balance_" + cfg.ppas[static_cast<std::size_t>(a)].park_id).c_str()),
                       Sense::EQ, 0.0,
                       {{block.ppa_out(a, h), 1.0},
                        {block.ppa_curt(a, h), 1.0},
                        {design.ppa[static_cast<std::size_t>(a)], -avail}});
        }

        lp.add_row(hour_name(s, h, "soc_step"), Sense::EQ, 0.0,
                   {{block.soc(h + 1), 1.0},
                    {block.soc(h), -keep},
                    {block.hs_in(h), -cfg.storage.charge_efficiency},
                    {block.hs_out(h), 1.0 / cfg.storage.discharge_efficiency}});
    }
    for (int h = 1; h <= H + 1; ++h)
        lp.add_row(hour_name(s, h, "cap_soc"), Sense::LE, 0.0,
                   {{block.soc(h), 1.0}, {design.hs_e, -1.0}});

    lp.add_row(scen_name(s, "soc_init"), Sense::EQ, 0.0,
               {{block.soc(1), 1.0}, {design.hs_e, -cfg.storage.initial_soc_fraction}});
    // the year may not end with less stored energy than it started with
    lp.add_row(scen_name(s, "soc_terminal"), Sense::GE, 0.0,
               {{block.soc(H + 1), 1.0}, {block.soc(1), -1.0}});
}

void build_rfnbo(const Scenario& sc, const PlantConfig& cfg, LinearProgram& lp,
                 const DesignColumns& design, const ScenarioColumns& block, int s) {
    (void)sc;
    (void)design;
    const int H = cfg.horizon;
    const int A = static_cast<int>(cfg.ppas.size());
    const double eta_ez = cfg.ez_efficiency;

    for (int h = 1; h <= H; ++h) {
        lp.add_row(hour_name(s, h, "rfnbo_prod"), Sense::LE, 0.0,
                   {{block.delta(h), 1.0}, {block.ez_in(h), -eta_ez}});
        std::vector<std::pair<int, double>> ppa_cap{{block.delta(h), 1.0}};
        for (int a = 0; a < A; ++a) ppa_cap.emplace_back(block.ppa_out(a, h), -eta_ez);
        lp.add_row(hour_name(s, h, "rfnbo_ppa"), Sense::LE, 0.0, std::move(ppa_cap));
    }

    if (cfg.rfnbo_min_share > 0.0) {
        std::vector<std::pair<int, double>> terms;
        terms.reserve(static_cast<std::size_t>(2 * H));
        for (int h = 1; h <= H; ++h) {
            terms.emplace_back(block.delta(h), 1.0);
            terms.emplace_back(block.ez_in(h), -cfg.rfnbo_min_share * eta_ez);
        }
        lp.add_row(scen_name(s, "rfnbo_min"), Sense::GE, 0.0, std::move(terms));
    }
}

LinearExpr build_design_cost(const PlantConfig& cfg, const DesignColumns& design) {
    LinearExpr jd;
    jd.add(design.ez_p, cfg.annualized_ez());
    jd.add(design.hs_e, cfg.annualized_storage_energy());
    jd.add(design.hs_p, cfg.annualized_storage_power());
    jd.add(design.nw_p, cfg.annualized_network());
    for (std::size_t k = 0; k < cfg.futures.size(); ++k)
        jd.add(design.futures[k], cfg.futures[k].price_eur_mwh);
    for (std::size_t i = 0; i < design.nw_sub.size(); ++i)
        jd.add(design.nw_sub[i], cfg.tariff.subscription_cost(static_cast<int>(i)));
    return jd;
}

LinearExpr build_operational_cost(const Scenario& sc, const PlantConfig& cfg,
                                  const DesignColumns& design, const ScenarioColumns& block,
                                  Phase phase) {
    const int H = cfg.horizon;
    const double curt =
        phase == Phase::Optimize ? cfg.curtail_penalty_optimize : cfg.curtail_penalty_test;
    LinearExpr jo;
    for (int h = 1; h <= H; ++h) {
        const double price = sc.day_ahead.at_hour(h);
        jo.add(block.da_out(h), price);
        jo.add(block.da_in(h), -price);
        jo.add(block.hd_curt(h), curt);
        jo.add(block.nw(h), cfg.tariff.energy_charge_at(h));
        jo.add(block.delta(h), -cfg.rfnbo_subsidy_eur_mwh);
    }
    // availability is paid whether dispatched or curtailed
    for (std::size_t a = 0; a < cfg.ppas.size(); ++a) {
        const auto& contract = cfg.ppas[a];
        const double total_avail = sc.ppa_availability.at(contract.park_id).sum();
        jo.add(design.ppa[a], contract.price_eur_mwh * total_avail);
    }
    return jo;
}

void build_cvar_objective(LinearProgram& lp, const std::vector<LinearExpr>& scenario_costs,
                          const std::vector<double>& probabilities, double beta, double alpha,
                          const LinearExpr& design_cost, int& eta_col, std::vector<int>& zeta_cols) {
    if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("alpha must lie in [0,1)");
    if (beta < 0.0 || beta > 1.0) throw ConfigError("beta must lie in [0,1]");
    if (scenario_costs.size() != probabilities.size())
        throw SchemaError("scenario cost / probability count mismatch");

    for (const auto& [col, coeff] : design_cost.terms) lp.add_objective(col, coeff);

    eta_col = lp.add_column("cvar_eta", -kInf, kInf, beta, {"cvar_eta", -1, -1});
    zeta_cols.clear();
    const double tail = 1.0 / (1.0 - alpha);
    for (std::size_t s = 0; s < scenario_costs.size(); ++s) {
        zeta_cols.push_back(lp.add_column(scen_name(static_cast<int>(s), "cvar_zeta"), 0.0, kInf,
                                          beta * probabilities[s] * tail,
                                          {"cvar_zeta", static_cast<int>(s), -1}));
    }
    for (std::size_t s = 0; s < scenario_costs.size(); ++s) {
        std::vector<std::pair<int, double>> terms = scenario_costs[s].terms;
        terms.emplace_back(eta_col, -1.0);
        terms.emplace_back(zeta_cols[s], -1.0);
        lp.add_row(scen_name(static_cast<int>(s), "cvar_excess"), Sense::LE,
                   -scenario_costs[s].constant, std::move(terms));

        const double w = (1.0 - beta) * probabilities[s];
        for (const auto& [col, coeff] : scenario_costs[s].terms) lp.add_objective(col, w * coeff);
    }
}

void apply_no_arbitrage(AssembledModel& model) {
    for (const auto& block : model.blocks)
        for (int h = 1; h <= block.H; ++h) model.lp.set_bounds(block.da_in(h), 0.0, 0.0);
}

AssembledModel assemble_two_stage(const PlantConfig& cfg, const ScenarioSet& set, Phase phase) {
    cfg.validate();
    set.validate();
    if (set.hours() != cfg.horizon)
        throw SchemaError("scenario horizon " + std::to_string(set.hours()) +
                          " does not match configured horizon " + std::to_string(cfg.horizon));
    for (const auto& contract : cfg.ppas)
        if (!set.scenarios.front().ppa_availability.count(contract.park_id))
            throw SchemaError("scenarios carry no availability for park " + contract.park_id);

    AssembledModel m;
    m.phase = phase;
    m.probabilities = set.probabilities;
    m.design = register_design_columns(m.lp, cfg);
    for (int s = 0; s < set.size(); ++s) {
        const Scenario& sc = set.scenarios[static_cast<std::size_t>(s)];
        m.blocks.push_back(register_scenario_columns(m.lp, cfg, sc, s));
        build_stage_constraints(sc, cfg, m.lp, m.design, m.blocks.back(), s);
        build_rfnbo(sc, cfg, m.lp, m.design, m.blocks.back(), s);
        m.scenario_cost.push_back(build_operational_cost(sc, cfg, m.design, m.blocks.back(), phase));
    }
    m.design_cost = build_design_cost(cfg, m.design);
    build_cvar_objective(m.lp, m.scenario_cost, set.probabilities, cfg.risk.beta, cfg.risk.alpha,
                         m.design_cost, m.eta_col, m.zeta_cols);
    if (cfg.no_arbitrage && phase == Phase::Optimize) apply_no_arbitrage(m);
    return m;
}

DesignDecisions AssembledModel::extract_design(const Solution& sol, const PlantConfig& cfg) const {
    auto clean = [](double v) { return v < 1e-11 ? 0.0 : v; };
    DesignDecisions d;
    d.ez_power_mw = clean(sol.value(design.ez_p));
    d.storage_energy_mwh = clean(sol.value(design.hs_e));
    d.storage_power_mw = clean(sol.value(design.hs_p));
    d.network_power_mw = clean(sol.value(design.nw_p));
    for (std::size_t k = 0; k < cfg.futures.size(); ++k) {
        const auto& f = cfg.futures[k];
        auto& dest = f.profile == DeliveryProfile::Baseload ? d.baseload_mwh : d.peakload_mwh;
        dest[f.id] = clean(sol.value(design.futures[k]));
    }
    for (int c : design.nw_sub) d.network_subscription_mw.push_back(clean(sol.value(c)));
    for (std::size_t a = 0; a < cfg.ppas.size(); ++a)
        d.ppa_peak_mw[cfg.ppas[a].park_id] = clean(sol.value(design.ppa[a]));
    return d;
}

void fix_design(AssembledModel& model, const DesignDecisions& d, const PlantConfig& cfg) {
    auto pin = [&](int col, double v) {
        model.lp.fix_column(col, std::max(0.0, v));
    };
    pin(model.design.ez_p, d.ez_power_mw);
    pin(model.design.hs_e, d.storage_energy_mwh);
    pin(model.design.hs_p, d.storage_power_mw);
    pin(model.design.nw_p, d.network_power_mw);
    for (std::size_t k = 0; k < cfg.futures.size(); ++k) {
        const auto& f = cfg.futures[k];
        const auto& src = f.profile == DeliveryProfile::Baseload ? d.baseload_mwh : d.peakload_mwh;
        auto it = src.find(f.id);
        pin(model.design.futures[k], it == src.end() ? 0.0 : it->second);
    }
    for (std::size_t i = 0; i < model.design.nw_sub.size(); ++i)
        pin(model.design.nw_sub[i],
            i < d.network_subscription_mw.size() ? d.network_subscription_mw[i] : 0.0);
    for (std::size_t a = 0; a < cfg.ppas.size(); ++a) {
        auto it = d.ppa_peak_mw.find(cfg.ppas[a].park_id);
        pin(model.design.ppa[a], it == d.ppa_peak_mw.end() ? 0.0 : it->second);
    }
}

}  // namespace h2plan
