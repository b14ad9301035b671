#include "h2plan/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace h2plan {

using nlohmann::json;

namespace {

double num_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

int int_or(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<int>();
}

std::string str_or(const json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<std::string>();
}

double bound_or_inf(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return kInf;
    return j.at(key).get<double>();
}

PlantConfig parse_plant(const json& root, int horizon) {
    PlantConfig p;
    p.horizon = horizon;
    const json plant = root.value("plant", json::object());

    if (plant.contains("electrolyzer")) {
        const json& e = plant.at("electrolyzer");
        p.ez_capex_eur_mw = num_or(e, "capex_eur_mw", p.ez_capex_eur_mw);
        p.ez_lifetime_years = int_or(e, "lifetime_years", p.ez_lifetime_years);
        p.ez_efficiency = num_or(e, "efficiency", p.ez_efficiency);
        p.bounds.ez_power_mw = bound_or_inf(e, "max_mw");
    }
    if (plant.contains("storage")) {
        const json& s = plant.at("storage");
        p.storage.capex_energy_eur_mwh = num_or(s, "capex_energy_eur_mwh", p.storage.capex_energy_eur_mwh);
        p.storage.capex_power_eur_mw = num_or(s, "capex_power_eur_mw", p.storage.capex_power_eur_mw);
        p.storage.lifetime_years = int_or(s, "lifetime_years", p.storage.lifetime_years);
        p.storage.charge_efficiency = num_or(s, "charge_efficiency", p.storage.charge_efficiency);
        p.storage.discharge_efficiency = num_or(s, "discharge_efficiency", p.storage.discharge_efficiency);
        p.storage.hourly_loss = num_or(s, "hourly_loss", p.storage.hourly_loss);
        p.storage.initial_soc_fraction = num_or(s, "initial_soc_fraction", p.storage.initial_soc_fraction);
        p.bounds.storage_energy_mwh = bound_or_inf(s, "max_energy_mwh");
        p.bounds.storage_power_mw = bound_or_inf(s, "max_power_mw");
    }
    if (plant.contains("network")) {
        const json& n = plant.at("network");
        p.network_capex_eur_mw = num_or(n, "capex_eur_mw", p.network_capex_eur_mw);
        p.network_lifetime_years = int_or(n, "lifetime_years", p.network_lifetime_years);
        p.bounds.network_power_mw = bound_or_inf(n, "max_mw");
        p.bounds.network_subscription_mw = bound_or_inf(n, "max_subscription_mw");
    }
    p.discount_rate = num_or(plant, "discount_rate", p.discount_rate);
    if (plant.contains("tariff")) {
        const json& t = plant.at("tariff");
        const std::string scheme = str_or(t, "scheme", "season_peak");
        if (scheme == "single")
            p.tariff.scheme = NetworkTariff::SlotScheme::Single;
        else if (scheme == "season_peak")
            p.tariff.scheme = NetworkTariff::SlotScheme::SeasonPeak;
        else if (scheme == "custom")
            p.tariff.scheme = NetworkTariff::SlotScheme::Custom;
        else
            throw ConfigError("unknown tariff scheme '" + scheme + "'");
        if (t.contains("subscription_cost_eur_mw_yr"))
            p.tariff.subscription_cost_eur_mw_yr =
                t.at("subscription_cost_eur_mw_yr").get<std::vector<double>>();
        if (t.contains("energy_charge_eur_mwh"))
            p.tariff.energy_charge_eur_mwh = t.at("energy_charge_eur_mwh").get<std::vector<double>>();
        if (t.contains("slot_of_hour"))
            p.tariff.custom_slot_of_hour = t.at("slot_of_hour").get<std::vector<int>>();
    }
    if (plant.contains("penalties")) {
        const json& pen = plant.at("penalties");
        p.curtail_penalty_optimize = num_or(pen, "curtailment_optimize", p.curtail_penalty_optimize);
        p.curtail_penalty_test = num_or(pen, "curtailment_test", p.curtail_penalty_test);
    }
    if (plant.contains("risk")) {
        p.risk.alpha = num_or(plant.at("risk"), "alpha", p.risk.alpha);
    }
    if (plant.contains("rfnbo")) {
        const json& r = plant.at("rfnbo");
        p.rfnbo_subsidy_eur_mwh = num_or(r, "subsidy_eur_mwh", 0.0);
        p.rfnbo_min_share = num_or(r, "min_share", 0.0);
    }
    p.h2_kg_per_mwh = num_or(root, "h2_kg_per_mwh", p.h2_kg_per_mwh);

    for (const json& c : root.value("ppa_contracts", json::array())) {
        PpaContract contract;
        contract.park_id = c.at("park").get<std::string>();
        const std::string tech = c.at("technology").get<std::string>();
        if (tech == "solar")
            contract.technology = PpaContract::Tech::Solar;
        else if (tech == "wind")
            contract.technology = PpaContract::Tech::Wind;
        else
            throw ConfigError("unknown PPA technology '" + tech + "' for park " + contract.park_id);
        contract.price_eur_mwh = c.at("price_eur_mwh").get<double>();
        contract.max_peak_mw = bound_or_inf(c, "max_peak_mw");
        p.ppas.push_back(std::move(contract));
    }

    // delivery windows arrive with closed endpoints as published tables list them
    std::vector<int> starts;
    const json products = root.value("futures_products", json::array());
    for (const json& f : products) starts.push_back(f.at("start").get<int>());
    for (const json& f : products) {
        const int start = f.at("start").get<int>();
        const int end_incl = f.at("end").get<int>();
        const int end_excl = resolve_window_end(start, end_incl, starts);
        const std::string profiles = str_or(f, "profiles", "both");
        auto push = [&](DeliveryProfile profile) {
            FuturesProduct prod;
            prod.id = f.at("id").get<std::string>();
            prod.profile = profile;
            prod.h_begin = start;
            prod.h_end_excl = end_excl;
            prod.max_mwh = bound_or_inf(f, "max_mwh");
            if (f.contains("price_eur_mwh")) {
                const json& pr = f.at("price_eur_mwh");
                if (pr.is_object())
                    prod.price_eur_mwh = pr.at(profile_name(profile)).get<double>();
                else
                    prod.price_eur_mwh = pr.get<double>();
            }
            p.futures.push_back(std::move(prod));
        };
        if (profiles == "both" || profiles == "baseload") push(DeliveryProfile::Baseload);
        if (profiles == "both" || profiles == "peakload") push(DeliveryProfile::Peakload);
        if (profiles != "both" && profiles != "baseload" && profiles != "peakload")
            throw ConfigError("unknown futures profile selector '" + profiles + "'");
    }
    return p;
}

DemandProfileSpec parse_demand_profile(const json& j) {
    DemandProfileSpec spec;
    const std::string type = j.at("type").get<std::string>();
    if (type == "standard")
        spec.type = DemandProfileSpec::Type::Standard;
    else if (type == "seasonal") {
        spec.type = DemandProfileSpec::Type::Seasonal;
        if (j.contains("multipliers")) {
            const auto v = j.at("multipliers").get<std::vector<double>>();
            if (v.size() != 12) throw ConfigError("seasonal profile needs 12 monthly multipliers");
            std::copy(v.begin(), v.end(), spec.multipliers.begin());
        }
    } else if (type == "year_csv")
        spec.type = DemandProfileSpec::Type::YearCsv;
    else if (type == "file") {
        spec.type = DemandProfileSpec::Type::File;
        spec.file = j.at("file").get<std::string>();
    } else
        throw ConfigError("unknown demand profile type '" + type + "'");
    return spec;
}

SetSpec parse_set_spec(const json& j) {
    SetSpec spec;
    const json& years = j.at("years");
    if (years.is_string()) {
        const std::string side = years.get<std::string>();
        if (side == "even")
            spec.parity = SetSpec::Years::Even;
        else if (side == "odd")
            spec.parity = SetSpec::Years::Odd;
        else
            throw ConfigError("years selector must be 'even', 'odd' or an explicit list");
    } else {
        spec.parity = SetSpec::Years::Explicit;
        spec.years = years.get<std::vector<int>>();
    }
    spec.demand_profile = str_or(j, "demand", "standard");
    spec.duplicate_with_demand = str_or(j, "duplicate_with_demand", "");
    for (const json& s : j.value("synth", json::array())) {
        SynthSpec sy;
        sy.base_year = s.at("base_year").get<int>();
        sy.label = str_or(s, "label", "");
        sy.knobs.mean_scale = num_or(s, "mean_scale", 1.0);
        sy.knobs.seasonal_scale = num_or(s, "seasonal_scale", 1.0);
        sy.knobs.daily_spread_scale = num_or(s, "daily_spread_scale", 1.0);
        sy.demand_profile = str_or(s, "demand", "");
        spec.synth.push_back(std::move(sy));
    }
    if (j.contains("probabilities"))
        spec.probabilities = j.at("probabilities").get<std::vector<double>>();
    return spec;
}

BenchmarkStudySpec parse_benchmark(const json& j, const std::string& default_in_sample) {
    BenchmarkStudySpec spec;
    spec.test_set = j.at("test_set").get<std::string>();
    for (const json& p : j.at("policies")) {
        StudyPolicyEntry entry;
        if (p.is_string()) {
            entry.label = p.get<std::string>();
            entry.in_sample_set = default_in_sample;
        } else {
            entry.label = p.at("label").get<std::string>();
            entry.in_sample_set = str_or(p, "in_sample", default_in_sample);
        }
        spec.policies.push_back(std::move(entry));
    }
    for (const json& m : j.value("metrics", json::array()))
        spec.metrics.push_back(MetricSpec{m.at("name").get<std::string>(),
                                          m.at("baseline").get<std::string>(),
                                          m.at("comparison").get<std::string>()});
    return spec;
}

}  // namespace

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }

    RunConfig cfg;
    cfg.base_dir = std::filesystem::absolute(path).parent_path();
    cfg.config_hash = fnv1a_hex(j.dump());

    try {
        cfg.horizon = int_or(j, "horizon", kHoursPerYear);
        cfg.annual_h2_mwh = num_or(j, "annual_h2_mwh", 18000.0);
        cfg.scenario_root = j.at("scenario_root").get<std::string>();
        cfg.output_dir = str_or(j, "output_dir", "out");
        cfg.seed = j.value("seed", 0ULL);
        cfg.plant = parse_plant(j, cfg.horizon);

        const std::string mode = str_or(j, "futures_price_mode", "per_set");
        if (mode == "per_set")
            cfg.price_mode = FuturesPriceMode::PerSet;
        else if (mode == "in_sample")
            cfg.price_mode = FuturesPriceMode::InSample;
        else if (mode == "explicit")
            cfg.price_mode = FuturesPriceMode::Explicit;
        else
            throw ConfigError("unknown futures price mode '" + mode + "'");

        if (j.contains("mean_price_target")) {
            const json& t = j.at("mean_price_target");
            if (t.is_string() && t.get<std::string>() == "preserve")
                cfg.renorm = RunConfig::Renorm::Preserve;
            else if (t.is_string() && t.get<std::string>() == "none")
                cfg.renorm = RunConfig::Renorm::None;
            else if (t.is_number()) {
                cfg.renorm = RunConfig::Renorm::Explicit;
                cfg.renorm_target = t.get<double>();
            } else
                throw ConfigError("mean_price_target must be a number, 'preserve' or 'none'");
        }

        cfg.demand_profiles["standard"] = DemandProfileSpec{};
        for (const auto& [name, spec] : j.value("demand_profiles", json::object()).items())
            cfg.demand_profiles[name] = parse_demand_profile(spec);

        for (const auto& [name, spec] : j.value("scenario_sets", json::object()).items())
            cfg.scenario_sets[name] = parse_set_spec(spec);

        cfg.default_in_sample = str_or(j, "default_in_sample", "in_sample");

        const json studies = j.value("studies", json::object());
        if (studies.contains("part1")) cfg.part1 = parse_benchmark(studies.at("part1"), cfg.default_in_sample);
        if (studies.contains("part2")) cfg.part2 = parse_benchmark(studies.at("part2"), cfg.default_in_sample);
        if (studies.contains("prospective")) {
            const json& p = studies.at("prospective");
            cfg.prospective.policy_label = p.at("policy").get<std::string>();
            cfg.prospective.in_sample_set = str_or(p, "in_sample", cfg.default_in_sample);
            cfg.prospective.test_set = p.at("test_set").get<std::string>();
            for (const auto& [name, c] : p.at("contexts").items())
                cfg.prospective.contexts.push_back(ContextSpec{
                    name, num_or(c, "subsidy_eur_mwh", 0.0), num_or(c, "min_share", 0.0)});
        }

        if (j.contains("pessimistic_expert")) {
            const json& pe = j.at("pessimistic_expert");
            if (pe.contains("annual_electrical_mwh") && !pe.at("annual_electrical_mwh").is_null())
                cfg.pe_annual_electrical_mwh = pe.at("annual_electrical_mwh").get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }

    cfg.plant.validate();
    return cfg;
}

std::vector<int> discover_years(const RunConfig& cfg) {
    const auto root = cfg.resolve(cfg.scenario_root);
    if (!std::filesystem::is_directory(root))
        throw ConfigError("scenario root " + root.string() + " does not exist");
    std::vector<int> years;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.empty() || name.find_first_not_of("0123456789") != std::string::npos) continue;
        years.push_back(std::stoi(name));
    }
    std::sort(years.begin(), years.end());
    if (years.empty()) throw ConfigError("no year directories under " + root.string());
    return years;
}

namespace {

HourlySeries build_demand(const RunConfig& cfg, const DemandProfileSpec& profile, int year) {
    switch (profile.type) {
        case DemandProfileSpec::Type::Standard:
            return standard_demand(cfg.annual_h2_mwh, cfg.horizon);
        case DemandProfileSpec::Type::Seasonal:
            return seasonal_demand(cfg.annual_h2_mwh, profile.multipliers, cfg.horizon);
        case DemandProfileSpec::Type::YearCsv: {
            const auto file =
                cfg.resolve(cfg.scenario_root) / std::to_string(year) / "demand.csv";
            return load_scenario_csv(file, Unit::MwH2, cfg.horizon);
        }
        case DemandProfileSpec::Type::File:
            return load_scenario_csv(cfg.resolve(profile.file), Unit::MwH2, cfg.horizon);
    }
    throw ConfigError("unhandled demand profile type");
}

const DemandProfileSpec& profile_or_throw(const RunConfig& cfg, const std::string& name) {
    auto it = cfg.demand_profiles.find(name);
    if (it == cfg.demand_profiles.end())
        throw ConfigError("demand profile '" + name + "' is not defined");
    return it->second;
}

Scenario load_year_scenario(const RunConfig& cfg, int year, const std::string& profile_name) {
    const auto dir = cfg.resolve(cfg.scenario_root) / std::to_string(year);
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("scenario directory " + dir.string() + " does not exist");
    Scenario sc;
    sc.label = std::to_string(year);
    sc.source_year = year;
    sc.day_ahead = load_scenario_csv(dir / "day_ahead.csv", Unit::EurPerMwh, cfg.horizon);
    for (const auto& contract : cfg.plant.ppas)
        sc.ppa_availability[contract.park_id] = load_scenario_csv(
            dir / ("ppa_" + contract.park_id + ".csv"), Unit::AvailabilityFraction, cfg.horizon);
    sc.demand = build_demand(cfg, profile_or_throw(cfg, profile_name), year);
    sc.validate();
    return sc;
}

}  // namespace

double historical_mean_price(const RunConfig& cfg) {
    const auto root = cfg.resolve(cfg.scenario_root);
    double total = 0.0;
    int n = 0;
    for (int year : discover_years(cfg)) {
        const auto file = root / std::to_string(year) / "day_ahead.csv";
        total += load_scenario_csv(file, Unit::EurPerMwh, cfg.horizon).mean();
        ++n;
    }
    return total / static_cast<double>(n);
}

ScenarioSet build_scenario_set(const RunConfig& cfg, const std::string& set_name) {
    auto it = cfg.scenario_sets.find(set_name);
    if (it == cfg.scenario_sets.end())
        throw ConfigError("scenario set '" + set_name + "' is not defined");
    const SetSpec& spec = it->second;

    std::vector<Scenario> scenarios;
    if (spec.parity == SetSpec::Years::Explicit) {
        for (int year : spec.years)
            scenarios.push_back(load_year_scenario(cfg, year, spec.demand_profile));
    } else {
        std::map<int, Scenario> by_year;
        for (int year : discover_years(cfg))
            by_year[year] = load_year_scenario(cfg, year, spec.demand_profile);
        auto [in_sample, out_of_sample] = split_even_odd(by_year);
        scenarios = spec.parity == SetSpec::Years::Even ? std::move(in_sample.scenarios)
                                                        : std::move(out_of_sample.scenarios);
    }

    for (const SynthSpec& sy : spec.synth) {
        const std::string profile =
            sy.demand_profile.empty() ? spec.demand_profile : sy.demand_profile;
        Scenario base = load_year_scenario(cfg, sy.base_year, profile);
        Scenario out = base;
        out.source_year.reset();
        out.label = sy.label.empty() ? base.label + "_synth" : sy.label;
        out.day_ahead = synthesize_day_ahead(base.day_ahead, sy.knobs);
        scenarios.push_back(std::move(out));
    }

    if (!spec.duplicate_with_demand.empty()) {
        const DemandProfileSpec& dup = profile_or_throw(cfg, spec.duplicate_with_demand);
        const std::size_t n = scenarios.size();
        for (std::size_t i = 0; i < n; ++i) {
            Scenario copy = scenarios[i];
            copy.label += "+" + spec.duplicate_with_demand;
            copy.demand = build_demand(cfg, dup, copy.source_year.value_or(0));
            scenarios.push_back(std::move(copy));
        }
    }

    ScenarioSet set = ScenarioSet::uniform(std::move(scenarios));
    if (!spec.probabilities.empty()) {
        if (spec.probabilities.size() != set.scenarios.size())
            throw ConfigError("probability override size mismatch for set '" + set_name + "'");
        set.probabilities = spec.probabilities;
    }

    switch (cfg.renorm) {
        case RunConfig::Renorm::None: break;
        case RunConfig::Renorm::Preserve:
            set = renormalize_set_mean(std::move(set), historical_mean_price(cfg));
            break;
        case RunConfig::Renorm::Explicit:
            set = renormalize_set_mean(std::move(set), cfg.renorm_target);
            break;
    }
    set.validate();
    return set;
}

PlantConfig plant_for_set(const RunConfig& cfg, const ScenarioSet& set) {
    PlantConfig plant = cfg.plant;
    if (cfg.price_mode != FuturesPriceMode::Explicit)
        plant.futures = arbitrage_free_futures_prices(set, plant.futures);
    return plant;
}

std::string scenario_set_id(const RunConfig& cfg, const std::string& set_name,
                            const ScenarioSet& set) {
    std::string key = cfg.config_hash + "|" + set_name;
    for (const auto& sc : set.scenarios) key += "|" + sc.label;
    return fnv1a_hex(key);
}

}  // namespace h2plan
