#include "h2plan/study.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace h2plan {

using nlohmann::json;

namespace {

json design_to_json(const DesignDecisions& d) {
    json j;
    j["x_ez_p"] = d.ez_power_mw;
    j["x_hs_e"] = d.storage_energy_mwh;
    j["x_hs_p"] = d.storage_power_mw;
    j["x_nw_p"] = d.network_power_mw;
    j["x_baf"] = d.baseload_mwh;
    j["x_pkf"] = d.peakload_mwh;
    j["x_nw_sub"] = d.network_subscription_mw;
    j["x_ppa"] = d.ppa_peak_mw;
    return j;
}

DesignDecisions design_from_json(const json& j) {
    DesignDecisions d;
    d.ez_power_mw = j.at("x_ez_p").get<double>();
    d.storage_energy_mwh = j.at("x_hs_e").get<double>();
    d.storage_power_mw = j.at("x_hs_p").get<double>();
    d.network_power_mw = j.at("x_nw_p").get<double>();
    d.baseload_mwh = j.at("x_baf").get<std::map<std::string, double>>();
    d.peakload_mwh = j.at("x_pkf").get<std::map<std::string, double>>();
    d.network_subscription_mw = j.at("x_nw_sub").get<std::vector<double>>();
    d.ppa_peak_mw = j.at("x_ppa").get<std::map<std::string, double>>();
    return d;
}

json solution_to_json(const PolicySolution& ps, const PlantConfig& plant_used) {
    json j;
    j["policy"] = ps.policy_label;
    j["config_hash"] = ps.config_hash;
    j["scenario_set_id"] = ps.scenario_set_id;
    j["design"] = design_to_json(ps.design);
    j["in_sample"]["design_cost_eur"] = ps.in_sample.design_cost;
    j["in_sample"]["expected_operational_eur"] = ps.in_sample.expected_operational;
    j["in_sample"]["cvar_operational_eur"] = ps.in_sample.cvar_operational;
    j["in_sample"]["objective_eur"] = ps.objective;
    j["in_sample"]["scenario_costs_eur"] = ps.scenario_costs;
    j["in_sample"]["expected_consumption_mwh"] = ps.expected_consumption_mwh;
    json prices = json::object();
    for (const auto& f : plant_used.futures) prices[f.key()] = f.price_eur_mwh;
    j["futures_prices_eur_mwh"] = prices;
    j["artifact_version"] = kArtifactVersion;
    return j;
}

json report_to_json(const TestReport& rep) {
    json rows = json::array();
    for (int i = 0; i < rep.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        rows.push_back({{"scenario", rep.scenario_labels[k]},
                        {"operational_cost_eur", rep.operational_cost_eur[k]},
                        {"lcoh_eur_kg", rep.lcoh_eur_kg[k]},
                        {"load_factor", rep.load_factors[k]},
                        {"rfnbo_share", rep.rfnbo_shares[k]}});
    }
    json j;
    j["design_label"] = rep.design_label;
    j["config_hash"] = rep.config_hash;
    j["test_set_id"] = rep.test_set_id;
    j["design_cost_eur"] = rep.design_cost_eur;
    j["rows"] = rows;
    j["mean_lcoh_eur_kg"] = rep.mean_lcoh;
    j["worst_lcoh_eur_kg"] = rep.worst_lcoh;
    j["artifact_version"] = kArtifactVersion;
    return j;
}

TestReport report_from_json(const json& j) {
    TestReport rep;
    rep.design_label = j.at("design_label").get<std::string>();
    rep.config_hash = j.at("config_hash").get<std::string>();
    rep.test_set_id = j.at("test_set_id").get<std::string>();
    rep.design_cost_eur = j.at("design_cost_eur").get<double>();
    for (const json& row : j.at("rows")) {
        rep.scenario_labels.push_back(row.at("scenario").get<std::string>());
        rep.operational_cost_eur.push_back(row.at("operational_cost_eur").get<double>());
        rep.lcoh_eur_kg.push_back(row.at("lcoh_eur_kg").get<double>());
        rep.load_factors.push_back(row.at("load_factor").get<double>());
        rep.rfnbo_shares.push_back(row.at("rfnbo_share").get<double>());
    }
    rep.mean_lcoh = j.at("mean_lcoh_eur_kg").get<double>();
    rep.worst_lcoh = j.at("worst_lcoh_eur_kg").get<double>();
    return rep;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string format_number(double v) {
    json j = v;  // shortest round-trip formatting, deterministic
    return j.dump();
}

}  // namespace

void write_text_file(const std::filesystem::path& file, const std::string& content) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, file);
}

void write_solution_file(const PolicySolution& ps, const PlantConfig& plant_used,
                         const std::filesystem::path& file) {
    write_text_file(file, solution_to_json(ps, plant_used).dump(2) + "\n");
}

PolicySolution read_solution_file(const std::filesystem::path& file,
                                  std::vector<FuturesProduct>* priced_products) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open solution file " + file.string());
    json j;
    try {
        in >> j;
        PolicySolution ps;
        ps.policy_label = j.at("policy").get<std::string>();
        ps.config_hash = j.at("config_hash").get<std::string>();
        ps.scenario_set_id = j.at("scenario_set_id").get<std::string>();
        ps.design = design_from_json(j.at("design"));
        const json& is = j.at("in_sample");
        ps.in_sample.design_cost = is.at("design_cost_eur").get<double>();
        ps.in_sample.expected_operational = is.at("expected_operational_eur").get<double>();
        ps.in_sample.cvar_operational = is.at("cvar_operational_eur").get<double>();
        ps.objective = is.at("objective_eur").get<double>();
        ps.scenario_costs = is.at("scenario_costs_eur").get<std::vector<double>>();
        ps.expected_consumption_mwh = is.at("expected_consumption_mwh").get<double>();
        if (priced_products) {
            priced_products->clear();
            for (const auto& [key, price] : j.at("futures_prices_eur_mwh").items()) {
                FuturesProduct prod;
                const auto colon = key.find(':');
                prod.id = key.substr(0, colon);
                prod.profile = key.substr(colon + 1) == "baseload" ? DeliveryProfile::Baseload
                                                                   : DeliveryProfile::Peakload;
                prod.price_eur_mwh = price.get<double>();
                priced_products->push_back(std::move(prod));
            }
        }
        return ps;
    } catch (const json::exception& e) {
        throw SchemaError("solution file " + file.string() + ": " + e.what());
    }
}

void write_test_report_file(const TestReport& rep, const std::filesystem::path& json_file) {
    write_text_file(json_file, report_to_json(rep).dump(2) + "\n");
    std::ostringstream csv;
    csv << "scenario,operational_cost_eur,lcoh_eur_kg,load_factor,rfnbo_share\n";
    for (int i = 0; i < rep.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        csv << csv_escape(rep.scenario_labels[k]) << "," << format_number(rep.operational_cost_eur[k])
            << "," << format_number(rep.lcoh_eur_kg[k]) << "," << format_number(rep.load_factors[k])
            << "," << format_number(rep.rfnbo_shares[k]) << "\n";
    }
    auto csv_file = json_file;
    csv_file.replace_extension(".csv");
    write_text_file(csv_file, csv.str());
}

TestReport read_test_report_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open report file " + file.string());
    json j;
    try {
        in >> j;
        return report_from_json(j);
    } catch (const json::exception& e) {
        throw SchemaError("report file " + file.string() + ": " + e.what());
    }
}

void write_metrics_file(const std::vector<PolicyDelta>& rows, const std::string& config_hash,
                        const std::filesystem::path& json_file) {
    json j;
    j["config_hash"] = config_hash;
    j["artifact_version"] = kArtifactVersion;
    json arr = json::array();
    for (const auto& d : rows)
        arr.push_back({{"metric", d.metric},
                       {"baseline", d.baseline},
                       {"comparison", d.comparison},
                       {"mean_delta", d.mean_delta},
                       {"worst_delta", d.worst_delta}});
    j["metrics"] = arr;
    write_text_file(json_file, j.dump(2) + "\n");

    std::ostringstream csv;
    csv << "metric,baseline,comparison,mean_delta_pct,worst_delta_pct\n";
    for (const auto& d : rows)
        csv << csv_escape(d.metric) << "," << csv_escape(d.baseline) << ","
            << csv_escape(d.comparison) << "," << format_number(100.0 * d.mean_delta) << ","
            << format_number(100.0 * d.worst_delta) << "\n";
    auto csv_file = json_file;
    csv_file.replace_extension(".csv");
    write_text_file(csv_file, csv.str());
}

namespace {

struct SetCache {
    const RunConfig& cfg;
    std::map<std::string, ScenarioSet> sets;

    const ScenarioSet& get(const std::string& name) {
        auto it = sets.find(name);
        if (it == sets.end()) it = sets.emplace(name, build_scenario_set(cfg, name)).first;
        return it->second;
    }
};

PlantConfig plant_for_phase(const RunConfig& cfg, SetCache& cache, const ScenarioSet& set) {
    if (cfg.price_mode == FuturesPriceMode::InSample)
        return plant_for_set(cfg, cache.get(cfg.default_in_sample));
    return plant_for_set(cfg, set);
}

StudyReport run_benchmark(const RunConfig& cfg, const BenchmarkStudySpec& spec,
                          const std::string& which, const StudyOptions& opts) {
    if (spec.policies.empty()) throw ConfigError("study '" + which + "' has no policy roster");
    StudyReport rep;
    rep.study = which;
    rep.config_hash = cfg.config_hash;
    rep.test_set_name = spec.test_set;

    SetCache cache{cfg, {}};
    const ScenarioSet& test_set = cache.get(spec.test_set);
    rep.test_set_id = scenario_set_id(cfg, spec.test_set, test_set);
    const PlantConfig plant_test = plant_for_phase(cfg, cache, test_set);

    for (const auto& entry : spec.policies) {
        PolicyRunResult run;
        run.label = entry.label;
        run.in_sample_set = entry.in_sample_set;
        try {
            const ScenarioSet& in_sample = cache.get(entry.in_sample_set);
            const PlantConfig plant_opt = plant_for_phase(cfg, cache, in_sample);
            const PolicySpec ps = parse_label(entry.label);
            run.solution = solve_policy(ps, in_sample, plant_opt, opts.solver,
                                        cfg.pe_annual_electrical_mwh);
            run.solution.config_hash = cfg.config_hash;
            run.solution.scenario_set_id = scenario_set_id(cfg, entry.in_sample_set, in_sample);
            run.report = run_test_set(run.solution.design, test_set, plant_test, opts.jobs);
            run.report.design_label = run.label;
            run.report.test_set_id = rep.test_set_id;
            run.report.config_hash = cfg.config_hash;
            run.hedge = hedge_ratio(run.solution, in_sample, plant_opt);
        } catch (const Error& e) {
            run.failed = true;
            run.error = e.what();
            rep.any_failed = true;
        }
        rep.policies.push_back(std::move(run));
    }

    for (const auto& m : spec.metrics) {
        const PolicyRunResult* a = nullptr;
        const PolicyRunResult* b = nullptr;
        for (const auto& run : rep.policies) {
            if (run.label == m.baseline) a = &run;
            if (run.label == m.comparison) b = &run;
        }
        if (!a || !b) throw ConfigError("metric '" + m.name + "' references a policy outside the roster");
        if (a->failed || b->failed) continue;
        rep.metrics.push_back(policy_delta(a->report, b->report, m.name));
    }
    return rep;
}

StudyReport run_prospective(const RunConfig& cfg, const StudyOptions& opts) {
    const ProspectiveStudySpec& spec = cfg.prospective;
    if (spec.contexts.empty()) throw ConfigError("prospective study has no contexts configured");
    StudyReport rep;
    rep.study = "prospective";
    rep.config_hash = cfg.config_hash;
    rep.test_set_name = spec.test_set;

    SetCache cache{cfg, {}};
    const ScenarioSet& in_sample = cache.get(spec.in_sample_set);
    const ScenarioSet& test_set = cache.get(spec.test_set);
    rep.test_set_id = scenario_set_id(cfg, spec.test_set, test_set);

    for (const auto& ctx : spec.contexts) {
        ContextRunResult run;
        run.context = ctx.name;
        run.subsidy_eur_mwh = ctx.subsidy_eur_mwh;
        run.min_share = ctx.min_share;
        try {
            RunConfig variant = cfg;
            variant.plant.rfnbo_subsidy_eur_mwh = ctx.subsidy_eur_mwh;
            variant.plant.rfnbo_min_share = ctx.min_share;
            SetCache vcache{variant, {}};
            const PlantConfig plant_opt = plant_for_phase(variant, vcache, in_sample);
            const PlantConfig plant_test = plant_for_phase(variant, vcache, test_set);

            const PolicySpec ps = parse_label(spec.policy_label);
            run.solution = solve_policy(ps, in_sample, plant_opt, opts.solver,
                                        cfg.pe_annual_electrical_mwh);
            run.solution.config_hash = cfg.config_hash;
            run.solution.scenario_set_id = scenario_set_id(cfg, spec.in_sample_set, in_sample);
            run.report = run_test_set(run.solution.design, test_set, plant_test, opts.jobs);
            run.report.design_label = spec.policy_label + "@" + ctx.name;
            run.report.test_set_id = rep.test_set_id;
            run.report.config_hash = cfg.config_hash;
            run.hedge = hedge_ratio(run.solution, in_sample, plant_opt);
            double total = 0.0, lowest = kInf;
            for (double share : run.report.rfnbo_shares) {
                total += share;
                lowest = std::min(lowest, share);
            }
            run.mean_rfnbo = run.report.size() > 0 ? total / run.report.size() : 0.0;
            run.lowest_rfnbo = run.report.size() > 0 ? lowest : 0.0;
        } catch (const Error& e) {
            run.failed = true;
            run.error = e.what();
            rep.any_failed = true;
        }
        rep.contexts.push_back(std::move(run));
    }
    return rep;
}

}  // namespace

StudyReport run_study(const RunConfig& cfg, const std::string& which, const StudyOptions& opts) {
    if (which == "part1") return run_benchmark(cfg, cfg.part1, which, opts);
    if (which == "part2") return run_benchmark(cfg, cfg.part2, which, opts);
    if (which == "prospective") return run_prospective(cfg, opts);
    throw ConfigError("unknown study '" + which + "' (expected part1, part2 or prospective)");
}

void write_study_report(const StudyReport& rep, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    json j;
    j["study"] = rep.study;
    j["config_hash"] = rep.config_hash;
    j["artifact_version"] = kArtifactVersion;
    j["test_set"] = {{"name", rep.test_set_name}, {"id", rep.test_set_id}};

    json policies = json::array();
    for (const auto& run : rep.policies) {
        json p;
        p["label"] = run.label;
        p["in_sample_set"] = run.in_sample_set;
        p["failed"] = run.failed;
        if (run.failed) {
            p["error"] = run.error;
        } else {
            p["design"] = design_to_json(run.solution.design);
            p["in_sample"] = {{"design_cost_eur", run.solution.in_sample.design_cost},
                              {"expected_operational_eur", run.solution.in_sample.expected_operational},
                              {"cvar_operational_eur", run.solution.in_sample.cvar_operational},
                              {"objective_eur", run.solution.objective}};
            p["hedge_ratio"] = run.hedge;
            p["test"] = report_to_json(run.report);
        }
        policies.push_back(std::move(p));
    }
    j["policies"] = policies;

    json metrics = json::array();
    for (const auto& d : rep.metrics)
        metrics.push_back({{"metric", d.metric},
                           {"baseline", d.baseline},
                           {"comparison", d.comparison},
                           {"mean_delta", d.mean_delta},
                           {"worst_delta", d.worst_delta}});
    j["metrics"] = metrics;

    json contexts = json::array();
    for (const auto& run : rep.contexts) {
        json c;
        c["context"] = run.context;
        c["subsidy_eur_mwh"] = run.subsidy_eur_mwh;
        c["min_share"] = run.min_share;
        c["failed"] = run.failed;
        if (run.failed) {
            c["error"] = run.error;
        } else {
            c["design"] = design_to_json(run.solution.design);
            c["hedge_ratio"] = run.hedge;
            c["mean_rfnbo_share"] = run.mean_rfnbo;
            c["lowest_rfnbo_share"] = run.lowest_rfnbo;
            c["test"] = report_to_json(run.report);
        }
        contexts.push_back(std::move(c));
    }
    j["contexts"] = contexts;

    write_text_file(out_dir / ("study_" + rep.study + ".json"), j.dump(2) + "\n");

    // per-scenario LCOH rows for all runs
    std::ostringstream lcoh_csv;
    lcoh_csv << "run,scenario,lcoh_eur_kg,operational_cost_eur,load_factor,rfnbo_share\n";
    auto emit_rows = [&](const std::string& name, const TestReport& r) {
        for (int i = 0; i < r.size(); ++i) {
            const auto k = static_cast<std::size_t>(i);
            lcoh_csv << csv_escape(name) << "," << csv_escape(r.scenario_labels[k]) << ","
                     << format_number(r.lcoh_eur_kg[k]) << ","
                     << format_number(r.operational_cost_eur[k]) << ","
                     << format_number(r.load_factors[k]) << "," << format_number(r.rfnbo_shares[k])
                     << "\n";
        }
    };
    for (const auto& run : rep.policies)
        if (!run.failed) emit_rows(run.label, run.report);
    for (const auto& run : rep.contexts)
        if (!run.failed) emit_rows(run.context, run.report);
    write_text_file(out_dir / ("lcoh_" + rep.study + ".csv"), lcoh_csv.str());

    if (!rep.metrics.empty())
        write_metrics_file(rep.metrics, rep.config_hash, out_dir / ("metrics_" + rep.study + ".json"));

    // bar-plot series: mean with min/max whiskers plus headline design numbers
    std::ostringstream plot;
    plot << "run,mean_lcoh,min_lcoh,max_lcoh,ez_mw,hs_energy_mwh,hs_power_mw,ppa_total_mwp,"
            "futures_total_mwh,hedge_ratio,mean_rfnbo_share\n";
    auto emit_plot = [&](const std::string& name, const PolicySolution& sol, const TestReport& r,
                         double hedge, double mean_rfnbo) {
        double lo = kInf;
        for (double v : r.lcoh_eur_kg) lo = std::min(lo, v);
        double ppa_total = 0.0;
        for (const auto& [park, mw] : sol.design.ppa_peak_mw) ppa_total += mw;
        double fut_total = 0.0;
        for (const auto& [id, mwh] : sol.design.baseload_mwh) fut_total += mwh;
        for (const auto& [id, mwh] : sol.design.peakload_mwh) fut_total += mwh;
        plot << csv_escape(name) << "," << format_number(r.mean_lcoh) << "," << format_number(lo)
             << "," << format_number(r.worst_lcoh) << "," << format_number(sol.design.ez_power_mw)
             << "," << format_number(sol.design.storage_energy_mwh) << ","
             << format_number(sol.design.storage_power_mw) << "," << format_number(ppa_total) << ","
             << format_number(fut_total) << "," << format_number(hedge) << ","
             << format_number(mean_rfnbo) << "\n";
    };
    for (const auto& run : rep.policies) {
        if (run.failed) continue;
        double mean_rfnbo = 0.0;
        for (double s : run.report.rfnbo_shares) mean_rfnbo += s;
        if (run.report.size() > 0) mean_rfnbo /= run.report.size();
        emit_plot(run.label, run.solution, run.report, run.hedge, mean_rfnbo);
    }
    for (const auto& run : rep.contexts)
        if (!run.failed) emit_plot(run.context, run.solution, run.report, run.hedge, run.mean_rfnbo);
    write_text_file(out_dir / ("plot_" + rep.study + ".csv"), plot.str());
}

}  // namespace h2plan
