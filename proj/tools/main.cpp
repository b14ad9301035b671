// Batch front end: optimize / test / compare / study / synth-scenarios.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "h2plan/study.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitPartial = 3;

std::string default_config_path(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("H2PLAN_CONFIG")) return env;
    throw h2plan::ConfigError("no config given (use --config or set H2PLAN_CONFIG)");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace h2plan;

    CLI::App app{"Hydrogen plant sizing and electricity hedging planner"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config,-c", config_path, "Run configuration file (JSON)");

    // optimize
    auto* cmd_optimize = app.add_subcommand("optimize", "Optimise one policy on its in-sample set");
    std::string policy_label, in_sample_name, out_file;
    cmd_optimize->add_option("--policy,-p", policy_label, "Policy label, e.g. S_b0.9(da,p)")->required();
    cmd_optimize->add_option("--in-sample", in_sample_name, "Scenario set name (default from config)");
    cmd_optimize->add_option("--out,-o", out_file, "Solution output file")->required();

    // test
    auto* cmd_test = app.add_subcommand("test", "Dispatch a solved design on a test set");
    std::string solution_file, test_set_name;
    bool traces = false;
    cmd_test->add_option("--solution,-s", solution_file, "Solution file from optimize")->required();
    cmd_test->add_option("--test-set,-t", test_set_name, "Scenario set name")->required();
    cmd_test->add_option("--out,-o", out_file, "Report output file (JSON; CSV written alongside)");
    cmd_test->add_flag("--traces", traces, "Keep full hourly traces in memory while dispatching");

    // compare
    auto* cmd_compare = app.add_subcommand("compare", "Policy-delta metrics between test reports");
    std::vector<std::string> report_files;
    std::vector<std::string> metric_specs;
    bool force_mix = false;
    cmd_compare->add_option("reports", report_files, "Test report JSON files")->required()->expected(-2);
    cmd_compare->add_option("--metric,-m", metric_specs,
                            "Metric as NAME:baseline_label:comparison_label (repeatable)");
    cmd_compare->add_option("--out,-o", out_file, "Metrics output file (JSON; CSV alongside)");
    cmd_compare->add_flag("--force", force_mix, "Allow reports from different config hashes");

    // study
    auto* cmd_study = app.add_subcommand("study", "Run a configured study end to end");
    std::string which_study, out_dir;
    int jobs = 1;
    cmd_study->add_option("which", which_study, "part1, part2 or prospective")->required();
    cmd_study->add_option("--out,-o", out_dir, "Output directory (default from config)");
    cmd_study->add_option("--jobs,-j", jobs, "Parallel scenario dispatches")->check(CLI::PositiveNumber);
    cmd_study->add_flag("--traces", traces, "Keep hourly traces while dispatching");

    // synth-scenarios
    auto* cmd_synth = app.add_subcommand("synth-scenarios", "Write a synthesized day-ahead series");
    int base_year = 0;
    double mean_scale = 1.0, seasonal_scale = 1.0, spread_scale = 1.0;
    cmd_synth->add_option("--base-year", base_year, "Historical year to start from")->required();
    cmd_synth->add_option("--mean-scale", mean_scale, "Scale on the yearly mean");
    cmd_synth->add_option("--seasonal-scale", seasonal_scale, "Scale on monthly deviations");
    cmd_synth->add_option("--daily-spread-scale", spread_scale, "Scale on within-day deviations");
    cmd_synth->add_option("--out,-o", out_file, "Output CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = load_run_config(default_config_path(config_path));

        if (cmd_optimize->parsed()) {
            const std::string set_name = in_sample_name.empty() ? cfg.default_in_sample : in_sample_name;
            const ScenarioSet in_sample = build_scenario_set(cfg, set_name);
            const PlantConfig plant = plant_for_set(cfg, in_sample);
            PolicySolution ps = solve_policy(parse_label(policy_label), in_sample, plant, {},
                                             cfg.pe_annual_electrical_mwh);
            ps.config_hash = cfg.config_hash;
            ps.scenario_set_id = scenario_set_id(cfg, set_name, in_sample);
            write_solution_file(ps, plant, out_file);
            std::cout << "wrote " << out_file << " (objective " << ps.objective << " EUR)\n";
            return kExitOk;
        }

        if (cmd_test->parsed()) {
            std::vector<FuturesProduct> stored_prices;
            const PolicySolution ps = read_solution_file(solution_file, &stored_prices);
            if (ps.config_hash != cfg.config_hash)
                throw ConfigError("solution was produced with a different config (hash " +
                                  ps.config_hash + " vs " + cfg.config_hash + ")");
            const ScenarioSet test_set = build_scenario_set(cfg, test_set_name);
            PlantConfig plant = plant_for_set(cfg, test_set);
            if (cfg.price_mode == FuturesPriceMode::InSample) {
                for (auto& f : plant.futures)
                    for (const auto& stored : stored_prices)
                        if (stored.id == f.id && stored.profile == f.profile)
                            f.price_eur_mwh = stored.price_eur_mwh;
            }
            TestReport rep = run_test_set(ps.design, test_set, plant, jobs, traces);
            rep.design_label = ps.policy_label;
            rep.test_set_id = scenario_set_id(cfg, test_set_name, test_set);
            rep.config_hash = cfg.config_hash;
            if (out_file.empty()) out_file = "report_" + test_set_name + ".json";
            write_test_report_file(rep, out_file);
            std::cout << "wrote " << out_file << " (mean LCOH " << rep.mean_lcoh << " EUR/kg, worst "
                      << rep.worst_lcoh << ")\n";
            return kExitOk;
        }

        if (cmd_compare->parsed()) {
            std::vector<TestReport> reports;
            for (const auto& f : report_files) reports.push_back(read_test_report_file(f));
            for (std::size_t i = 1; i < reports.size(); ++i) {
                if (!force_mix && reports[i].config_hash != reports[0].config_hash)
                    throw ComparisonError("reports come from different configs; use --force to mix");
                if (reports[i].test_set_id != reports[0].test_set_id)
                    throw ComparisonError("reports come from different test sets");
            }
            auto find_report = [&](const std::string& lbl) -> const TestReport& {
                for (const auto& r : reports)
                    if (r.design_label == lbl) return r;
                throw ConfigError("no loaded report carries the label '" + lbl + "'");
            };
            std::vector<PolicyDelta> rows;
            if (metric_specs.empty()) {
                for (std::size_t a = 0; a < reports.size(); ++a)
                    for (std::size_t b = 0; b < reports.size(); ++b)
                        if (a != b)
                            rows.push_back(policy_delta(reports[a], reports[b], "delta"));
            } else {
                for (const auto& spec : metric_specs) {
                    const auto c1 = spec.find(':');
                    const auto c2 = spec.find(':', c1 + 1);
                    if (c1 == std::string::npos || c2 == std::string::npos)
                        throw ConfigError("metric spec must be NAME:baseline:comparison");
                    rows.push_back(policy_delta(find_report(spec.substr(c1 + 1, c2 - c1 - 1)),
                                                find_report(spec.substr(c2 + 1)),
                                                spec.substr(0, c1)));
                }
            }
            if (out_file.empty()) out_file = "metrics.json";
            write_metrics_file(rows, reports.empty() ? "" : reports[0].config_hash, out_file);
            for (const auto& d : rows)
                std::cout << d.metric << " [" << d.baseline << " - " << d.comparison << "]: mean "
                          << 100.0 * d.mean_delta << "% worst " << 100.0 * d.worst_delta << "%\n";
            return kExitOk;
        }

        if (cmd_study->parsed()) {
            StudyOptions opts;
            opts.jobs = jobs;
            opts.traces = traces;
            const StudyReport rep = run_study(cfg, which_study, opts);
            const std::filesystem::path dir =
                out_dir.empty() ? cfg.resolve(cfg.output_dir) : std::filesystem::path(out_dir);
            write_study_report(rep, dir);
            std::cout << "study " << which_study << " written to " << dir.string() << "\n";
            for (const auto& run : rep.policies)
                if (run.failed) std::cerr << "policy " << run.label << " failed: " << run.error << "\n";
            for (const auto& run : rep.contexts)
                if (run.failed) std::cerr << "context " << run.context << " failed: " << run.error << "\n";
            return rep.any_failed ? kExitPartial : kExitOk;
        }

        if (cmd_synth->parsed()) {
            const auto dir = cfg.resolve(cfg.scenario_root) / std::to_string(base_year);
            const HourlySeries base =
                load_scenario_csv(dir / "day_ahead.csv", Unit::EurPerMwh, cfg.horizon);
            const HourlySeries out =
                synthesize_day_ahead(base, {mean_scale, seasonal_scale, spread_scale});
            std::string body = "day_ahead_eur_mwh\n";
            body.reserve(body.size() + out.values.size() * 16);
            for (double v : out.values) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.10g\n", v);
                body += buf;
            }
            write_text_file(out_file, body);
            std::cout << "wrote " << out_file << " (mean " << out.mean() << " EUR/MWh)\n";
            return kExitOk;
        }
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
