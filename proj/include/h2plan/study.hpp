#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "h2plan/config.hpp"
#include "h2plan/metrics.hpp"

namespace h2plan {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct PolicyRunResult {
    std::string label;
    std::string in_sample_set;
    bool failed = false;
    std::string error;
    PolicySolution solution;
    TestReport report;
    double hedge = 0.0;
};

struct ContextRunResult {
    std::string context;
    double subsidy_eur_mwh = 0.0;
    double min_share = 0.0;
    bool failed = false;
    std::string error;
    PolicySolution solution;
    TestReport report;
    double hedge = 0.0;
    double mean_rfnbo = 0.0;
    double lowest_rfnbo = 0.0;
};

struct StudyReport {
    std::string study;
    std::string config_hash;
    std::string test_set_name;
    std::string test_set_id;
    std::vector<PolicyRunResult> policies;
    std::vector<PolicyDelta> metrics;
    std::vector<ContextRunResult> contexts;
    bool any_failed = false;
};

struct StudyOptions {
    int jobs = 1;
    bool traces = false;
    SolverOptions solver;
};

/// Runs optimize -> test -> compare for one of the configured studies
/// (part1, part2 or prospective). Failures of single policies are recorded
/// and the remaining roster still runs.
StudyReport run_study(const RunConfig& cfg, const std::string& which, const StudyOptions& opts = {});

/// Writes study_<name>.json plus LCOH / metrics / plot CSVs into out_dir.
void write_study_report(const StudyReport& rep, const std::filesystem::path& out_dir);

// --- single-command persistence ----------------------------------------------

void write_solution_file(const PolicySolution& ps, const PlantConfig& plant_used,
                         const std::filesystem::path& file);
PolicySolution read_solution_file(const std::filesystem::path& file,
                                  std::vector<FuturesProduct>* priced_products = nullptr);

void write_test_report_file(const TestReport& rep, const std::filesystem::path& json_file);
TestReport read_test_report_file(const std::filesystem::path& file);

void write_metrics_file(const std::vector<PolicyDelta>& rows, const std::string& config_hash,
                        const std::filesystem::path& json_file);

/// Atomic text write (temp file + rename).
void write_text_file(const std::filesystem::path& file, const std::string& content);

}  // namespace h2plan
