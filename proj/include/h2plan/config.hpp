#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "h2plan/model.hpp"

namespace h2plan {

struct DemandProfileSpec {
    enum class Type { Standard, Seasonal, YearCsv, File };
    Type type = Type::Standard;
    std::array<double, 12> multipliers = default_seasonal_multipliers();
    std::filesystem::path file;  // Type::File only
};

struct SynthSpec {
    std::string label;
    int base_year = 0;
    SynthesisKnobs knobs;
    std::string demand_profile;  // empty = the set's default profile
};

struct SetSpec {
    enum class Years { Explicit, Even, Odd };

    Years parity = Years::Explicit;
    std::vector<int> years;  // Years::Explicit only
    std::string demand_profile = "standard";
    std::vector<SynthSpec> synth;
    std::string duplicate_with_demand;   // append a copy of every scenario with this profile
    std::vector<double> probabilities;   // optional non-uniform override
};

struct MetricSpec {
    std::string name;
    std::string baseline;
    std::string comparison;
};

struct StudyPolicyEntry {
    std::string label;
    std::string in_sample_set;
};

struct BenchmarkStudySpec {
    std::vector<StudyPolicyEntry> policies;
    std::string test_set;
    std::vector<MetricSpec> metrics;
};

struct ContextSpec {
    std::string name;
    double subsidy_eur_mwh = 0.0;
    double min_share = 0.0;
};

struct ProspectiveStudySpec {
    std::string policy_label;
    std::string in_sample_set;
    std::string test_set;
    std::vector<ContextSpec> contexts;
};

enum class FuturesPriceMode {
    PerSet,    // price products against whichever set they are used with
    InSample,  // price once against the default in-sample set
    Explicit,  // use the prices written in the config
};

struct RunConfig {
    std::filesystem::path base_dir;
    std::filesystem::path scenario_root;
    std::filesystem::path output_dir = "out";
    int horizon = kHoursPerYear;
    double annual_h2_mwh = 18000.0;
    PlantConfig plant;
    FuturesPriceMode price_mode = FuturesPriceMode::PerSet;

    enum class Renorm { None, Preserve, Explicit };
    Renorm renorm = Renorm::None;
    double renorm_target = 0.0;

    std::map<std::string, DemandProfileSpec> demand_profiles;
    std::map<std::string, SetSpec> scenario_sets;
    std::string default_in_sample = "in_sample";

    BenchmarkStudySpec part1, part2;
    ProspectiveStudySpec prospective;

    double pe_annual_electrical_mwh = kInf;  // non-finite: derive from expected demand
    std::uint64_t seed = 0;
    std::string config_hash;

    std::filesystem::path resolve(const std::filesystem::path& p) const {
        return p.is_absolute() ? p : base_dir / p;
    }
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Year directories found under the scenario root.
std::vector<int> discover_years(const RunConfig& cfg);

/// Unweighted mean day-ahead price over every year under the root.
double historical_mean_price(const RunConfig& cfg);

/// Loads, synthesizes and renormalizes the named scenario set.
ScenarioSet build_scenario_set(const RunConfig& cfg, const std::string& set_name);

/// Plant parameters with futures prices resolved against the given set
/// (no-op when the config pins prices explicitly).
PlantConfig plant_for_set(const RunConfig& cfg, const ScenarioSet& set);

std::string fnv1a_hex(const std::string& data);

std::string scenario_set_id(const RunConfig& cfg, const std::string& set_name,
                            const ScenarioSet& set);

}  // namespace h2plan
