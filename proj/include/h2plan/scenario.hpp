#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "h2plan/series.hpp"

namespace h2plan {

/// One joint realisation of the uncertain inputs: day-ahead price, per-park
/// PPA availability, and hydrogen demand, on a common hourly horizon.
struct Scenario {
    std::string label;
    std::optional<int> source_year;  // absent for synthetic scenarios
    HourlySeries day_ahead;          // EUR/MWh
    std::map<std::string, HourlySeries> ppa_availability;  // park id -> fraction of peak power
    HourlySeries demand;             // MW H2

    int hours() const { return day_ahead.hours(); }
    void validate() const;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::vector<double> probabilities;

    static ScenarioSet uniform(std::vector<Scenario> scenarios);

    int size() const { return static_cast<int>(scenarios.size()); }
    int hours() const;
    void validate() const;  // probabilities sum to 1, shared horizon and park ids
};

enum class DeliveryProfile { Baseload, Peakload };

std::string profile_name(DeliveryProfile p);

/// Block-energy futures product. Delivery windows are half open:
/// [h_begin, h_end_excl).
struct FuturesProduct {
    std::string id;  // y, q1..q4
    DeliveryProfile profile = DeliveryProfile::Baseload;
    int h_begin = 1;
    int h_end_excl = 2;
    double price_eur_mwh = 0.0;
    double max_mwh = std::numeric_limits<double>::infinity();

    int window_hours() const { return h_end_excl - h_begin; }
    bool delivers_at(int h) const { return h >= h_begin && h < h_end_excl; }
    std::string key() const { return id + ":" + profile_name(profile); }
};

/// Resolves a closed delivery interval from a published table onto the
/// half-open convention. Tables may reuse a window's last hour as the next
/// window's first; when another window starts exactly at h_end the end is kept
/// exclusive, otherwise the closed endpoint is widened by one hour.
int resolve_window_end(int h_start, int h_end_inclusive, const std::vector<int>& all_starts);

struct PpaContract {
    enum class Tech { Solar, Wind };

    std::string park_id;
    Tech technology = Tech::Solar;
    double price_eur_mwh = 0.0;  // paid on availability (take-or-pay)
    double max_peak_mw = std::numeric_limits<double>::infinity();
};

/// Scales applied to the three components of the day-ahead decomposition.
struct SynthesisKnobs {
    double mean_scale = 1.0;
    double seasonal_scale = 1.0;
    double daily_spread_scale = 1.0;

    void validate() const;
};

// --- operations -------------------------------------------------------------

/// Even years become the in-sample set, odd years the out-of-sample set, with
/// uniform probabilities on each side.
std::pair<ScenarioSet, ScenarioSet> split_even_odd(const std::map<int, Scenario>& by_year);

/// Rebuilds a price series from its yearly mean, monthly deviation, daily-mean
/// deviation and within-day deviation, scaling the first, second and last
/// component by the respective knob. Knobs (1,1,1) reproduce the input.
HourlySeries synthesize_day_ahead(const HourlySeries& base, const SynthesisKnobs& knobs);

/// Scales every day-ahead series by one common factor so the probability
/// weighted grand mean price equals target_mean.
ScenarioSet renormalize_set_mean(ScenarioSet set, double target_mean);

/// Hour-by-hour probability weighted mean of all series in the set.
Scenario average_scenario(const ScenarioSet& set);

/// Fills product prices with the expectation of day-ahead prices over each
/// delivery window; peakload products average peak hours only.
std::vector<FuturesProduct> arbitrage_free_futures_prices(const ScenarioSet& set,
                                                          std::vector<FuturesProduct> products);

struct CapacityFactorStats {
    double cf_min = 0.0;
    double cf_mean = 0.0;
    double cf_max = 0.0;
};

/// Per-year capacity factor (mean availability), reduced to min/mean/max.
CapacityFactorStats ppa_capacity_stats(const std::map<int, HourlySeries>& availability_by_year);

}  // namespace h2plan
