#include "h2plan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace h2plan {

void Scenario::validate() const {
    const int H = hours();
    if (H < 1) throw SchemaError("scenario '" + label + "' has an empty horizon");
    if (day_ahead.unit != Unit::EurPerMwh) throw SchemaError("day-ahead series must carry a price unit");
    if (demand.hours() != H)
        throw SchemaError("scenario '" + label + "': demand horizon " + std::to_string(demand.hours()) +
                          " != " + std::to_string(H));
    if (demand.unit != Unit::MwH2) throw SchemaError("demand series must carry the MW H2 unit");
    for (const auto& [park, avail] : ppa_availability) {
        if (avail.hours() != H)
            throw SchemaError("scenario '" + label + "': availability horizon mismatch for park " + park);
        if (avail.unit != Unit::AvailabilityFraction)
            throw SchemaError("availability series for park " + park + " must carry the availability unit");
    }
    day_ahead.validate();
    demand.validate();
    for (const auto& [park, avail] : ppa_availability) avail.validate();
}

ScenarioSet ScenarioSet::uniform(std::vector<Scenario> scenarios) {
    ScenarioSet set;
    const std::size_t n = scenarios.size();
    set.scenarios = std::move(scenarios);
    set.probabilities.assign(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
    return set;
}

int ScenarioSet::hours() const {
    if (scenarios.empty()) throw SchemaError("empty scenario set");
    return scenarios.front().hours();
}

void ScenarioSet::validate() const {
    if (scenarios.empty()) throw SchemaError("empty scenario set");
    if (probabilities.size() != scenarios.size())
        throw SchemaError("probability count does not match scenario count");
    double total = 0.0;
    for (double p : probabilities) {
        if (p < 0.0) throw RangeError("negative scenario probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw RangeError("scenario probabilities sum to " + std::to_string(total));

    const int H = scenarios.front().hours();
    const auto& ref = scenarios.front().ppa_availability;
    for (const auto& sc : scenarios) {
        sc.validate();
        if (sc.hours() != H) throw SchemaError("scenario '" + sc.label + "' has a different horizon");
        if (sc.ppa_availability.size() != ref.size())
            throw SchemaError("scenario '" + sc.label + "' has a different park set");
        for (const auto& [park, series] : ref)
            if (!sc.ppa_availability.count(park))
                throw SchemaError("scenario '" + sc.label + "' is missing park " + park);
    }
}

std::string profile_name(DeliveryProfile p) {
    return p == DeliveryProfile::Baseload ? "baseload" : "peakload";
}

int resolve_window_end(int h_start, int h_end_inclusive, const std::vector<int>& all_starts) {
    if (h_end_inclusive <= h_start) throw RangeError("delivery window must cover at least one hour");
    for (int s : all_starts)
        if (s == h_end_inclusive && s != h_start) return h_end_inclusive;
    return h_end_inclusive + 1;
}

void SynthesisKnobs::validate() const {
    if (!(mean_scale > 0.0)) throw RangeError("mean scale must be positive");
    if (seasonal_scale < 0.0 || daily_spread_scale < 0.0)
        throw RangeError("seasonal and daily spread scales must be non-negative");
}

std::pair<ScenarioSet, ScenarioSet> split_even_odd(const std::map<int, Scenario>& by_year) {
    std::vector<Scenario> in_sample, out_of_sample;
    for (const auto& [year, sc] : by_year) {
        Scenario copy = sc;
        copy.source_year = year;
        if (year % 2 == 0)
            in_sample.push_back(std::move(copy));
        else
            out_of_sample.push_back(std::move(copy));
    }
    if (in_sample.empty()) throw SplitError("no even years available for the in-sample set");
    if (out_of_sample.empty()) throw SplitError("no odd years available for the out-of-sample set");
    return {ScenarioSet::uniform(std::move(in_sample)), ScenarioSet::uniform(std::move(out_of_sample))};
}

HourlySeries synthesize_day_ahead(const HourlySeries& base, const SynthesisKnobs& knobs) {
    knobs.validate();
    if (base.unit != Unit::EurPerMwh) throw SchemaError("synthesis expects a price series");
    const int H = base.hours();
    if (H < 1 || H > kHoursPerYear) throw RangeError("synthesis requires a horizon within one year");

    const double mu = base.mean();

    // Monthly means over the hours actually present.
    std::array<double, 12> month_sum{}, month_cnt{};
    for (int h = 1; h <= H; ++h) {
        const int m = month_of_hour(h) - 1;
        month_sum[static_cast<std::size_t>(m)] += base.at_hour(h);
        month_cnt[static_cast<std::size_t>(m)] += 1.0;
    }

    const int days = (H + 23) / 24;
    std::vector<double> day_sum(static_cast<std::size_t>(days), 0.0),
        day_cnt(static_cast<std::size_t>(days), 0.0);
    for (int h = 1; h <= H; ++h) {
        const int d = day_of_hour(h) - 1;
        const int m = month_of_hour(h) - 1;
        const double monthly = month_sum[static_cast<std::size_t>(m)] / month_cnt[static_cast<std::size_t>(m)];
        day_sum[static_cast<std::size_t>(d)] += base.at_hour(h) - monthly;
        day_cnt[static_cast<std::size_t>(d)] += 1.0;
    }

    HourlySeries out;
    out.unit = Unit::EurPerMwh;
    out.values.resize(static_cast<std::size_t>(H));
    for (int h = 1; h <= H; ++h) {
        const int m = month_of_hour(h) - 1;
        const int d = day_of_hour(h) - 1;
        const double monthly = month_sum[static_cast<std::size_t>(m)] / month_cnt[static_cast<std::size_t>(m)];
        const double seasonal = monthly - mu;                 // monthly-mean deviation
        const double daily = day_sum[static_cast<std::size_t>(d)] / day_cnt[static_cast<std::size_t>(d)];
        const double within_day = base.at_hour(h) - monthly - daily;
        out.at_hour(h) = knobs.mean_scale * mu + knobs.seasonal_scale * seasonal + daily +
                         knobs.daily_spread_scale * within_day;
    }
    return out;
}

ScenarioSet renormalize_set_mean(ScenarioSet set, double target_mean) {
    set.validate();
    if (!(target_mean > 0.0)) throw RangeError("target mean must be positive");
    double grand = 0.0;
    for (int s = 0; s < set.size(); ++s)
        grand += set.probabilities[static_cast<std::size_t>(s)] *
                 set.scenarios[static_cast<std::size_t>(s)].day_ahead.mean();
    if (std::abs(grand) < 1e-12) throw DegenerateError("grand mean price is zero, cannot renormalize");
    const double factor = target_mean / grand;
    for (auto& sc : set.scenarios)
        for (double& v : sc.day_ahead.values) v *= factor;
    return set;
}

Scenario average_scenario(const ScenarioSet& set) {
    set.validate();
    const int H = set.hours();

    Scenario avg;
    avg.label = "average";
    avg.day_ahead = HourlySeries::constant(0.0, H, Unit::EurPerMwh);
    avg.demand = HourlySeries::constant(0.0, H, Unit::MwH2);
    for (const auto& [park, series] : set.scenarios.front().ppa_availability)
        avg.ppa_availability[park] = HourlySeries::constant(0.0, H, Unit::AvailabilityFraction);

    for (int s = 0; s < set.size(); ++s) {
        const double p = set.probabilities[static_cast<std::size_t>(s)];
        const Scenario& sc = set.scenarios[static_cast<std::size_t>(s)];
        for (int h = 1; h <= H; ++h) {
            avg.day_ahead.at_hour(h) += p * sc.day_ahead.at_hour(h);
            avg.demand.at_hour(h) += p * sc.demand.at_hour(h);
        }
        for (const auto& [park, series] : sc.ppa_availability) {
            auto it = avg.ppa_availability.find(park);
            if (it == avg.ppa_availability.end())
                throw SchemaError("park " + park + " not present in every scenario");
            for (int h = 1; h <= H; ++h) it->second.at_hour(h) += p * series.at_hour(h);
        }
    }
    avg.validate();
    return avg;
}

std::vector<FuturesProduct> arbitrage_free_futures_prices(const ScenarioSet& set,
                                                          std::vector<FuturesProduct> products) {
    set.validate();
    const int H = set.hours();
    for (auto& prod : products) {
        if (prod.h_begin < 1 || prod.h_end_excl > H + 1 || prod.window_hours() < 1)
            throw RangeError("delivery window of product " + prod.key() + " outside the horizon");
        double weighted = 0.0;
        double hours_counted = 0.0;
        for (int s = 0; s < set.size(); ++s) {
            const double p = set.probabilities[static_cast<std::size_t>(s)];
            const auto& da = set.scenarios[static_cast<std::size_t>(s)].day_ahead;
            double sum = 0.0;
            int cnt = 0;
            for (int h = prod.h_begin; h < prod.h_end_excl; ++h) {
                if (prod.profile == DeliveryProfile::Peakload && peak_indicator(h) == 0) continue;
                sum += da.at_hour(h);
                ++cnt;
            }
            weighted += p * sum;
            hours_counted += p * cnt;
        }
        if (hours_counted <= 0.0)
            throw DegenerateError("no peak hours inside the delivery window of " + prod.key());
        prod.price_eur_mwh = weighted / hours_counted;
    }
    return products;
}

CapacityFactorStats ppa_capacity_stats(const std::map<int, HourlySeries>& availability_by_year) {
    if (availability_by_year.empty()) throw SchemaError("no availability years provided");
    CapacityFactorStats stats;
    stats.cf_min = std::numeric_limits<double>::infinity();
    stats.cf_max = -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& [year, series] : availability_by_year) {
        const double cf = series.mean();
        stats.cf_min = std::min(stats.cf_min, cf);
        stats.cf_max = std::max(stats.cf_max, cf);
        total += cf;
    }
    stats.cf_mean = total / static_cast<double>(availability_by_year.size());
    return stats;
}

}  // namespace h2plan
