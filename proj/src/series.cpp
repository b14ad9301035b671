#include "h2plan/series.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace h2plan {

std::string unit_name(Unit u) {
    switch (u) {
        case Unit::EurPerMwh: return "eur_per_mwh";
        case Unit::AvailabilityFraction: return "availability";
        case Unit::MwH2: return "mw_h2";
    }
    return "?";
}

double HourlySeries::sum() const {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

double HourlySeries::mean() const {
    if (values.empty()) throw DegenerateError("mean of empty series");
    return sum() / static_cast<double>(values.size());
}

void HourlySeries::validate() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!std::isfinite(v))
            throw ParseError("non-finite value at hour " + std::to_string(i + 1));
        if (unit == Unit::AvailabilityFraction && (v < 0.0 || v > 1.0))
            throw RangeError("availability " + std::to_string(v) + " outside [0,1] at hour " +
                             std::to_string(i + 1));
        if (unit == Unit::MwH2 && v < 0.0)
            throw RangeError("negative demand " + std::to_string(v) + " at hour " + std::to_string(i + 1));
    }
}

HourlySeries HourlySeries::constant(double value, int hours, Unit unit) {
    HourlySeries s;
    s.values.assign(static_cast<std::size_t>(hours), value);
    s.unit = unit;
    s.validate();
    return s;
}

HourlySeries load_scenario_csv(const std::filesystem::path& path, Unit unit, int expected_hours) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open scenario file " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty scenario file " + path.string());

    HourlySeries s;
    s.unit = unit;
    s.values.reserve(static_cast<std::size_t>(expected_hours));
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        // tolerate trailing CR and blank tail lines
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        const char* begin = line.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || (end && *end != '\0'))
            throw ParseError("non-numeric value '" + line + "' at row " + std::to_string(row) + " of " +
                             path.string());
        s.values.push_back(v);
    }
    if (s.hours() != expected_hours)
        throw SchemaError("expected " + std::to_string(expected_hours) + " rows in " + path.string() +
                          ", found " + std::to_string(s.hours()));
    s.validate();
    return s;
}

namespace {

constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

std::array<int, 13> month_start_hours() {
    std::array<int, 13> start{};
    start[0] = 1;
    for (int m = 0; m < 12; ++m) start[static_cast<std::size_t>(m + 1)] = start[static_cast<std::size_t>(m)] + kMonthDays[static_cast<std::size_t>(m)] * 24;
    return start;  // start[12] == 8761
}

}  // namespace

int month_of_hour(int h) {
    if (h < 1 || h > kHoursPerYear) throw RangeError("hour " + std::to_string(h) + " outside calendar");
    static const std::array<int, 13> start = month_start_hours();
    int m = 1;
    while (m < 12 && h >= start[static_cast<std::size_t>(m)]) ++m;
    return m;
}

int day_of_hour(int h) {
    if (h < 1) throw RangeError("hour index must be positive");
    return (h - 1) / 24 + 1;
}

int month_length_hours(int month) {
    if (month < 1 || month > 12) throw RangeError("month out of range");
    return kMonthDays[static_cast<std::size_t>(month - 1)] * 24;
}

int peak_indicator(int h) {
    if (h < 1) throw RangeError("hour index must be positive");
    const int hod = h % 24;
    return (hod >= 8 && hod < 20) ? 1 : 0;
}

HourlySeries standard_demand(double annual_h2_mwh, int hours) {
    if (annual_h2_mwh <= 0.0) throw RangeError("annual hydrogen demand must be positive");
    if (hours < 1) throw RangeError("horizon must be positive");
    return HourlySeries::constant(annual_h2_mwh / static_cast<double>(hours), hours, Unit::MwH2);
}

HourlySeries seasonal_demand(double annual_h2_mwh, const std::array<double, 12>& monthly_multipliers,
                             int hours) {
    if (annual_h2_mwh <= 0.0) throw RangeError("annual hydrogen demand must be positive");
    if (hours < 1 || hours > kHoursPerYear) throw RangeError("horizon must be within one calendar year");
    for (double m : monthly_multipliers)
        if (1.0 + m < 0.0) throw RangeError("monthly multiplier below -1 yields negative demand");

    const double base = annual_h2_mwh / static_cast<double>(hours);
    HourlySeries s;
    s.unit = Unit::MwH2;
    s.values.resize(static_cast<std::size_t>(hours));
    for (int h = 1; h <= hours; ++h)
        s.at_hour(h) = base * (1.0 + monthly_multipliers[static_cast<std::size_t>(month_of_hour(h) - 1)]);

    const double total = s.sum();
    if (total <= 0.0) throw RangeError("seasonal profile sums to zero");
    const double factor = annual_h2_mwh / total;
    for (double& v : s.values) v *= factor;
    return s;
}

std::array<double, 12> default_seasonal_multipliers() {
    // Raw shape; March and August are the pinned extremes.
    std::array<double, 12> m = {0.10, 0.15, 0.24, 0.15, 0.05, -0.20, -0.45, -0.60, -0.20, 0.05, 0.10, 0.15};
    // Shift the other ten months by a constant so the month-length weighted mean
    // is zero; the rescale in seasonal_demand is then a no-op and the March and
    // August ratios to the overall mean land exactly on 1.24 and 0.40.
    double weighted = 0.0, other_days = 0.0;
    for (int i = 0; i < 12; ++i) {
        weighted += kMonthDays[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)];
        if (i != 2 && i != 7) other_days += kMonthDays[static_cast<std::size_t>(i)];
    }
    const double shift = -weighted / other_days;
    for (int i = 0; i < 12; ++i)
        if (i != 2 && i != 7) m[static_cast<std::size_t>(i)] += shift;
    return m;
}

}  // namespace h2plan
