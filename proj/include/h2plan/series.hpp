#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "h2plan/errors.hpp"

namespace h2plan {

inline constexpr int kHoursPerYear = 8760;

enum class Unit { EurPerMwh, AvailabilityFraction, MwH2 };

std::string unit_name(Unit u);

/// Fixed-length hourly series tagged with the physical unit it carries.
/// Hours are 1-based throughout the library.
struct HourlySeries {
    std::vector<double> values;
    Unit unit = Unit::EurPerMwh;

    int hours() const { return static_cast<int>(values.size()); }
    double at_hour(int h) const { return values[static_cast<std::size_t>(h - 1)]; }
    double& at_hour(int h) { return values[static_cast<std::size_t>(h - 1)]; }
    double sum() const;
    double mean() const;

    // Checks finiteness plus the unit's admissible range.
    void validate() const;

    static HourlySeries constant(double value, int hours, Unit unit);
};

/// Reads a one-column CSV (single header line, one numeric value per row).
HourlySeries load_scenario_csv(const std::filesystem::path& path, Unit unit, int expected_hours);

// --- calendar helpers -------------------------------------------------------
//
// Month boundaries follow a fixed non-leap calendar. Series shorter than a full
// year use the leading part of that calendar; series longer than 8760 hours are
// rejected wherever a calendar is required.

int month_of_hour(int h);  // 1..12, requires 1 <= h <= 8760
int day_of_hour(int h);    // 1-based day index
int month_length_hours(int month);

/// 1 during the 8am-8pm block of the daily cycle, 0 otherwise.
int peak_indicator(int h);

// --- demand profiles --------------------------------------------------------

/// Flat profile delivering annual_h2_mwh over the given horizon.
HourlySeries standard_demand(double annual_h2_mwh, int hours);

/// Month-flat profile shaped by per-month multipliers, rescaled so the total
/// equals annual_h2_mwh exactly.
HourlySeries seasonal_demand(double annual_h2_mwh, const std::array<double, 12>& monthly_multipliers,
                             int hours = kHoursPerYear);

/// Multipliers with a March peak of +24% and an August trough of -60% relative
/// to the overall mean, zero-mean under month-length weighting so the two
/// extremes survive the rescale in seasonal_demand.
std::array<double, 12> default_seasonal_multipliers();

}  // namespace h2plan
