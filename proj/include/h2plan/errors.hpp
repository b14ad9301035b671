#pragma once

#include <stdexcept>

namespace h2plan {

// One exception family per failure class so callers can catch precisely.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : Error { using Error::Error; };      // shape / dimension / id mismatch
struct ParseError : Error { using Error::Error; };       // unreadable numeric input
struct RangeError : Error { using Error::Error; };       // value outside its physical range
struct SplitError : Error { using Error::Error; };       // year split produced an empty side
struct DegenerateError : Error { using Error::Error; };  // zero denominator or empty selection
struct PolicyError : Error { using Error::Error; };      // policy spec inconsistent with inputs
struct ComparisonError : Error { using Error::Error; };  // reports are not comparable
struct ConfigError : Error { using Error::Error; };      // bad run configuration
struct SolverError : Error { using Error::Error; };      // LP machinery failed internally

}  // namespace h2plan
