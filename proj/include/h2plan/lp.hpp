#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "h2plan/errors.hpp"

namespace h2plan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : std::uint8_t { LE, EQ, GE };

struct ColMeta {
    std::string symbol;  // role, e.g. "u_da_out" or "x_ez_p"
    int scenario = -1;   // -1 for first-stage and auxiliary columns
    int hour = -1;       // 1-based, -1 when not hour indexed
};

/// Sparse LP in the form  min c'x  s.t. row_i x {<=,=,>=} rhs_i,  l <= x <= u.
/// Columns and rows keep names and (scenario, hour, symbol) metadata so that
/// violations and traces can be reported in model terms.
class LinearProgram {
public:
    int add_column(std::string name, double lb, double ub, double obj = 0.0, ColMeta meta = {});
    int add_row(std::string name, Sense sense, double rhs, std::vector<std::pair<int, double>> terms);

    void add_objective(int col, double coeff);
    void set_objective(int col, double coeff);
    void set_bounds(int col, double lb, double ub);
    void fix_column(int col, double value) { set_bounds(col, value, value); }

    int num_columns() const { return static_cast<int>(lb_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    int num_nonzeros() const { return static_cast<int>(row_cols_.size()); }

    double lower(int col) const { return lb_[static_cast<std::size_t>(col)]; }
    double upper(int col) const { return ub_[static_cast<std::size_t>(col)]; }
    double objective(int col) const { return obj_[static_cast<std::size_t>(col)]; }
    const std::string& column_name(int col) const { return col_names_[static_cast<std::size_t>(col)]; }
    const ColMeta& column_meta(int col) const { return meta_[static_cast<std::size_t>(col)]; }

    Sense row_sense(int row) const { return rows_[static_cast<std::size_t>(row)].sense; }
    double row_rhs(int row) const { return rows_[static_cast<std::size_t>(row)].rhs; }
    const std::string& row_name(int row) const { return rows_[static_cast<std::size_t>(row)].name; }

    /// Entries of one row as parallel (column, coefficient) spans.
    std::pair<std::span<const int>, std::span<const double>> row_entries(int row) const;

    double row_activity(int row, std::span<const double> x) const;

    /// Plain-text snapshot (bounds, rows, objective) for debugging.
    void dump(std::ostream& os) const;

private:
    struct Row {
        std::string name;
        Sense sense;
        double rhs;
        std::size_t start;
        std::size_t len;
    };

    std::vector<std::string> col_names_;
    std::vector<double> lb_, ub_, obj_;
    std::vector<ColMeta> meta_;
    std::vector<Row> rows_;
    std::vector<int> row_cols_;
    std::vector<double> row_vals_;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string status_name(SolveStatus s);

struct SolverOptions {
    double feasibility_tol = 1e-6;
    double optimality_tol = 1e-6;
    int iteration_limit = 500000;
    bool deterministic_ordering = true;  // fixed pivot tie-breaking; always honoured
    bool scale = true;                   // equilibrate rows/columns before solving
};

struct SolveStats {
    int phase1_iterations = 0;
    int iterations = 0;
    int refactorizations = 0;
};

struct Solution {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    SolveStats stats;

    bool optimal() const { return status == SolveStatus::Optimal; }
    double value(int col) const { return x[static_cast<std::size_t>(col)]; }
};

/// Deterministic bounded-variable simplex. Identical inputs yield identical
/// solution bytes.
Solution solve(const LinearProgram& lp, const SolverOptions& opts = {});

struct ViolationReport {
    double max_bound_violation = 0.0;
    std::string bound_column;
    double max_row_violation = 0.0;      // absolute residual
    double max_row_relative = 0.0;       // residual / max(1, |rhs|)
    std::string row_name;

    double worst_relative() const { return std::max(max_bound_violation, max_row_relative); }
};

/// Largest bound and row violations of a candidate point, with the offending
/// column/row identifiers.
ViolationReport check_point(const LinearProgram& lp, std::span<const double> x);

}  // namespace h2plan
