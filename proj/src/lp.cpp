#include "h2plan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace h2plan {

int LinearProgram::add_column(std::string name, double lb, double ub, double obj, ColMeta meta) {
    if (std::isnan(lb) || std::isnan(ub)) throw SchemaError("NaN bound on column " + name);
    if (lb == -kInf && ub == -kInf) throw SchemaError("column " + name + " has no finite range");
    if (lb > ub) throw SchemaError("column " + name + " has lb > ub");
    col_names_.push_back(std::move(name));
    lb_.push_back(lb);
    ub_.push_back(ub);
    obj_.push_back(obj);
    meta_.push_back(std::move(meta));
    return num_columns() - 1;
}

int LinearProgram::add_row(std::string name, Sense sense, double rhs,
                           std::vector<std::pair<int, double>> terms) {
    if (!std::isfinite(rhs)) throw SchemaError("non-finite rhs on row " + name);
    // merge duplicate columns so each (row, column) appears once
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t start = row_cols_.size();
    for (std::size_t i = 0; i < terms.size();) {
        const int col = terms[i].first;
        if (col < 0 || col >= num_columns())
            throw SchemaError("row " + name + " references unknown column " + std::to_string(col));
        double coeff = 0.0;
        while (i < terms.size() && terms[i].first == col) coeff += terms[i++].second;
        if (!std::isfinite(coeff)) throw SchemaError("non-finite coefficient on row " + name);
        if (coeff != 0.0) {
            row_cols_.push_back(col);
            row_vals_.push_back(coeff);
        }
    }
    rows_.push_back(Row{std::move(name), sense, rhs, start, row_cols_.size() - start});
    return num_rows() - 1;
}

void LinearProgram::add_objective(int col, double coeff) {
    obj_[static_cast<std::size_t>(col)] += coeff;
}

void LinearProgram::set_objective(int col, double coeff) {
    obj_[static_cast<std::size_t>(col)] = coeff;
}

void LinearProgram::set_bounds(int col, double lb, double ub) {
    if (lb > ub) throw SchemaError("lb > ub on column " + column_name(col));
    lb_[static_cast<std::size_t>(col)] = lb;
    ub_[static_cast<std::size_t>(col)] = ub;
}

std::pair<std::span<const int>, std::span<const double>> LinearProgram::row_entries(int row) const {
    const Row& r = rows_[static_cast<std::size_t>(row)];
    return {std::span<const int>(row_cols_.data() + r.start, r.len),
            std::span<const double>(row_vals_.data() + r.start, r.len)};
}

double LinearProgram::row_activity(int row, std::span<const double> x) const {
    auto [cols, vals] = row_entries(row);
    double a = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i)
        a += vals[i] * x[static_cast<std::size_t>(cols[i])];
    return a;
}

void LinearProgram::dump(std::ostream& os) const {
    os << "columns " << num_columns() << " rows " << num_rows() << " nnz " << num_nonzeros() << "\n";
    for (int j = 0; j < num_columns(); ++j) {
        os << "col " << j << " " << column_name(j) << " [" << lower(j) << ", " << upper(j)
           << "] obj " << objective(j) << "\n";
    }
    for (int i = 0; i < num_rows(); ++i) {
        os << "row " << i << " " << row_name(i) << ":";
        auto [cols, vals] = row_entries(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            os << " " << vals[k] << "*c" << cols[k];
        const char* rel = row_sense(i) == Sense::LE ? "<=" : (row_sense(i) == Sense::EQ ? "=" : ">=");
        os << " " << rel << " " << row_rhs(i) << "\n";
    }
}

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration_limit";
    }
    return "?";
}

ViolationReport check_point(const LinearProgram& lp, std::span<const double> x) {
    if (static_cast<int>(x.size()) != lp.num_columns())
        throw SchemaError("point dimension " + std::to_string(x.size()) + " does not match " +
                          std::to_string(lp.num_columns()) + " columns");
    ViolationReport rep;
    for (int j = 0; j < lp.num_columns(); ++j) {
        const double v = x[static_cast<std::size_t>(j)];
        const double viol = std::max(lp.lower(j) - v, v - lp.upper(j));
        if (viol > rep.max_bound_violation) {
            rep.max_bound_violation = viol;
            rep.bound_column = lp.column_name(j);
        }
    }
    for (int i = 0; i < lp.num_rows(); ++i) {
        const double a = lp.row_activity(i, x);
        const double rhs = lp.row_rhs(i);
        double viol = 0.0;
        switch (lp.row_sense(i)) {
            case Sense::LE: viol = a - rhs; break;
            case Sense::GE: viol = rhs - a; break;
            case Sense::EQ: viol = std::abs(a - rhs); break;
        }
        if (viol > rep.max_row_violation) {
            rep.max_row_violation = viol;
            rep.max_row_relative = viol / std::max(1.0, std::abs(rhs));
            rep.row_name = lp.row_name(i);
        }
    }
    return rep;
}

}  // namespace h2plan
