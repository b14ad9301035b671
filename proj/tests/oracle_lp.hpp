#pragma once

// Test-only reference machinery, kept independent of the production solver:
//  - a dense two-phase tableau simplex with Bland's rule (free variables are
//    split, finite upper bounds become explicit rows),
//  - exhaustive basis enumeration for tiny programs without upper bounds.
// The two agree with each other and pin down the production simplex.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "h2plan/lp.hpp"

namespace oracle {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

namespace detail {

// min c'x s.t. Ax = b, x >= 0 solved on a dense tableau with Bland's rule.
struct Tableau {
    int m, n;
    std::vector<std::vector<double>> a;  // m rows of n cols
    std::vector<double> b;
    std::vector<double> c;

    Result solve() const {
        const int total = n + m;  // structural + artificial
        std::vector<std::vector<double>> t(static_cast<std::size_t>(m),
                                           std::vector<double>(static_cast<std::size_t>(total + 1), 0.0));
        std::vector<int> basis(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const double sign = b[static_cast<std::size_t>(i)] >= 0.0 ? 1.0 : -1.0;
            for (int j = 0; j < n; ++j)
                t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    sign * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            t[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + i)] = 1.0;
            t[static_cast<std::size_t>(i)][static_cast<std::size_t>(total)] =
                sign * b[static_cast<std::size_t>(i)];
            basis[static_cast<std::size_t>(i)] = n + i;
        }

        auto pivot = [&](int row, int col) {
            auto& pr = t[static_cast<std::size_t>(row)];
            const double pv = pr[static_cast<std::size_t>(col)];
            for (double& v : pr) v /= pv;
            for (int i = 0; i < m; ++i) {
                if (i == row) continue;
                auto& ri = t[static_cast<std::size_t>(i)];
                const double f = ri[static_cast<std::size_t>(col)];
                if (f == 0.0) continue;
                for (int j = 0; j <= total; ++j)
                    ri[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
            }
            basis[static_cast<std::size_t>(row)] = col;
        };

        auto run_phase = [&](const std::vector<double>& cost, int allowed_cols) -> bool {
            // returns false on unbounded
            for (int guard = 0; guard < 200000; ++guard) {
                // reduced costs via explicit basis costs
                int enter = -1;
                for (int j = 0; j < allowed_cols; ++j) {
                    bool in_basis = false;
                    for (int i = 0; i < m; ++i)
                        if (basis[static_cast<std::size_t>(i)] == j) in_basis = true;
                    if (in_basis) continue;
                    double d = j < static_cast<int>(cost.size()) ? cost[static_cast<std::size_t>(j)] : 0.0;
                    for (int i = 0; i < m; ++i) {
                        const int bj = basis[static_cast<std::size_t>(i)];
                        const double cb =
                            bj < static_cast<int>(cost.size()) ? cost[static_cast<std::size_t>(bj)] : 0.0;
                        d -= cb * t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                    }
                    if (d < -1e-9) {
                        enter = j;  // Bland: first improving index
                        break;
                    }
                }
                if (enter < 0) return true;
                int leave = -1;
                double best = kInf;
                for (int i = 0; i < m; ++i) {
                    const double aij = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
                    if (aij <= 1e-11) continue;
                    const double ratio =
                        t[static_cast<std::size_t>(i)][static_cast<std::size_t>(total)] / aij;
                    if (ratio < best - 1e-12 ||
                        (ratio < best + 1e-12 &&
                         (leave < 0 || basis[static_cast<std::size_t>(i)] <
                                           basis[static_cast<std::size_t>(leave)])))
                    {
                        best = ratio;
                        leave = i;
                    }
                }
                if (leave < 0) return false;
                pivot(leave, enter);
            }
            return true;
        };

        // phase 1: minimise the artificial sum
        std::vector<double> phase1(static_cast<std::size_t>(total), 0.0);
        for (int j = n; j < total; ++j) phase1[static_cast<std::size_t>(j)] = 1.0;
        run_phase(phase1, total);
        double infeas = 0.0;
        for (int i = 0; i < m; ++i)
            if (basis[static_cast<std::size_t>(i)] >= n)
                infeas += t[static_cast<std::size_t>(i)][static_cast<std::size_t>(total)];
        Result r;
        if (infeas > 1e-7) {
            r.status = Status::Infeasible;
            return r;
        }
        // drive remaining artificials out where possible
        for (int i = 0; i < m; ++i) {
            if (basis[static_cast<std::size_t>(i)] < n) continue;
            for (int j = 0; j < n; ++j) {
                if (std::abs(t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > 1e-9) {
                    pivot(i, j);
                    break;
                }
            }
        }

        if (!run_phase(c, n)) {
            r.status = Status::Unbounded;
            return r;
        }
        r.status = Status::Optimal;
        r.x.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < m; ++i)
            if (basis[static_cast<std::size_t>(i)] < n)
                r.x[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] =
                    t[static_cast<std::size_t>(i)][static_cast<std::size_t>(total)];
        r.objective = 0.0;
        for (int j = 0; j < n; ++j) r.objective += c[static_cast<std::size_t>(j)] * r.x[static_cast<std::size_t>(j)];
        return r;
    }
};

}  // namespace detail

/// Dense reference solve of a LinearProgram. Free variables split into
/// positive and negative parts; finite bounds become explicit rows.
inline Result reference_solve(const h2plan::LinearProgram& lp) {
    const int n0 = lp.num_columns();

    // column j maps to shifted non-negative variable(s)
    struct ColMap {
        int plus = -1, minus = -1;  // minus >= 0 only for free columns
        double shift = 0.0;         // x = shift + x_plus - x_minus
    };
    std::vector<ColMap> map(static_cast<std::size_t>(n0));
    int n = 0;
    for (int j = 0; j < n0; ++j) {
        auto& cm = map[static_cast<std::size_t>(j)];
        if (lp.lower(j) == -kInf && lp.upper(j) == kInf) {
            cm.plus = n++;
            cm.minus = n++;
        } else if (lp.lower(j) == -kInf) {
            // mirror onto a lower-bounded variable: x = ub - x'
            cm.plus = n++;
            cm.shift = lp.upper(j);
        } else {
            cm.plus = n++;
            cm.shift = lp.lower(j);
        }
    }

    auto accumulate = [&](std::vector<double>& dense, int col, double coeff) {
        const auto& cm = map[static_cast<std::size_t>(col)];
        const bool mirrored = lp.lower(col) == -kInf && lp.upper(col) != kInf;
        dense[static_cast<std::size_t>(cm.plus)] += mirrored ? -coeff : coeff;
        if (cm.minus >= 0) dense[static_cast<std::size_t>(cm.minus)] -= coeff;
    };
    auto shift_of = [&](int col, double coeff) {
        return coeff * map[static_cast<std::size_t>(col)].shift;
    };

    // structural rows, with slack variables appended on the fly
    std::vector<std::vector<double>> pending;  // rows before slack columns are known
    std::vector<double> pending_rhs;
    std::vector<int> pending_sense;  // -1 le, 0 eq, +1 ge
    for (int i = 0; i < lp.num_rows(); ++i) {
        std::vector<double> dense(static_cast<std::size_t>(n), 0.0);
        double v = lp.row_rhs(i);
        auto [cols, vals] = lp.row_entries(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            accumulate(dense, cols[k], vals[k]);
            v -= shift_of(cols[k], vals[k]);
        }
        pending.push_back(std::move(dense));
        pending_rhs.push_back(v);
        pending_sense.push_back(lp.row_sense(i) == h2plan::Sense::LE
                                    ? -1
                                    : (lp.row_sense(i) == h2plan::Sense::GE ? 1 : 0));
    }
    // finite-range columns add an upper-bound row: x_plus <= range
    for (int j = 0; j < n0; ++j) {
        const double lo = lp.lower(j), hi = lp.upper(j);
        if (lo == -kInf || hi == kInf) continue;
        std::vector<double> dense(static_cast<std::size_t>(n), 0.0);
        dense[static_cast<std::size_t>(map[static_cast<std::size_t>(j)].plus)] = 1.0;
        pending.push_back(std::move(dense));
        pending_rhs.push_back(hi - lo);
        pending_sense.push_back(-1);
    }

    int slacks = 0;
    for (int s : pending_sense)
        if (s != 0) ++slacks;
    const int total = n + slacks;
    detail::Tableau tab;
    tab.m = static_cast<int>(pending.size());
    tab.n = total;
    tab.b = pending_rhs;
    tab.a.assign(static_cast<std::size_t>(tab.m), std::vector<double>(static_cast<std::size_t>(total), 0.0));
    int slack_at = n;
    for (int i = 0; i < tab.m; ++i) {
        auto& dense = pending[static_cast<std::size_t>(i)];
        std::copy(dense.begin(), dense.end(), tab.a[static_cast<std::size_t>(i)].begin());
        if (pending_sense[static_cast<std::size_t>(i)] != 0)
            tab.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(slack_at++)] =
                pending_sense[static_cast<std::size_t>(i)] == -1 ? 1.0 : -1.0;
    }
    tab.c.assign(static_cast<std::size_t>(total), 0.0);
    double const_term = 0.0;
    for (int j = 0; j < n0; ++j) {
        const double coeff = lp.objective(j);
        if (coeff == 0.0) continue;
        const auto& cm = map[static_cast<std::size_t>(j)];
        const bool mirrored = lp.lower(j) == -kInf && lp.upper(j) != kInf;
        tab.c[static_cast<std::size_t>(cm.plus)] += mirrored ? -coeff : coeff;
        if (cm.minus >= 0) tab.c[static_cast<std::size_t>(cm.minus)] -= coeff;
        const_term += coeff * cm.shift;
    }

    const Result inner = tab.solve();
    Result out;
    out.status = inner.status;
    if (inner.status != Status::Optimal) return out;
    out.x.assign(static_cast<std::size_t>(n0), 0.0);
    for (int j = 0; j < n0; ++j) {
        const auto& cm = map[static_cast<std::size_t>(j)];
        const bool mirrored = lp.lower(j) == -kInf && lp.upper(j) != kInf;
        double v = cm.shift;
        const double plus = inner.x[static_cast<std::size_t>(cm.plus)];
        v += mirrored ? -plus : plus;
        if (cm.minus >= 0) v -= inner.x[static_cast<std::size_t>(cm.minus)];
        out.x[static_cast<std::size_t>(j)] = v;
    }
    out.objective = inner.objective + const_term;
    return out;
}

/// Exhaustive optimum over all basic solutions of min c'x, Ax = b (rows of the
/// LinearProgram must all be equalities), 0 <= x, no finite upper bounds.
/// Feasible only for very small programs.
inline std::optional<double> enumerate_vertices(const h2plan::LinearProgram& lp) {
    const int n = lp.num_columns();
    const int m = lp.num_rows();
    for (int j = 0; j < n; ++j)
        if (lp.lower(j) != 0.0 || lp.upper(j) != kInf) return std::nullopt;
    for (int i = 0; i < m; ++i)
        if (lp.row_sense(i) != h2plan::Sense::EQ) return std::nullopt;
    if (m > n || n > 24) return std::nullopt;

    std::vector<std::vector<double>> a(static_cast<std::size_t>(m),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < m; ++i) {
        auto [cols, vals] = lp.row_entries(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols[k])] = vals[k];
    }

    double best = kInf;
    // iterate all m-subsets of columns
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        // solve A_B x_B = b densely with partial pivoting
        std::vector<std::vector<double>> mtx(static_cast<std::size_t>(m),
                                             std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
        for (int i = 0; i < m; ++i) {
            for (int k = 0; k < m; ++k)
                mtx[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
            mtx[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] = lp.row_rhs(i);
        }
        bool singular = false;
        for (int col = 0; col < m && !singular; ++col) {
            int piv = col;
            for (int r = col + 1; r < m; ++r)
                if (std::abs(mtx[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                    std::abs(mtx[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
                    piv = r;
            if (std::abs(mtx[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]) < 1e-11) {
                singular = true;
                break;
            }
            std::swap(mtx[static_cast<std::size_t>(piv)], mtx[static_cast<std::size_t>(col)]);
            for (int r = 0; r < m; ++r) {
                if (r == col) continue;
                const double f = mtx[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                                 mtx[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
                if (f == 0.0) continue;
                for (int k = col; k <= m; ++k)
                    mtx[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -=
                        f * mtx[static_cast<std::size_t>(col)][static_cast<std::size_t>(k)];
            }
        }
        if (!singular) {
            bool feasible = true;
            double obj = 0.0;
            for (int k = 0; k < m; ++k) {
                const double v = mtx[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] /
                                 mtx[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
                if (v < -1e-9) {
                    feasible = false;
                    break;
                }
                obj += lp.objective(idx[static_cast<std::size_t>(k)]) * v;
            }
            if (feasible) best = std::min(best, obj);
        }
        // next combination
        int pos = m - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - m + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int k = pos + 1; k < m; ++k)
            idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
    }
    if (best == kInf) return std::nullopt;
    return best;
}

}  // namespace oracle
