// Bounded-variable two-phase revised simplex.
//
// The factorized basis is kept as an Eigen SparseLU plus a file of eta
// updates; the basis is refactorized periodically and before the final
// extraction. All pivot choices use fixed tie-breaking so a given LP always
// produces the same solution bytes.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <vector>

#include "h2plan/lp.hpp"

namespace h2plan {

namespace {

enum class VStat : std::uint8_t { AtLower, AtUpper, FreeZero, Basic };

struct Eta {
    int pivot_row;
    double pivot_value;
    std::vector<std::pair<int, double>> entries;  // non-pivot rows of the update column
};

struct Csc {
    std::vector<std::size_t> start;  // size ncols+1
    std::vector<int> row;
    std::vector<double> val;

    int ncols() const { return static_cast<int>(start.size()) - 1; }
};

constexpr double kPivotTol = 1e-8;
constexpr double kDualTol = 1e-9;
constexpr double kRatioTie = 1e-10;
constexpr int kRefactorInterval = 100;
constexpr int kStallLimit = 200;

double round_pow2(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
    return std::exp2(std::round(std::log2(s)));
}

class Simplex {
public:
    Simplex(const LinearProgram& lp, const SolverOptions& opts) : lp_(lp), opts_(opts) {}

    Solution run();

private:
    const LinearProgram& lp_;
    const SolverOptions& opts_;

    int m_ = 0;        // rows
    int nstruct_ = 0;  // structural columns
    int ncols_ = 0;    // structural + slack + artificial
    Csc A_;
    std::vector<double> b_;
    std::vector<double> lb_, ub_;
    std::vector<double> cost_;       // active phase costs
    std::vector<double> real_cost_;  // scaled, normalized phase-2 costs
    std::vector<double> row_scale_, col_scale_;

    std::vector<int> basic_;
    std::vector<VStat> vstat_;
    std::vector<double> xval_;

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;
    SolveStats stats_;
    bool bland_ = false;
    int stall_count_ = 0;

    void build_working_problem();
    void scale_problem();
    void add_artificials();
    void refactorize();
    void recompute_basics();
    void ftran(std::vector<double>& v);
    void btran(std::vector<double>& v);
    void column_of(int j, std::vector<double>& out) const;  // dense copy of column j
    double dot_column(int j, const std::vector<double>& y) const;

    // One simplex phase; returns Optimal / Unbounded / IterationLimit.
    SolveStatus iterate(int& iter_budget);

    Solution extract(SolveStatus status);
};

void Simplex::build_working_problem() {
    m_ = lp_.num_rows();
    nstruct_ = lp_.num_columns();
    ncols_ = nstruct_ + m_;

    // column counts from the row-major source
    std::vector<std::size_t> count(static_cast<std::size_t>(ncols_), 0);
    for (int i = 0; i < m_; ++i) {
        auto [cols, vals] = lp_.row_entries(i);
        for (int c : cols) ++count[static_cast<std::size_t>(c)];
    }
    for (int i = 0; i < m_; ++i) ++count[static_cast<std::size_t>(nstruct_ + i)];  // slack

    A_.start.assign(static_cast<std::size_t>(ncols_) + 1, 0);
    for (int j = 0; j < ncols_; ++j)
        A_.start[static_cast<std::size_t>(j + 1)] = A_.start[static_cast<std::size_t>(j)] + count[static_cast<std::size_t>(j)];
    A_.row.resize(A_.start.back());
    A_.val.resize(A_.start.back());

    std::vector<std::size_t> fill(A_.start.begin(), A_.start.end() - 1);
    for (int i = 0; i < m_; ++i) {
        auto [cols, vals] = lp_.row_entries(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto j = static_cast<std::size_t>(cols[k]);
            A_.row[fill[j]] = i;
            A_.val[fill[j]] = vals[k];
            ++fill[j];
        }
    }
    for (int i = 0; i < m_; ++i) {
        const auto j = static_cast<std::size_t>(nstruct_ + i);
        A_.row[fill[j]] = i;
        A_.val[fill[j]] = 1.0;
        ++fill[j];
    }

    b_.resize(static_cast<std::size_t>(m_));
    lb_.resize(static_cast<std::size_t>(ncols_));
    ub_.resize(static_cast<std::size_t>(ncols_));
    real_cost_.assign(static_cast<std::size_t>(ncols_), 0.0);
    for (int j = 0; j < nstruct_; ++j) {
        lb_[static_cast<std::size_t>(j)] = lp_.lower(j);
        ub_[static_cast<std::size_t>(j)] = lp_.upper(j);
        real_cost_[static_cast<std::size_t>(j)] = lp_.objective(j);
    }
    for (int i = 0; i < m_; ++i) {
        b_[static_cast<std::size_t>(i)] = lp_.row_rhs(i);
        const auto j = static_cast<std::size_t>(nstruct_ + i);
        switch (lp_.row_sense(i)) {
            case Sense::LE:
                lb_[j] = 0.0;
                ub_[j] = kInf;
                break;
            case Sense::GE:
                lb_[j] = -kInf;
                ub_[j] = 0.0;
                break;
            case Sense::EQ:
                lb_[j] = 0.0;
                ub_[j] = 0.0;
                break;
        }
    }
}

void Simplex::scale_problem() {
    row_scale_.assign(static_cast<std::size_t>(m_), 1.0);
    col_scale_.assign(static_cast<std::size_t>(ncols_), 1.0);
    if (opts_.scale) {
        // two rounds of geometric-mean equilibration on the structural part,
        // factors rounded to powers of two so scaling is exact
        const std::size_t struct_nnz = A_.start[static_cast<std::size_t>(nstruct_)];
        for (int round = 0; round < 2; ++round) {
            std::vector<double> rmax(static_cast<std::size_t>(m_), 0.0), rmin(static_cast<std::size_t>(m_), kInf);
            for (std::size_t k = 0; k < struct_nnz; ++k) {
                const double a = std::abs(A_.val[k]);
                if (a == 0.0) continue;
                auto i = static_cast<std::size_t>(A_.row[k]);
                rmax[i] = std::max(rmax[i], a);
                rmin[i] = std::min(rmin[i], a);
            }
            std::vector<double> rfac(static_cast<std::size_t>(m_), 1.0);
            for (int i = 0; i < m_; ++i) {
                const auto is = static_cast<std::size_t>(i);
                if (rmax[is] == 0.0) continue;
                rfac[is] = round_pow2(1.0 / std::sqrt(rmax[is] * rmin[is]));
                row_scale_[is] *= rfac[is];
            }
            for (std::size_t k = 0; k < struct_nnz; ++k)
                A_.val[k] *= rfac[static_cast<std::size_t>(A_.row[k])];
            for (int j = 0; j < nstruct_; ++j) {
                double cmax = 0.0, cmin = kInf;
                for (std::size_t k = A_.start[static_cast<std::size_t>(j)]; k < A_.start[static_cast<std::size_t>(j + 1)]; ++k) {
                    const double a = std::abs(A_.val[k]);
                    if (a == 0.0) continue;
                    cmax = std::max(cmax, a);
                    cmin = std::min(cmin, a);
                }
                if (cmax == 0.0) continue;
                const double s = round_pow2(1.0 / std::sqrt(cmax * cmin));
                if (s == 1.0) continue;
                col_scale_[static_cast<std::size_t>(j)] *= s;
                for (std::size_t k = A_.start[static_cast<std::size_t>(j)]; k < A_.start[static_cast<std::size_t>(j + 1)]; ++k)
                    A_.val[k] *= s;
            }
        }
    }
    // slacks keep unit coefficients: their column scale is 1/row_scale
    for (int i = 0; i < m_; ++i)
        col_scale_[static_cast<std::size_t>(nstruct_ + i)] = 1.0 / row_scale_[static_cast<std::size_t>(i)];

    for (int i = 0; i < m_; ++i) b_[static_cast<std::size_t>(i)] *= row_scale_[static_cast<std::size_t>(i)];
    for (int j = 0; j < ncols_; ++j) {
        const double c = col_scale_[static_cast<std::size_t>(j)];
        if (lb_[static_cast<std::size_t>(j)] != -kInf) lb_[static_cast<std::size_t>(j)] /= c;
        if (ub_[static_cast<std::size_t>(j)] != kInf) ub_[static_cast<std::size_t>(j)] /= c;
        real_cost_[static_cast<std::size_t>(j)] *= c;
    }
    // normalize the cost vector so dual tolerances are scale free
    double cnorm = 0.0;
    for (double c : real_cost_) cnorm = std::max(cnorm, std::abs(c));
    if (cnorm > 0.0) {
        const double s = round_pow2(1.0 / cnorm);
        for (double& c : real_cost_) c *= s;
    }
}

void Simplex::add_artificials() {
    vstat_.assign(static_cast<std::size_t>(ncols_), VStat::AtLower);
    xval_.assign(static_cast<std::size_t>(ncols_), 0.0);
    for (int j = 0; j < ncols_; ++j) {
        const double l = lb_[static_cast<std::size_t>(j)], u = ub_[static_cast<std::size_t>(j)];
        if (l != -kInf) {
            vstat_[static_cast<std::size_t>(j)] = VStat::AtLower;
            xval_[static_cast<std::size_t>(j)] = l;
        } else if (u != kInf) {
            vstat_[static_cast<std::size_t>(j)] = VStat::AtUpper;
            xval_[static_cast<std::size_t>(j)] = u;
        } else {
            vstat_[static_cast<std::size_t>(j)] = VStat::FreeZero;
            xval_[static_cast<std::size_t>(j)] = 0.0;
        }
    }

    // residual of each row at the starting point (structural part only;
    // slacks are handled row by row below)
    std::vector<double> act(static_cast<std::size_t>(m_), 0.0);
    for (int j = 0; j < nstruct_; ++j) {
        const double x = xval_[static_cast<std::size_t>(j)];
        if (x == 0.0) continue;
        for (std::size_t k = A_.start[static_cast<std::size_t>(j)]; k < A_.start[static_cast<std::size_t>(j + 1)]; ++k)
            act[static_cast<std::size_t>(A_.row[k])] += A_.val[k] * x;
    }

    basic_.assign(static_cast<std::size_t>(m_), -1);
    cost_.assign(static_cast<std::size_t>(ncols_), 0.0);
    for (int i = 0; i < m_; ++i) {
        const auto sj = static_cast<std::size_t>(nstruct_ + i);
        const double needed = b_[static_cast<std::size_t>(i)] - act[static_cast<std::size_t>(i)];
        if (needed >= lb_[sj] && needed <= ub_[sj]) {
            basic_[static_cast<std::size_t>(i)] = nstruct_ + i;
            vstat_[sj] = VStat::Basic;
            xval_[sj] = needed;
            continue;
        }
        // slack rests at the bound nearest the requirement; an artificial
        // with unit cost closes the remaining gap
        const double snb = needed < lb_[sj] ? lb_[sj] : ub_[sj];
        vstat_[sj] = snb == lb_[sj] ? VStat::AtLower : VStat::AtUpper;
        xval_[sj] = snb;
        const double resid = needed - snb;

        const int aj = ncols_;
        A_.start.push_back(A_.start.back() + 1);
        A_.row.push_back(i);
        A_.val.push_back(resid >= 0.0 ? 1.0 : -1.0);
        lb_.push_back(0.0);
        ub_.push_back(kInf);
        real_cost_.push_back(0.0);
        col_scale_.push_back(1.0);
        cost_.push_back(1.0);
        vstat_.push_back(VStat::Basic);
        xval_.push_back(std::abs(resid));
        basic_[static_cast<std::size_t>(i)] = aj;
        ++ncols_;
    }
    cost_.resize(static_cast<std::size_t>(ncols_), 1.0);
}

void Simplex::refactorize() {
    if (m_ == 0) {
        etas_.clear();
        ++stats_.refactorizations;
        return;
    }
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < m_; ++i) {
        const int j = basic_[static_cast<std::size_t>(i)];
        for (std::size_t k = A_.start[static_cast<std::size_t>(j)]; k < A_.start[static_cast<std::size_t>(j + 1)]; ++k)
            trips.emplace_back(A_.row[k], i, A_.val[k]);
    }
    Eigen::SparseMatrix<double> B(m_, m_);
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    lu_.compute(B);
    if (lu_.info() != Eigen::Success) throw SolverError("basis factorization failed");
    etas_.clear();
    ++stats_.refactorizations;
}

void Simplex::recompute_basics() {
    std::vector<double> rhs(b_);
    for (int j = 0; j < ncols_; ++j) {
        if (vstat_[static_cast<std::size_t>(j)] == VStat::Basic) continue;
        const double x = xval_[static_cast<std::size_t>(j)];
        if (x == 0.0) continue;
        for (std::size_t k = A_.start[static_cast<std::size_t>(j)]; k < A_.start[static_cast<std::size_t>(j + 1)]; ++k)
            rhs[static_cast<std::size_t>(A_.row[k])] -= A_.val[k] * x;
    }
    ftran(rhs);
    for (int i = 0; i < m_; ++i) xval_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])] = rhs[static_cast<std::size_t>(i)];
}

void Simplex::ftran(std::vector<double>& v) {
    if (m_ == 0) return;
    Eigen::Map<Eigen::VectorXd> mv(v.data(), m_);
    Eigen::VectorXd out = lu_.solve(mv);
    mv = out;
    for (const Eta& e : etas_) {
        const double t = v[static_cast<std::size_t>(e.pivot_row)] / e.pivot_value;
        if (t != 0.0)
            for (const auto& [i, a] : e.entries) v[static_cast<std::size_t>(i)] -= a * t;
        v[static_cast<std::size_t>(e.pivot_row)] = t;
    }
}

void Simplex::btran(std::vector<double>& v) {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double s = v[static_cast<std::size_t>(it->pivot_row)];
        for (const auto& [i, a] : it->entries) s -= a * v[static_cast<std::size_t>(i)];
        v[static_cast<std::size_t>(it->pivot_row)] = s / it->pivot_value;
    }
    Eigen::Map<Eigen::VectorXd> mv(v.data(), m_);
    Eigen::VectorXd out = lu_.transpose().solve(mv);
    mv = out;
}

void Simplex::column_of(int j, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(m_), 0.0);
    for (std::size_t k = A_.start[static_cast<std::size_t>(j)]; k < A_.start[static_cast<std::size_t>(j + 1)]; ++k)
        out[static_cast<std::size_t>(A_.row[k])] = A_.val[k];
}

double Simplex::dot_column(int j, const std::vector<double>& y) const {
    double d = 0.0;
    for (std::size_t k = A_.start[static_cast<std::size_t>(j)]; k < A_.start[static_cast<std::size_t>(j + 1)]; ++k)
        d += A_.val[k] * y[static_cast<std::size_t>(A_.row[k])];
    return d;
}

SolveStatus Simplex::iterate(int& iter_budget) {
    std::vector<double> y(static_cast<std::size_t>(m_));
    std::vector<double> w;

    while (true) {
        if (iter_budget <= 0) return SolveStatus::IterationLimit;
        if (static_cast<int>(etas_.size()) >= kRefactorInterval) {
            refactorize();
            recompute_basics();
        }

        // duals: y = B^-T c_B
        for (int i = 0; i < m_; ++i)
            y[static_cast<std::size_t>(i)] = cost_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])];
        btran(y);

        // pricing
        int enter = -1;
        int dir = +1;
        double best = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            const auto js = static_cast<std::size_t>(j);
            const VStat st = vstat_[js];
            if (st == VStat::Basic) continue;
            if (lb_[js] == ub_[js]) continue;  // fixed
            const double d = cost_[js] - dot_column(j, y);
            int cand_dir = 0;
            if (st == VStat::AtLower && d < -kDualTol)
                cand_dir = +1;
            else if (st == VStat::AtUpper && d > kDualTol)
                cand_dir = -1;
            else if (st == VStat::FreeZero && std::abs(d) > kDualTol)
                cand_dir = d < 0.0 ? +1 : -1;
            if (cand_dir == 0) continue;
            if (bland_) {
                enter = j;
                dir = cand_dir;
                break;
            }
            const double score = std::abs(d);
            if (score > best + 1e-15) {
                best = score;
                enter = j;
                dir = cand_dir;
            }
        }
        if (enter < 0) return SolveStatus::Optimal;

        const auto es = static_cast<std::size_t>(enter);
        w.resize(static_cast<std::size_t>(m_));
        column_of(enter, w);
        ftran(w);

        // ratio test: entering moves by t*dir, basics move by -dir*t*w
        double t_own = kInf;
        if (lb_[es] != -kInf && ub_[es] != kInf) t_own = ub_[es] - lb_[es];

        double t_min = t_own;
        for (int i = 0; i < m_; ++i) {
            const double wi = w[static_cast<std::size_t>(i)];
            if (std::abs(wi) <= kPivotTol) continue;
            const auto bj = static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)]);
            const double delta = dir * wi;
            double t;
            if (delta > 0.0) {
                if (lb_[bj] == -kInf) continue;
                t = (xval_[bj] - lb_[bj]) / delta;
            } else {
                if (ub_[bj] == kInf) continue;
                t = (xval_[bj] - ub_[bj]) / delta;
            }
            t_min = std::min(t_min, std::max(t, 0.0));
        }
        if (t_min == kInf) {
            if (cost_ != real_cost_) throw SolverError("unbounded direction during feasibility phase");
            return SolveStatus::Unbounded;
        }

        int leave = -1;
        double leave_pivot = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double wi = w[static_cast<std::size_t>(i)];
            if (std::abs(wi) <= kPivotTol) continue;
            const auto bj = static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)]);
            const double delta = dir * wi;
            double t;
            if (delta > 0.0) {
                if (lb_[bj] == -kInf) continue;
                t = (xval_[bj] - lb_[bj]) / delta;
            } else {
                if (ub_[bj] == kInf) continue;
                t = (xval_[bj] - ub_[bj]) / delta;
            }
            t = std::max(t, 0.0);
            if (t > t_min + kRatioTie) continue;
            if (bland_) {
                if (leave < 0 || basic_[static_cast<std::size_t>(i)] < basic_[static_cast<std::size_t>(leave)]) {
                    leave = i;
                    leave_pivot = wi;
                }
            } else if (std::abs(wi) > std::abs(leave_pivot) + 1e-15) {
                leave = i;
                leave_pivot = wi;
            }
        }

        --iter_budget;
        ++stats_.iterations;

        if (leave < 0) {
            // entering variable swaps to its opposite bound
            for (int i = 0; i < m_; ++i) {
                const double wi = w[static_cast<std::size_t>(i)];
                if (wi == 0.0) continue;
                xval_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])] -= dir * t_own * wi;
            }
            xval_[es] += dir * t_own;
            vstat_[es] = vstat_[es] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
            stall_count_ = 0;
            continue;
        }

        // basis change
        const double step = t_min;
        for (int i = 0; i < m_; ++i) {
            const double wi = w[static_cast<std::size_t>(i)];
            if (wi == 0.0) continue;
            xval_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])] -= dir * step * wi;
        }
        const auto lj = static_cast<std::size_t>(basic_[static_cast<std::size_t>(leave)]);
        const double delta_leave = dir * leave_pivot;
        // snap the leaving variable onto the bound it reached
        if (delta_leave > 0.0) {
            xval_[lj] = lb_[lj];
            vstat_[lj] = VStat::AtLower;
        } else {
            xval_[lj] = ub_[lj];
            vstat_[lj] = VStat::AtUpper;
        }
        xval_[es] += dir * step;
        vstat_[es] = VStat::Basic;
        basic_[static_cast<std::size_t>(leave)] = enter;

        Eta eta;
        eta.pivot_row = leave;
        eta.pivot_value = w[static_cast<std::size_t>(leave)];
        for (int i = 0; i < m_; ++i) {
            if (i == leave) continue;
            const double wi = w[static_cast<std::size_t>(i)];
            if (wi != 0.0) eta.entries.emplace_back(i, wi);
        }
        etas_.push_back(std::move(eta));

        if (step <= 1e-12) {
            if (++stall_count_ >= kStallLimit) bland_ = true;
        } else {
            stall_count_ = 0;
            bland_ = false;
        }
    }
}

Solution Simplex::extract(SolveStatus status) {
    Solution sol;
    sol.status = status;
    sol.stats = stats_;
    sol.x.resize(static_cast<std::size_t>(nstruct_));
    for (int j = 0; j < nstruct_; ++j)
        sol.x[static_cast<std::size_t>(j)] =
            xval_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)];
    if (status == SolveStatus::Optimal) {
        double obj = 0.0;
        for (int j = 0; j < nstruct_; ++j) obj += lp_.objective(j) * sol.x[static_cast<std::size_t>(j)];
        sol.objective = obj;
    }
    return sol;
}

Solution Simplex::run() {
    build_working_problem();
    scale_problem();
    add_artificials();
    refactorize();
    recompute_basics();

    int budget = opts_.iteration_limit;

    // phase 1: drive the artificial variables to zero
    bool have_artificials = ncols_ > nstruct_ + m_;
    if (have_artificials) {
        const SolveStatus st = iterate(budget);
        stats_.phase1_iterations = stats_.iterations;
        if (st == SolveStatus::IterationLimit) return extract(st);
        double infeas = 0.0;
        for (int j = nstruct_ + m_; j < ncols_; ++j) infeas += xval_[static_cast<std::size_t>(j)];
        if (infeas > opts_.feasibility_tol) return extract(SolveStatus::Infeasible);
        for (int j = nstruct_ + m_; j < ncols_; ++j) ub_[static_cast<std::size_t>(j)] = 0.0;
    }

    cost_ = real_cost_;
    bland_ = false;
    stall_count_ = 0;
    SolveStatus st = iterate(budget);
    if (st == SolveStatus::Optimal) {
        refactorize();
        recompute_basics();
    }
    return extract(st);
}

}  // namespace

Solution solve(const LinearProgram& lp, const SolverOptions& opts) {
    if (lp.num_columns() == 0) throw SchemaError("cannot solve an empty program");
    if (!(opts.feasibility_tol > 0.0) || !(opts.optimality_tol > 0.0))
        throw ConfigError("solver tolerances must be positive");
    Simplex s(lp, opts);
    return s.run();
}

}  // namespace h2plan
