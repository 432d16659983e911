#pragma once

// Dense linear programming:  min c'x  s.t.  A x <= b,  l <= x <= u.
//
// Bounded revised simplex with an explicit dense basis inverse, two phases
// (artificial variables only on rows whose initial slack would be negative),
// Dantzig pricing with a Harris two-pass ratio test, and a switch to Bland's
// rule after a run of degenerate pivots. Intended for the small per-location
// problems of the pricing models (tens of variables).
//
// Duals are reported as non-negative multipliers y of the <= rows, so the
// reduced costs are d = c + A'y.

#include "catpremium/csv.hpp"
#include "catpremium/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace catpremium::lp {

/// Infinite bounds are stored as +/- this sentinel.
inline constexpr double kInfinity = 1e30;

inline bool is_neg_inf(double v) { return v <= -kInfinity; }
inline bool is_pos_inf(double v) { return v >= kInfinity; }

struct Term {
    std::size_t var;
    double coef;
};

struct Row {
    std::string name;
    std::vector<Term> terms;
    double rhs = 0.0;
};

class LinearProgram {
public:
    std::size_t add_variable(std::string name, double lower, double upper, double cost = 0.0) {
        names_.push_back(std::move(name));
        lower_.push_back(std::max(lower, -kInfinity));
        upper_.push_back(std::min(upper, kInfinity));
        cost_.push_back(cost);
        return cost_.size() - 1;
    }

    /// Adds sum(coef * x) <= rhs.
    std::size_t add_row(std::string name, std::vector<Term> terms, double rhs) {
        rows_.push_back({std::move(name), std::move(terms), rhs});
        return rows_.size() - 1;
    }

    void set_cost(std::size_t j, double c) { cost_.at(j) = c; }
    void set_bounds(std::size_t j, double lo, double hi) {
        lower_.at(j) = std::max(lo, -kInfinity);
        upper_.at(j) = std::min(hi, kInfinity);
    }

    std::size_t num_vars() const { return cost_.size(); }
    std::size_t num_rows() const { return rows_.size(); }
    double cost(std::size_t j) const { return cost_[j]; }
    double lower(std::size_t j) const { return lower_[j]; }
    double upper(std::size_t j) const { return upper_[j]; }
    const std::string& var_name(std::size_t j) const { return names_[j]; }
    const Row& row(std::size_t i) const { return rows_[i]; }
    const std::vector<Row>& rows() const { return rows_; }

    double activity(std::size_t i, const std::vector<double>& x) const {
        double s = 0.0;
        for (const auto& t : rows_[i].terms) s += t.coef * x[t.var];
        return s;
    }

    double objective_value(const std::vector<double>& x) const {
        double s = 0.0;
        for (std::size_t j = 0; j < cost_.size(); ++j) s += cost_[j] * x[j];
        return s;
    }

    void validate() const {
        for (std::size_t j = 0; j < num_vars(); ++j) {
            require(std::isfinite(cost_[j]), ErrorKind::numeric, "non-finite cost on " + names_[j]);
            require(lower_[j] <= upper_[j], ErrorKind::numeric, "empty bounds on " + names_[j]);
            require(!is_pos_inf(lower_[j]) && !is_neg_inf(upper_[j]), ErrorKind::numeric,
                    "bound at wrong infinity on " + names_[j]);
        }
        for (const auto& r : rows_) {
            require(std::isfinite(r.rhs) && std::abs(r.rhs) < kInfinity, ErrorKind::numeric,
                    "non-finite rhs on row " + r.name);
            for (const auto& t : r.terms) {
                require(t.var < num_vars(), ErrorKind::numeric, "row " + r.name + " references unknown variable");
                require(std::isfinite(t.coef), ErrorKind::numeric, "non-finite coefficient on row " + r.name);
            }
        }
    }

private:
    std::vector<std::string> names_;
    std::vector<double> lower_, upper_, cost_;
    std::vector<Row> rows_;
};

enum class Status { optimal, infeasible, unbounded, stalled };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::stalled: return "stalled";
    }
    return "?";
}

struct LpSolution {
    Status status = Status::stalled;
    std::vector<double> x;
    double objective = 0.0;
    std::vector<double> duals;          // one per row, >= 0
    std::vector<double> reduced_costs;  // c + A'y
    std::size_t iterations = 0;
};

struct SolveOptions {
    double tol_feas = 1e-7;
    double tol_gap = 1e-6;
    std::size_t max_iter = 0;  // 0 picks a size-based limit
    std::size_t bland_window = 50;
    std::size_t refactor_every = 64;
};

namespace detail {

class Simplex {
public:
    Simplex(const LinearProgram& lp, const SolveOptions& opt) : lp_(lp), opt_(opt) {
        n_ = lp.num_vars();
        m_ = lp.num_rows();
        A_.assign(m_ * n_, 0.0);
        b_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (const auto& t : lp.row(i).terms) A_[i * n_ + t.var] += t.coef;
            b_[i] = lp.row(i).rhs;
        }
        max_iter_ = opt.max_iter ? opt.max_iter : 1000 + 50 * (n_ + m_);
    }

    LpSolution run() {
        initialize();
        const std::size_t n_art = art_row_.size();
        if (n_art > 0) {
            for (std::size_t j = 0; j < ncols_; ++j) cost_[j] = j >= n_ + m_ ? 1.0 : 0.0;
            const Status s = iterate();
            if (s == Status::stalled) return finish(Status::stalled);
            double infeas = 0.0;
            for (std::size_t k = 0; k < n_art; ++k) infeas += std::max(0.0, x_[n_ + m_ + k]);
            double bscale = 1.0;
            for (double v : b_) bscale = std::max(bscale, std::abs(v));
            if (infeas > opt_.tol_feas * bscale) return finish(Status::infeasible);
            drive_out_artificials();
            for (std::size_t k = 0; k < n_art; ++k) {
                const std::size_t j = n_ + m_ + k;
                lo_[j] = up_[j] = 0.0;
                if (state_[j] != kBasic) {
                    state_[j] = kLower;
                    x_[j] = 0.0;
                }
            }
            reinvert();
        }
        for (std::size_t j = 0; j < ncols_; ++j) cost_[j] = j < n_ ? lp_.cost(j) : 0.0;
        return finish(iterate());
    }

private:
    static constexpr int kBasic = 0, kLower = 1, kUpper = 2, kZero = 3;

    void initialize() {
        const std::size_t cap = n_ + 2 * m_;
        lo_.reserve(cap);
        for (std::size_t j = 0; j < n_; ++j) {
            lo_.push_back(lp_.lower(j));
            up_.push_back(lp_.upper(j));
        }
        for (std::size_t i = 0; i < m_; ++i) {
            lo_.push_back(0.0);
            up_.push_back(kInfinity);
        }
        x_.assign(n_ + m_, 0.0);
        state_.assign(n_ + m_, kLower);
        for (std::size_t j = 0; j < n_; ++j) {
            if (!is_neg_inf(lo_[j])) {
                x_[j] = lo_[j];
                state_[j] = kLower;
            } else if (!is_pos_inf(up_[j])) {
                x_[j] = up_[j];
                state_[j] = kUpper;
            } else {
                x_[j] = 0.0;
                state_[j] = kZero;
            }
        }
        basis_.assign(m_, 0);
        for (std::size_t i = 0; i < m_; ++i) {
            double r = b_[i];
            for (std::size_t j = 0; j < n_; ++j) r -= A_[i * n_ + j] * x_[j];
            if (r >= 0.0) {
                basis_[i] = n_ + i;
                state_[n_ + i] = kBasic;
                x_[n_ + i] = r;
            } else {
                art_row_.push_back(i);
                lo_.push_back(0.0);
                up_.push_back(kInfinity);
                x_.push_back(-r);
                state_.push_back(kBasic);
                basis_[i] = n_ + m_ + art_row_.size() - 1;
                x_[n_ + i] = 0.0;
                state_[n_ + i] = kLower;
            }
        }
        ncols_ = x_.size();
        cost_.assign(ncols_, 0.0);
        reinvert();
    }

    // dense column of the extended matrix [A I -E]
    void column(std::size_t j, std::vector<double>& out) const {
        out.assign(m_, 0.0);
        if (j < n_) {
            for (std::size_t i = 0; i < m_; ++i) out[i] = A_[i * n_ + j];
        } else if (j < n_ + m_) {
            out[j - n_] = 1.0;
        } else {
            out[art_row_[j - n_ - m_]] = -1.0;
        }
    }

    double dot_column(const std::vector<double>& v, std::size_t j) const {
        if (j < n_) {
            double s = 0.0;
            for (std::size_t i = 0; i < m_; ++i) s += v[i] * A_[i * n_ + j];
            return s;
        }
        if (j < n_ + m_) return v[j - n_];
        return -v[art_row_[j - n_ - m_]];
    }

    // sum |v_i a_ij|: magnitude of the terms behind dot_column
    double abs_dot_column(const std::vector<double>& v, std::size_t j) const {
        if (j < n_) {
            double s = 0.0;
            for (std::size_t i = 0; i < m_; ++i) s += std::abs(v[i] * A_[i * n_ + j]);
            return s;
        }
        if (j < n_ + m_) return std::abs(v[j - n_]);
        return std::abs(v[art_row_[j - n_ - m_]]);
    }

    void reinvert() {
        // Gauss-Jordan on [B | I]
        std::vector<double> B(m_ * m_, 0.0), inv(m_ * m_, 0.0);
        std::vector<double> col;
        for (std::size_t k = 0; k < m_; ++k) {
            column(basis_[k], col);
            for (std::size_t i = 0; i < m_; ++i) B[i * m_ + k] = col[i];
            inv[k * m_ + k] = 1.0;
        }
        for (std::size_t c = 0; c < m_; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < m_; ++r)
                if (std::abs(B[r * m_ + c]) > std::abs(B[piv * m_ + c])) piv = r;
            require(std::abs(B[piv * m_ + c]) > 1e-13, ErrorKind::numeric, "singular simplex basis");
            if (piv != c)
                for (std::size_t k = 0; k < m_; ++k) {
                    std::swap(B[piv * m_ + k], B[c * m_ + k]);
                    std::swap(inv[piv * m_ + k], inv[c * m_ + k]);
                }
            const double d = B[c * m_ + c];
            for (std::size_t k = 0; k < m_; ++k) {
                B[c * m_ + k] /= d;
                inv[c * m_ + k] /= d;
            }
            for (std::size_t r = 0; r < m_; ++r) {
                if (r == c) continue;
                const double f = B[r * m_ + c];
                if (f == 0.0) continue;
                for (std::size_t k = 0; k < m_; ++k) {
                    B[r * m_ + k] -= f * B[c * m_ + k];
                    inv[r * m_ + k] -= f * inv[c * m_ + k];
                }
            }
        }
        Binv_ = std::move(inv);
        // x_B = B^-1 (b - N x_N)
        std::vector<double> r = b_;
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (state_[j] == kBasic || x_[j] == 0.0) continue;
            column(j, col);
            for (std::size_t i = 0; i < m_; ++i) r[i] -= col[i] * x_[j];
        }
        for (std::size_t i = 0; i < m_; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < m_; ++k) s += Binv_[i * m_ + k] * r[k];
            x_[basis_[i]] = s;
        }
    }

    std::vector<double> prices() const {
        std::vector<double> pi(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t k = 0; k < m_; ++k) pi[k] += cb * Binv_[i * m_ + k];
        }
        return pi;
    }

    std::vector<double> ftran(std::size_t j) const {
        std::vector<double> col, out(m_, 0.0);
        column(j, col);
        for (std::size_t i = 0; i < m_; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < m_; ++k) s += Binv_[i * m_ + k] * col[k];
            out[i] = s;
        }
        return out;
    }

    void pivot(std::size_t r, const std::vector<double>& alpha) {
        const double p = alpha[r];
        for (std::size_t k = 0; k < m_; ++k) Binv_[r * m_ + k] /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || alpha[i] == 0.0) continue;
            const double f = alpha[i];
            for (std::size_t k = 0; k < m_; ++k) Binv_[i * m_ + k] -= f * Binv_[r * m_ + k];
        }
    }

    bool fixed(std::size_t j) const { return lo_[j] == up_[j]; }

    Status iterate() {
        constexpr double tol_d = 1e-9;
        constexpr double tol_piv = 1e-9;
        std::size_t since_refactor = 0;
        std::size_t degenerate_run = 0;
        bool bland = false;
        for (;;) {
            if (iterations_ >= max_iter_) return Status::stalled;
            if (since_refactor >= opt_.refactor_every) {
                reinvert();
                since_refactor = 0;
            }
            const auto pi = prices();

            // pricing
            std::size_t q = ncols_;
            int dir = 0;
            double best = 0.0;
            for (std::size_t j = 0; j < ncols_; ++j) {
                if (state_[j] == kBasic || fixed(j)) continue;
                const double d = cost_[j] - dot_column(pi, j);
                // relative to the terms summed, so cancellation noise on badly
                // scaled columns is not mistaken for an improving direction
                const double tol = tol_d * (1.0 + std::abs(cost_[j]) + abs_dot_column(pi, j));
                int jdir = 0;
                if (state_[j] == kLower && d < -tol) jdir = 1;
                else if (state_[j] == kUpper && d > tol) jdir = -1;
                else if (state_[j] == kZero && std::abs(d) > tol) jdir = d < 0 ? 1 : -1;
                if (!jdir) continue;
                if (bland) {
                    q = j;
                    dir = jdir;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = j;
                    dir = jdir;
                }
            }
            if (q == ncols_) return Status::optimal;

            const auto alpha = ftran(q);
            // basic variable i moves by theta * delta[i]
            std::vector<double> delta(m_);
            for (std::size_t i = 0; i < m_; ++i) delta[i] = -dir * alpha[i];

            double flip = kInfinity;
            if (!is_neg_inf(lo_[q]) && !is_pos_inf(up_[q])) flip = up_[q] - lo_[q];

            auto ratio = [&](std::size_t i, double slack_tol) {
                const std::size_t k = basis_[i];
                if (delta[i] < -tol_piv && !is_neg_inf(lo_[k]))
                    return (x_[k] - lo_[k] + slack_tol * (1.0 + std::abs(lo_[k]))) / -delta[i];
                if (delta[i] > tol_piv && !is_pos_inf(up_[k]))
                    return (up_[k] - x_[k] + slack_tol * (1.0 + std::abs(up_[k]))) / delta[i];
                return kInfinity;
            };

            std::size_t leave = m_;
            double theta = kInfinity;
            if (bland) {
                // strict minimum ratio, ties to the lowest variable index
                for (std::size_t i = 0; i < m_; ++i) {
                    const double t = ratio(i, 0.0);
                    if (t >= kInfinity) continue;
                    const double tc = std::max(0.0, t);
                    if (leave == m_ || tc < theta - 1e-12 || (tc <= theta + 1e-12 && basis_[i] < basis_[leave])) {
                        theta = leave == m_ ? tc : std::min(theta, tc);
                        leave = i;
                    }
                }
            } else {
                const double harris_tol = 1e-9;
                double tmax = kInfinity;
                for (std::size_t i = 0; i < m_; ++i) tmax = std::min(tmax, ratio(i, harris_tol));
                double big = 0.0;
                for (std::size_t i = 0; i < m_; ++i) {
                    const double t = ratio(i, 0.0);
                    if (t < kInfinity && t <= tmax && std::abs(delta[i]) > big) {
                        big = std::abs(delta[i]);
                        leave = i;
                        theta = std::max(0.0, t);
                    }
                }
            }

            if (flip < kInfinity && flip <= theta) {
                // bound flip: entering variable crosses to its other bound
                for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] += flip * delta[i];
                x_[q] = dir > 0 ? up_[q] : lo_[q];
                state_[q] = dir > 0 ? kUpper : kLower;
                ++iterations_;
                degenerate_run = 0;
                bland = false;
                continue;
            }
            if (leave == m_) return Status::unbounded;

            for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] += theta * delta[i];
            x_[q] += dir * theta;
            const std::size_t out = basis_[leave];
            if (delta[leave] < 0) {
                x_[out] = lo_[out];
                state_[out] = kLower;
            } else {
                x_[out] = up_[out];
                state_[out] = kUpper;
            }
            basis_[leave] = q;
            state_[q] = kBasic;
            pivot(leave, alpha);
            ++iterations_;
            ++since_refactor;

            if (theta <= 1e-12) {
                if (++degenerate_run >= opt_.bland_window) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_ + m_) continue;
            std::vector<double> rho(Binv_.begin() + static_cast<std::ptrdiff_t>(r * m_),
                                    Binv_.begin() + static_cast<std::ptrdiff_t>((r + 1) * m_));
            std::size_t pick = ncols_;
            double best = 1e-7;
            for (std::size_t j = 0; j < n_ + m_; ++j) {
                if (state_[j] == kBasic) continue;
                const double a = std::abs(dot_column(rho, j));
                if (a > best) {
                    best = a;
                    pick = j;
                }
            }
            if (pick == ncols_) continue;  // redundant row; the artificial stays basic at zero
            const auto alpha = ftran(pick);
            const std::size_t out = basis_[r];
            x_[out] = 0.0;
            state_[out] = kLower;
            basis_[r] = pick;
            state_[pick] = kBasic;
            pivot(r, alpha);
        }
    }

    LpSolution finish(Status s) {
        LpSolution sol;
        sol.status = s;
        sol.iterations = iterations_;
        sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
        if (s == Status::optimal) {
            reinvert();
            sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
            for (std::size_t j = 0; j < n_; ++j) sol.x[j] = std::clamp(sol.x[j], lp_.lower(j), lp_.upper(j));
            const auto pi = prices();
            sol.duals.resize(m_);
            for (std::size_t i = 0; i < m_; ++i) sol.duals[i] = std::max(0.0, -pi[i]);
            sol.reduced_costs.resize(n_);
            for (std::size_t j = 0; j < n_; ++j) {
                double d = lp_.cost(j);
                for (std::size_t i = 0; i < m_; ++i) d += sol.duals[i] * A_[i * n_ + j];
                sol.reduced_costs[j] = d;
            }
            sol.objective = lp_.objective_value(sol.x);
        }
        return sol;
    }

    const LinearProgram& lp_;
    SolveOptions opt_;
    std::size_t n_ = 0, m_ = 0, ncols_ = 0, max_iter_ = 0, iterations_ = 0;
    std::vector<double> A_, b_;
    std::vector<std::size_t> art_row_;
    std::vector<double> lo_, up_, cost_, x_;
    std::vector<int> state_;
    std::vector<std::size_t> basis_;
    std::vector<double> Binv_;
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& opt = {}) {
    lp.validate();
    detail::Simplex simplex(lp, opt);
    return simplex.run();
}

struct CertificateReport {
    double primal_residual = 0.0;   // worst scaled row/bound violation
    double dual_residual = 0.0;     // worst scaled sign violation of y or d
    double complementarity = 0.0;   // worst scaled |y_i * slack_i| or |d_j * distance to bound|
    double gap = 0.0;               // |primal - dual| / (1 + |primal|)
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    bool primal_ok = false;
    bool dual_ok = false;
    bool gap_ok = false;

    bool passed() const { return primal_ok && dual_ok && gap_ok; }
};

/// Independent check of an optimality claim from the problem data alone.
inline CertificateReport check_certificate(const LinearProgram& lp, const LpSolution& sol, double tol_feas = 1e-7,
                                           double tol_gap = 1e-6) {
    CertificateReport rep;
    const std::size_t n = lp.num_vars(), m = lp.num_rows();
    if (sol.x.size() != n || sol.duals.size() != m) return rep;

    double cscale = 1.0;
    for (std::size_t j = 0; j < n; ++j) cscale = std::max(cscale, std::abs(lp.cost(j)));

    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = lp.cost(j);
    for (std::size_t i = 0; i < m; ++i)
        for (const auto& t : lp.row(i).terms) d[t.var] += sol.duals[i] * t.coef;

    double dual_obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double b = lp.row(i).rhs;
        const double slack = b - lp.activity(i, sol.x);
        rep.primal_residual = std::max(rep.primal_residual, std::max(0.0, -slack) / (1.0 + std::abs(b)));
        rep.dual_residual = std::max(rep.dual_residual, std::max(0.0, -sol.duals[i]) / cscale);
        rep.complementarity =
            std::max(rep.complementarity, std::abs(sol.duals[i] * slack) / (1.0 + std::abs(sol.objective)));
        dual_obj -= b * sol.duals[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = lp.lower(j), hi = lp.upper(j), xj = sol.x[j];
        if (!is_neg_inf(lo)) rep.primal_residual = std::max(rep.primal_residual, std::max(0.0, lo - xj) / (1.0 + std::abs(lo)));
        if (!is_pos_inf(hi)) rep.primal_residual = std::max(rep.primal_residual, std::max(0.0, xj - hi) / (1.0 + std::abs(hi)));
        const double dj = d[j];
        if (dj > 0.0) {
            if (is_neg_inf(lo)) {
                rep.dual_residual = std::max(rep.dual_residual, dj / cscale);
            } else {
                dual_obj += dj * lo;
                rep.complementarity = std::max(rep.complementarity, dj * std::abs(xj - lo) / (1.0 + std::abs(sol.objective)));
            }
        } else if (dj < 0.0) {
            if (is_pos_inf(hi)) {
                rep.dual_residual = std::max(rep.dual_residual, -dj / cscale);
            } else {
                dual_obj += dj * hi;
                rep.complementarity = std::max(rep.complementarity, -dj * std::abs(hi - xj) / (1.0 + std::abs(sol.objective)));
            }
        }
    }
    rep.primal_objective = lp.objective_value(sol.x);
    rep.dual_objective = dual_obj;
    rep.gap = std::abs(rep.primal_objective - dual_obj) / (1.0 + std::abs(rep.primal_objective));
    rep.primal_ok = rep.primal_residual <= tol_feas;
    rep.dual_ok = rep.dual_residual <= tol_feas;
    rep.gap_ok = rep.gap <= tol_gap;
    return rep;
}

// ---- text dump ----------------------------------------------------------------
//
//   lp <num_vars> <num_rows>
//   var <name> <lower> <upper> <cost>
//   row <name> <rhs> <nterms> <var>:<coef> ...
//
// Names must not contain whitespace. Infinite bounds are written as the sentinel.

inline std::string to_text(const LinearProgram& lp) {
    std::ostringstream out;
    out << "lp " << lp.num_vars() << ' ' << lp.num_rows() << '\n';
    for (std::size_t j = 0; j < lp.num_vars(); ++j)
        out << "var " << lp.var_name(j) << ' ' << csv::format_number(lp.lower(j)) << ' '
            << csv::format_number(lp.upper(j)) << ' ' << csv::format_number(lp.cost(j)) << '\n';
    for (const auto& r : lp.rows()) {
        out << "row " << r.name << ' ' << csv::format_number(r.rhs) << ' ' << r.terms.size();
        for (const auto& t : r.terms) out << ' ' << t.var << ':' << csv::format_number(t.coef);
        out << '\n';
    }
    return out.str();
}

inline LinearProgram from_text(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    std::size_t nv = 0, nr = 0;
    in >> tag >> nv >> nr;
    require(tag == "lp" && in.good(), ErrorKind::data, "bad LP dump header");
    auto num = [](const std::string& s) {
        auto v = csv::parse_double(s);
        require(v.has_value(), ErrorKind::data, "bad number in LP dump: " + s);
        return *v;
    };
    LinearProgram lp;
    for (std::size_t j = 0; j < nv; ++j) {
        std::string name, lo, hi, c;
        in >> tag >> name >> lo >> hi >> c;
        require(tag == "var", ErrorKind::data, "expected var line in LP dump");
        lp.add_variable(name, num(lo), num(hi), num(c));
    }
    for (std::size_t i = 0; i < nr; ++i) {
        std::string name, rhs;
        std::size_t nt = 0;
        in >> tag >> name >> rhs >> nt;
        require(tag == "row", ErrorKind::data, "expected row line in LP dump");
        std::vector<Term> terms;
        for (std::size_t k = 0; k < nt; ++k) {
            std::string tok;
            in >> tok;
            const auto colon = tok.find(':');
            require(colon != std::string::npos, ErrorKind::data, "bad term in LP dump: " + tok);
            auto var = csv::parse_int(tok.substr(0, colon));
            require(var.has_value() && *var >= 0, ErrorKind::data, "bad term in LP dump: " + tok);
            terms.push_back({static_cast<std::size_t>(*var), num(tok.substr(colon + 1))});
        }
        lp.add_row(name, std::move(terms), num(rhs));
    }
    return lp;
}

}  // namespace catpremium::lp
