#pragma once

// Demand damping, nominal LP pricing with known losses, and closed-form robust
// pricing against the CLT band (RO1) and CLT + ML sets (RO2).
//
// Every robust coverage constraint has the same shape for a flat premium p
// over a horizon h with worst-case loss total L:
//
//     h * f(p) * p - f(p) * L >= delta
//
// f is piecewise linear, so each constraint is a piecewise quadratic in p and
// its roots are available per piece. The smallest p satisfying all constraints
// is found among those breakpoints, with bisection polishing inside a segment.

#include "catpremium/data_ingest.hpp"
#include "catpremium/error.hpp"
#include "catpremium/lp.hpp"
#include "catpremium/schedule.hpp"
#include "catpremium/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace catpremium {

struct DampingCurve {
    Usd onset = 0.0;     // P0: damping starts above this premium
    double rate = 0.0;   // m: fractional demand lost per USD above the onset
    double c_min = 1.0;  // floor on the retained fraction

    static DampingCurve none() { return {}; }

    bool enabled() const { return rate > 0.0 && c_min < 1.0; }

    void validate() const {
        require(onset >= 0.0 && rate >= 0.0, ErrorKind::config, "damping onset and rate must be non-negative");
        require(c_min > 0.0 && c_min <= 1.0, ErrorKind::config, "damping floor c_min must lie in (0, 1]");
    }
};

/// 1 below the onset, then linear decline clamped at c_min.
inline double damping_value(const DampingCurve& curve, double p) {
    if (!curve.enabled() || p <= curve.onset) return 1.0;
    return std::max(curve.c_min, 1.0 - curve.rate * (p - curve.onset));
}

struct CoverageConstraint {
    std::string label;  // e.g. "CLT" or "ML(k=5,theta=1.8e7)"
    int horizon = 1;
    Usd loss_bound = 0.0;
};

struct FlatPrice {
    Usd premium = 0.0;
    std::string binding;         // label of the tight constraint, "none" when p = 0 suffices
    double min_residual = 0.0;   // min over constraints of h f p - f L - delta
};

inline double coverage_residual(const CoverageConstraint& c, double p, double delta, const DampingCurve& curve) {
    const double f = damping_value(curve, p);
    return f * (c.horizon * p - c.loss_bound) - delta;
}

namespace detail {

// Roots of A p^2 + B p + C = 0.
inline void quadratic_roots(double A, double B, double C, std::vector<double>& out) {
    const double scale = std::max({std::abs(A), std::abs(B), std::abs(C)});
    if (scale == 0.0) return;
    if (std::abs(A) <= 1e-14 * std::max(std::abs(B), 1e-300) || A == 0.0) {
        if (B != 0.0) out.push_back(-C / B);
        return;
    }
    const double D = B * B - 4.0 * A * C;
    if (D < 0.0) return;
    const double sq = std::sqrt(D);
    const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
    if (q != 0.0) {
        out.push_back(q / A);
        out.push_back(C / q);
    } else {
        out.push_back(0.0);
    }
}

}  // namespace detail

/// Smallest flat premium in [0, cap] meeting every coverage constraint.
inline FlatPrice smallest_flat_premium(std::span<const CoverageConstraint> cons, double delta,
                                       const DampingCurve& curve, double cap) {
    require(delta >= 0.0, ErrorKind::config, "delta must be non-negative");
    require(cap >= 0.0 && std::isfinite(cap), ErrorKind::config, "premium cap must be finite and non-negative");
    curve.validate();

    double scale = 1.0 + delta;
    for (const auto& c : cons) {
        require(c.horizon >= 1, ErrorKind::config, "constraint horizon must be at least 1");
        require(c.loss_bound >= 0.0 && std::isfinite(c.loss_bound), ErrorKind::data, "loss bound must be finite and >= 0");
        scale += c.loss_bound;
    }
    const double tol = 1e-10 * scale;

    auto worst = [&](double p) {
        double w = std::numeric_limits<double>::infinity();
        for (const auto& c : cons) w = std::min(w, coverage_residual(c, p, delta, curve));
        return cons.empty() ? 0.0 : w;
    };

    // pieces of f as (a, b, lo, hi) with f(p) = a + b p on [lo, hi]
    struct Piece {
        double a, b, lo, hi;
    };
    std::vector<Piece> pieces;
    std::vector<double> cand{0.0, cap};
    if (curve.enabled()) {
        const double p1 = curve.onset + (1.0 - curve.c_min) / curve.rate;
        pieces.push_back({1.0, 0.0, 0.0, curve.onset});
        pieces.push_back({1.0 + curve.rate * curve.onset, -curve.rate, curve.onset, p1});
        pieces.push_back({curve.c_min, 0.0, p1, std::numeric_limits<double>::infinity()});
        cand.push_back(curve.onset);
        cand.push_back(p1);
    } else {
        pieces.push_back({1.0, 0.0, 0.0, std::numeric_limits<double>::infinity()});
    }
    std::vector<double> roots;
    for (const auto& c : cons)
        for (const auto& pc : pieces) {
            roots.clear();
            const double h = c.horizon, L = c.loss_bound;
            detail::quadratic_roots(pc.b * h, pc.a * h - pc.b * L, -(pc.a * L + delta), roots);
            for (double r : roots)
                if (std::isfinite(r) && r >= pc.lo && r <= pc.hi) cand.push_back(r);
        }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::remove_if(cand.begin(), cand.end(), [&](double p) { return p < 0.0 || p > cap; }), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    auto label_at = [&](double p) {
        std::string best = "none";
        double tight = std::numeric_limits<double>::infinity();
        for (const auto& c : cons) {
            const double r = std::abs(coverage_residual(c, p, delta, curve));
            if (r < tight) {
                tight = r;
                best = c.label;
            }
        }
        return (p == 0.0 && worst(0.0) > tol) ? std::string("none") : best;
    };

    for (std::size_t k = 0; k < cand.size(); ++k) {
        const double p = cand[k];
        if (worst(p) >= -tol) return {p, label_at(p), worst(p)};
        if (k + 1 == cand.size()) break;
        const double mid = 0.5 * (p + cand[k + 1]);
        if (worst(mid) >= -tol) {
            double lo = p, hi = mid;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
                const double m = 0.5 * (lo + hi);
                (worst(m) >= -tol ? hi : lo) = m;
            }
            return {hi, label_at(hi), worst(hi)};
        }
    }
    fail(ErrorKind::infeasible, "required revenue unattainable within premium cap " + csv::format_number(cap) +
                                    (curve.enabled() ? " under the damping floor" : ""));
}

/// Bisection bracket: ten times the larger of the required per-year coverage
/// and the historical maximum premium.
inline double default_premium_cap(std::span<const CoverageConstraint> cons, double delta, double hist_max = 0.0) {
    double need = 0.0;
    for (const auto& c : cons) need = std::max(need, (c.loss_bound + delta) / c.horizon);
    return 10.0 * std::max({need, hist_max, 1.0});
}

struct RoParams {
    double gamma1 = 50000.0;
    double gamma2 = 1.0;
    double delta = 10000.0;
    DampingCurve damping;
    /// <= 0 selects default_premium_cap.
    double premium_cap = 0.0;
    double hist_max_premium = 0.0;

    void validate() const {
        require(gamma1 >= 0.0 && gamma2 >= 0.0 && delta >= 0.0, ErrorKind::config, "gamma1, gamma2, delta must be >= 0");
        damping.validate();
    }
};

namespace detail {

inline StateSchedule flat_schedule(const std::string& state, int years, std::span<const CoverageConstraint> cons,
                                   const RoParams& params) {
    const double cap =
        params.premium_cap > 0.0 ? params.premium_cap : default_premium_cap(cons, params.delta, params.hist_max_premium);
    FlatPrice fp;
    try {
        fp = smallest_flat_premium(cons, params.delta, params.damping, cap);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::infeasible) fail(ErrorKind::infeasible, state + ": " + e.what());
        throw;
    }
    StateSchedule s;
    s.state = state;
    s.premium.assign(static_cast<std::size_t>(years), fp.premium);
    s.damped_fraction.assign(static_cast<std::size_t>(years), damping_value(params.damping, fp.premium));
    s.binding = fp.binding;
    s.residual = fp.min_residual;
    return s;
}

}  // namespace detail

/// RO1: flat premium covering the CLT worst case over T years.
inline StateSchedule solve_ro1(const std::string& state, const StateStats& stats, int T, const RoParams& params) {
    params.validate();
    const auto set = clt_bound(stats, T, params.gamma2, state);
    const CoverageConstraint c{"CLT", T, set.upper};
    return detail::flat_schedule(state, T, std::span(&c, 1), params);
}

inline std::string ml_label(const MlSet& s) {
    return "ML(k=" + std::to_string(s.horizon) + ",theta=" + csv::format_number(s.theta) + ")";
}

/// RO2: RO1 plus one coverage constraint per ML forecast set (horizon k <= T).
inline StateSchedule solve_ro2(const std::string& state, const StateStats& stats, std::span<const MlSet> forecasts,
                               int T, const RoParams& params) {
    params.validate();
    const auto set = clt_bound(stats, T, params.gamma2, state);
    std::vector<CoverageConstraint> cons{{"CLT", T, set.upper}};
    for (const auto& f : forecasts) {
        require(f.horizon <= T, ErrorKind::config,
                state + ": forecast horizon " + std::to_string(f.horizon) + " exceeds pricing horizon");
        cons.push_back({ml_label(f), f.horizon, f.bound});
    }
    return detail::flat_schedule(state, T, cons, params);
}

/// Nominal pricing with known future losses. Without damping this is the LP
///   min sum p  s.t.  sum p - sum l >= delta, |p_t - p_{t-1}| <= gamma1, 0 <= p <= cap
/// solved in two stages: total revenue first, then the smoothest schedule
/// among those attaining it. With damping the flat-schedule reduction applies.
inline StateSchedule solve_nominal(const std::string& state, std::span<const double> losses, const RoParams& params) {
    params.validate();
    require(!losses.empty(), ErrorKind::data, state + ": nominal pricing needs at least one year of losses");
    double total = 0.0;
    for (double l : losses) {
        require(std::isfinite(l) && l >= 0.0, ErrorKind::data, state + ": losses must be finite and >= 0");
        total += l;
    }
    const int T = static_cast<int>(losses.size());
    const CoverageConstraint cov{"coverage", T, total};
    if (params.damping.enabled()) return detail::flat_schedule(state, T, std::span(&cov, 1), params);

    const double cap = params.premium_cap > 0.0 ? params.premium_cap
                                                : default_premium_cap(std::span(&cov, 1), params.delta,
                                                                      params.hist_max_premium);
    lp::LinearProgram prog;
    std::vector<std::size_t> p(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) p[t] = prog.add_variable("p" + std::to_string(t + 1), 0.0, cap, 1.0);
    std::vector<lp::Term> cover;
    for (auto j : p) cover.push_back({j, -1.0});
    prog.add_row("coverage", cover, -(params.delta + total));
    for (int t = 1; t < T; ++t) {
        prog.add_row("band_up" + std::to_string(t + 1), {{p[t], 1.0}, {p[t - 1], -1.0}}, params.gamma1);
        prog.add_row("band_dn" + std::to_string(t + 1), {{p[t], -1.0}, {p[t - 1], 1.0}}, params.gamma1);
    }
    const auto first = lp::solve_lp(prog);
    if (first.status == lp::Status::infeasible)
        fail(ErrorKind::infeasible, state + ": required revenue unattainable within premium cap " + csv::format_number(cap));
    require(first.status == lp::Status::optimal, ErrorKind::numeric,
            state + ": nominal LP ended " + std::string(lp::to_string(first.status)));

    const double target = first.objective;
    std::vector<lp::Term> revenue;
    for (auto j : p) revenue.push_back({j, 1.0});
    prog.add_row("revenue_cap", revenue, target + 1e-9 * (1.0 + std::abs(target)));
    for (auto j : p) prog.set_cost(j, 0.0);
    for (int t = 1; t < T; ++t) {
        const auto d = prog.add_variable("tv" + std::to_string(t + 1), 0.0, lp::kInfinity, 1.0);
        prog.add_row("tv_up" + std::to_string(t + 1), {{p[t], 1.0}, {p[t - 1], -1.0}, {d, -1.0}}, 0.0);
        prog.add_row("tv_dn" + std::to_string(t + 1), {{p[t], -1.0}, {p[t - 1], 1.0}, {d, -1.0}}, 0.0);
    }
    const auto second = lp::solve_lp(prog);
    const auto& sol = second.status == lp::Status::optimal ? second : first;

    StateSchedule s;
    s.state = state;
    for (auto j : p) s.premium.push_back(std::max(0.0, sol.x[j]));
    s.damped_fraction.assign(s.premium.size(), 1.0);
    s.binding = "coverage";
    double sum = 0.0;
    for (double v : s.premium) sum += v;
    s.residual = sum - total - params.delta;
    return s;
}

}  // namespace catpremium
