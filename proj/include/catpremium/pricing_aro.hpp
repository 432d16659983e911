#pragma once

// Adjustable robust pricing with one-lag affine premiums
//
//     p_1 = alpha_1,   p_t = alpha_t + beta_t * l_{t-1}   (t >= 2)
//
// against the CLT band. Every semi-infinite constraint is a linear function of
// l maximized over {lower <= sum l <= upper, l >= 0}; each inner maximum is
// replaced by its two-variable dual, giving one LP per location.
//
// Variable layout: Omega, alpha_1..T, beta_2..T, s1_{1,2}, s2_{1,2}, then
// s3_{t,1}, s3_{t,2} for t = 2..T.

#include "catpremium/csv.hpp"
#include "catpremium/error.hpp"
#include "catpremium/lp.hpp"
#include "catpremium/schedule.hpp"
#include "catpremium/uncertainty.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace catpremium {

inline constexpr std::size_t kNoVar = std::numeric_limits<std::size_t>::max();

struct AroParams {
    double delta = 10000.0;
    double gamma3 = 50000.0;  // |alpha_t - alpha_{t-1}| bound
    double gamma4 = 1.0;      // |beta_t - beta_{t-1}| bound
    /// Among Omega-optimal policies, pick the one with least alpha variation
    /// and smallest |beta|. Off returns the first optimal vertex.
    bool smooth = true;
    double gap_tol = 1e-6;

    void validate() const {
        require(delta >= 0.0 && gamma3 >= 0.0 && gamma4 >= 0.0, ErrorKind::config, "delta, gamma3, gamma4 must be >= 0");
    }
};

struct AroCounterpart {
    lp::LinearProgram lp;
    CltSet set;
    double c1 = 0.0;  // T*mean + gamma2*sigma*sqrt(T)
    double c2 = 0.0;  // -T*mean + gamma2*sigma*sqrt(T)
    std::size_t omega = kNoVar;
    std::vector<std::size_t> alpha;  // size T
    std::vector<std::size_t> beta;   // size T, beta[0] unused
    std::array<std::size_t, 2> s1{kNoVar, kNoVar};
    std::array<std::size_t, 2> s2{kNoVar, kNoVar};
    std::vector<std::array<std::size_t, 2>> s3;  // size T, s3[0] unused

    int horizon() const { return set.horizon; }
};

inline AroCounterpart build_aro_lp(const CltSet& set, const AroParams& params) {
    params.validate();
    require(set.horizon >= 2, ErrorKind::config, "ARO needs a horizon of at least 2 years");
    const int T = set.horizon;
    const auto uT = static_cast<std::size_t>(T);
    const double inf = lp::kInfinity;

    AroCounterpart ac;
    ac.set = set;
    const double centre = T * set.mean, hw = set.half_width();
    ac.c1 = centre + hw;
    ac.c2 = -centre + hw;
    auto& P = ac.lp;

    ac.omega = P.add_variable("omega", -inf, inf, 1.0);
    ac.alpha.resize(uT);
    for (int t = 0; t < T; ++t)
        ac.alpha[t] = P.add_variable("alpha" + std::to_string(t + 1), t == 0 ? 0.0 : -inf, inf);
    ac.beta.assign(uT, kNoVar);
    for (int t = 1; t < T; ++t) ac.beta[t] = P.add_variable("beta" + std::to_string(t + 1), -inf, inf);
    ac.s1 = {P.add_variable("s1_1", 0.0, inf), P.add_variable("s1_2", 0.0, inf)};
    ac.s2 = {P.add_variable("s2_1", 0.0, inf), P.add_variable("s2_2", 0.0, inf)};
    ac.s3.assign(uT, {kNoVar, kNoVar});
    for (int t = 1; t < T; ++t) {
        const auto tag = std::to_string(t + 1);
        ac.s3[t] = {P.add_variable("s3_" + tag + "_1", 0.0, inf), P.add_variable("s3_" + tag + "_2", 0.0, inf)};
    }
    const double c1 = ac.c1, c2 = ac.c2;

    // epigraph: sum alpha + max_l sum_t beta_{t+1} l_t <= Omega
    {
        std::vector<lp::Term> r;
        for (auto a : ac.alpha) r.push_back({a, 1.0});
        r.push_back({ac.s1[0], c1});
        r.push_back({ac.s1[1], c2});
        r.push_back({ac.omega, -1.0});
        P.add_row("epi", r, 0.0);
        for (int t = 1; t < T; ++t)
            P.add_row("epi_dual" + std::to_string(t), {{ac.beta[t], 1.0}, {ac.s1[0], -1.0}, {ac.s1[1], 1.0}}, 0.0);
        P.add_row("epi_dual" + std::to_string(T), {{ac.s1[0], -1.0}, {ac.s1[1], 1.0}}, 0.0);
    }
    // coverage: sum alpha - max_l sum_t (1 - beta_{t+1}) l_t >= delta
    {
        std::vector<lp::Term> r;
        for (auto a : ac.alpha) r.push_back({a, -1.0});
        r.push_back({ac.s2[0], c1});
        r.push_back({ac.s2[1], c2});
        P.add_row("cov", r, -params.delta);
        for (int t = 1; t < T; ++t)
            P.add_row("cov_dual" + std::to_string(t), {{ac.s2[0], -1.0}, {ac.s2[1], 1.0}, {ac.beta[t], -1.0}}, -1.0);
        P.add_row("cov_dual" + std::to_string(T), {{ac.s2[0], -1.0}, {ac.s2[1], 1.0}}, -1.0);
    }
    // positivity: alpha_t + min_l beta_t l_{t-1} >= 0
    for (int t = 1; t < T; ++t) {
        const auto tag = std::to_string(t + 1);
        const auto [a, b] = ac.s3[t];
        P.add_row("pos" + tag, {{ac.alpha[t], -1.0}, {a, c1}, {b, c2}}, 0.0);
        P.add_row("pos" + tag + "_dual_lag", {{a, -1.0}, {b, 1.0}, {ac.beta[t], -1.0}}, 0.0);
        P.add_row("pos" + tag + "_dual_rest", {{a, -1.0}, {b, 1.0}}, 0.0);
    }
    for (int t = 1; t < T; ++t) {
        const auto tag = std::to_string(t + 1);
        P.add_row("alpha_up" + tag, {{ac.alpha[t], 1.0}, {ac.alpha[t - 1], -1.0}}, params.gamma3);
        P.add_row("alpha_dn" + tag, {{ac.alpha[t], -1.0}, {ac.alpha[t - 1], 1.0}}, params.gamma3);
    }
    for (int t = 2; t < T; ++t) {
        const auto tag = std::to_string(t + 1);
        P.add_row("beta_up" + tag, {{ac.beta[t], 1.0}, {ac.beta[t - 1], -1.0}}, params.gamma4);
        P.add_row("beta_dn" + tag, {{ac.beta[t], -1.0}, {ac.beta[t - 1], 1.0}}, params.gamma4);
    }
    return ac;
}

struct BlockAudit {
    std::string block;           // "epigraph", "coverage", "positivity"
    int t = 0;                   // year for positivity blocks, 0 otherwise
    double inner_primal = 0.0;   // max_l v'l re-solved at the returned beta
    double inner_dual = 0.0;     // min c1 s1 + c2 s2 re-solved
    double used_dual = 0.0;      // c1 s1 + c2 s2 at the counterpart optimum
    double gap = 0.0;            // |primal - dual| / (1 + |primal|)
    double robust_residual = 0;  // slack of the robust constraint with the re-solved inner value (>= 0 holds)
    bool ok = false;
};

struct AroAudit {
    std::vector<BlockAudit> blocks;
    double max_gap = 0.0;
    double min_residual = 0.0;
    bool passed = false;
};

struct AffinePolicy {
    std::string state;
    int horizon = 0;
    std::vector<double> alpha;  // size T
    std::vector<double> beta;   // size T, beta[0] = 0 and unused
    double omega = 0.0;
    CltSet set;
    AroAudit audit;
    std::size_t lp_iterations = 0;
};

namespace detail {

struct InnerValues {
    double primal = 0.0, dual = 0.0;
    bool ok = false;
};

// max v'l over the band, and its dual, each solved as its own LP.
inline InnerValues inner_values(std::span<const double> v, double c1, double c2) {
    InnerValues out;
    lp::LinearProgram pr;
    std::vector<lp::Term> sum, neg;
    for (std::size_t t = 0; t < v.size(); ++t) {
        const auto j = pr.add_variable("l" + std::to_string(t + 1), 0.0, lp::kInfinity, -v[t]);
        sum.push_back({j, 1.0});
        neg.push_back({j, -1.0});
    }
    pr.add_row("upper", sum, c1);
    pr.add_row("lower", neg, c2);
    const auto ps = lp::solve_lp(pr);

    lp::LinearProgram du;
    const auto a = du.add_variable("s1", 0.0, lp::kInfinity, c1);
    const auto b = du.add_variable("s2", 0.0, lp::kInfinity, c2);
    for (std::size_t t = 0; t < v.size(); ++t) du.add_row("cover" + std::to_string(t + 1), {{a, -1.0}, {b, 1.0}}, -v[t]);
    const auto ds = lp::solve_lp(du);

    out.ok = ps.status == lp::Status::optimal && ds.status == lp::Status::optimal;
    out.primal = -ps.objective;
    out.dual = ds.objective;
    return out;
}

}  // namespace detail

/// Strong-duality and robustness audit of a policy against its CLT band.
inline AroAudit audit_policy(const AffinePolicy& pol, double c1, double c2, double delta, double gap_tol = 1e-6) {
    const auto T = static_cast<std::size_t>(pol.horizon);
    AroAudit audit;
    auto add = [&](std::string block, int t, std::vector<double> v, double used, double lhs_without_inner, double rhs) {
        BlockAudit b;
        b.block = std::move(block);
        b.t = t;
        const auto iv = detail::inner_values(v, c1, c2);
        b.inner_primal = iv.primal;
        b.inner_dual = iv.dual;
        b.used_dual = used;
        b.gap = std::abs(iv.primal - iv.dual) / (1.0 + std::abs(iv.primal));
        const double scale = 1.0 + std::abs(rhs) + std::abs(lhs_without_inner) + std::abs(iv.primal);
        b.robust_residual = (rhs - (lhs_without_inner + iv.dual)) / scale;
        b.ok = iv.ok && b.gap <= gap_tol && b.robust_residual >= -gap_tol;
        audit.blocks.push_back(std::move(b));
    };
    double sum_alpha = 0.0;
    for (double a : pol.alpha) sum_alpha += a;

    std::vector<double> v(T, 0.0);
    for (std::size_t t = 0; t + 1 < T; ++t) v[t] = pol.beta[t + 1];
    add("epigraph", 0, v, std::numeric_limits<double>::quiet_NaN(), sum_alpha, pol.omega);

    for (std::size_t t = 0; t + 1 < T; ++t) v[t] = 1.0 - pol.beta[t + 1];
    v[T - 1] = 1.0;
    add("coverage", 0, v, std::numeric_limits<double>::quiet_NaN(), -sum_alpha, -delta);

    for (std::size_t t = 1; t < T; ++t) {
        std::fill(v.begin(), v.end(), 0.0);
        v[t - 1] = -pol.beta[t];
        add("positivity", static_cast<int>(t + 1), v, std::numeric_limits<double>::quiet_NaN(), -pol.alpha[t], 0.0);
    }
    audit.passed = true;
    audit.min_residual = std::numeric_limits<double>::infinity();
    for (const auto& b : audit.blocks) {
        audit.max_gap = std::max(audit.max_gap, b.gap);
        audit.min_residual = std::min(audit.min_residual, b.robust_residual);
        audit.passed = audit.passed && b.ok;
    }
    return audit;
}

inline AffinePolicy solve_aro(const CltSet& set, const AroParams& params, const std::string& state = {}) {
    auto ac = build_aro_lp(set, params);
    const std::string who = state.empty() ? set.state : state;
    auto first = lp::solve_lp(ac.lp);
    if (first.status == lp::Status::infeasible)
        fail(ErrorKind::infeasible, who + ": ARO counterpart infeasible (slowly-varying bounds gamma3/gamma4 too tight "
                                          "to reach coverage)");
    require(first.status == lp::Status::optimal, ErrorKind::numeric,
            who + ": ARO counterpart ended " + std::string(lp::to_string(first.status)));
    const double omega_star = first.x[ac.omega];
    std::size_t iterations = first.iterations;
    auto sol = first.x;

    if (params.smooth) {
        auto& P = ac.lp;
        const int T = set.horizon;
        P.set_cost(ac.omega, 0.0);
        P.set_bounds(ac.omega, -lp::kInfinity, omega_star + 1e-9 * (1.0 + std::abs(omega_star)));
        const double w = std::max(1.0, ac.c1 / T);
        for (int t = 1; t < T; ++t) {
            const auto tag = std::to_string(t + 1);
            const auto u = P.add_variable("tv_alpha" + tag, 0.0, lp::kInfinity, 1.0);
            P.add_row("tv_alpha_up" + tag, {{ac.alpha[t], 1.0}, {ac.alpha[t - 1], -1.0}, {u, -1.0}}, 0.0);
            P.add_row("tv_alpha_dn" + tag, {{ac.alpha[t], -1.0}, {ac.alpha[t - 1], 1.0}, {u, -1.0}}, 0.0);
            const auto b = P.add_variable("abs_beta" + tag, 0.0, lp::kInfinity, w);
            P.add_row("abs_beta_up" + tag, {{ac.beta[t], 1.0}, {b, -1.0}}, 0.0);
            P.add_row("abs_beta_dn" + tag, {{ac.beta[t], -1.0}, {b, -1.0}}, 0.0);
        }
        const auto second = lp::solve_lp(P);
        iterations += second.iterations;
        if (second.status == lp::Status::optimal) sol.assign(second.x.begin(), second.x.begin() + first.x.size());
    }

    AffinePolicy pol;
    pol.state = who;
    pol.horizon = set.horizon;
    pol.set = set;
    pol.lp_iterations = iterations;
    for (auto j : ac.alpha) pol.alpha.push_back(sol[j]);
    pol.beta.assign(pol.alpha.size(), 0.0);
    for (std::size_t t = 1; t < ac.beta.size(); ++t) pol.beta[t] = sol[ac.beta[t]];
    pol.omega = omega_star;
    pol.audit = audit_policy(pol, ac.c1, ac.c2, params.delta, params.gap_tol);

    // fill in the values of the dualized blocks as the counterpart used them
    auto used = [&](std::array<std::size_t, 2> s) { return ac.c1 * sol[s[0]] + ac.c2 * sol[s[1]]; };
    for (auto& b : pol.audit.blocks) {
        if (b.block == "epigraph") b.used_dual = used(ac.s1);
        else if (b.block == "coverage") b.used_dual = used(ac.s2);
        else b.used_dual = used(ac.s3[static_cast<std::size_t>(b.t - 1)]);
    }
    return pol;
}

/// Premiums the rule charges along a realized loss path. Negative values can
/// only come from losses outside the modeled band; they are clamped to 0.
inline StateSchedule realize_premiums(const AffinePolicy& pol, std::span<const double> losses,
                                      std::vector<std::string>* warnings = nullptr) {
    require(losses.size() == static_cast<std::size_t>(pol.horizon), ErrorKind::data,
            pol.state + ": loss path length " + std::to_string(losses.size()) + " does not match policy horizon " +
                std::to_string(pol.horizon));
    StateSchedule s;
    s.state = pol.state;
    s.binding = "ARO";
    for (std::size_t t = 0; t < losses.size(); ++t) {
        const double lag = t > 0 ? pol.beta[t] * losses[t - 1] : 0.0;
        double p = pol.alpha[t] + lag;
        // rounding at a tight positivity vertex is not an out-of-band event
        const double tol = 1e-9 * (1.0 + std::abs(pol.alpha[t]) + std::abs(lag));
        if (p < 0.0 && p >= -tol) p = 0.0;
        if (p < 0.0) {
            if (warnings)
                warnings->push_back(pol.state + ": realized premium " + csv::format_number(p) + " at t=" +
                                    std::to_string(t + 1) + " clamped to 0 (loss outside the modeled band)");
            p = 0.0;
        }
        s.premium.push_back(p);
    }
    s.damped_fraction.assign(s.premium.size(), 1.0);
    double paid = 0.0;
    for (double p : s.premium) paid += p;
    s.residual = paid - pol.omega;
    return s;
}

/// CSV columns: state,t,alpha,beta,omega. beta is empty at t = 1.
inline std::string policies_to_csv(const std::vector<AffinePolicy>& pols) {
    csv::Writer w({"state", "t", "alpha", "beta", "omega"});
    for (const auto& p : pols)
        for (std::size_t t = 0; t < p.alpha.size(); ++t)
            w.row({p.state, std::to_string(t + 1), csv::format_number(p.alpha[t]),
                   t == 0 ? std::string() : csv::format_number(p.beta[t]), csv::format_number(p.omega)});
    return w.str();
}

inline nlohmann::json audit_to_json(const std::vector<AffinePolicy>& pols) {
    nlohmann::json out;
    out["gap_tolerance"] = 1e-6;
    double worst = 0.0;
    bool all = true;
    auto& states = out["states"] = nlohmann::json::array();
    for (const auto& p : pols) {
        nlohmann::json s;
        s["state"] = p.state;
        s["omega"] = p.omega;
        s["max_gap"] = p.audit.max_gap;
        s["min_residual"] = p.audit.min_residual;
        s["passed"] = p.audit.passed;
        auto& blocks = s["blocks"] = nlohmann::json::array();
        for (const auto& b : p.audit.blocks) {
            nlohmann::json j{{"block", b.block},           {"inner_primal", b.inner_primal},
                             {"inner_dual", b.inner_dual}, {"used_dual", b.used_dual},
                             {"gap", b.gap},               {"robust_residual", b.robust_residual},
                             {"ok", b.ok}};
            if (b.t > 0) j["t"] = b.t;
            blocks.push_back(std::move(j));
        }
        worst = std::max(worst, p.audit.max_gap);
        all = all && p.audit.passed;
        states.push_back(std::move(s));
    }
    out["max_gap"] = worst;
    out["passed"] = all;
    return out;
}

}  // namespace catpremium
