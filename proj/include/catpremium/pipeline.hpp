#pragma once

// Prices every state under one scheme from ingested artifacts. Shared by the
// command-line tool and the end-to-end tests.

#include "catpremium/baselines.hpp"
#include "catpremium/data_ingest.hpp"
#include "catpremium/error.hpp"
#include "catpremium/parallel.hpp"
#include "catpremium/pricing_aro.hpp"
#include "catpremium/pricing_ro.hpp"
#include "catpremium/risk_model.hpp"
#include "catpremium/schedule.hpp"
#include "catpremium/uncertainty.hpp"

#include <optional>
#include <string>
#include <vector>

namespace catpremium {

enum class DampingMode { none, m1, m2, fixed };

inline std::optional<DampingMode> parse_damping_mode(const std::string& s) {
    if (s == "none") return DampingMode::none;
    if (s == "m1") return DampingMode::m1;
    if (s == "m2") return DampingMode::m2;
    if (s == "explicit") return DampingMode::fixed;
    return std::nullopt;
}

enum class PremiumBasis { mean_policy, state_total };

struct DampingSettings {
    DampingMode mode = DampingMode::none;
    double p0_frac = 0.1;
    double c_min = 0.2;
    double rate = 0.0;    // used by DampingMode::fixed
    double p_hist = 0.0;  // > 0 overrides the per-state historical maximum
    PremiumBasis basis = PremiumBasis::mean_policy;
};

/// Onset P0 = p0_frac * P_hist; rate 1/P_hist (m1), 1/(2 P_hist) (m2) or fixed.
inline DampingCurve make_damping(const DampingSettings& d, double p_hist) {
    if (d.mode == DampingMode::none) return DampingCurve::none();
    require(p_hist > 0.0, ErrorKind::data, "damping needs a positive historical maximum premium");
    DampingCurve c;
    c.onset = d.p0_frac * p_hist;
    c.c_min = d.c_min;
    switch (d.mode) {
        case DampingMode::m1: c.rate = 1.0 / p_hist; break;
        case DampingMode::m2: c.rate = 1.0 / (2.0 * p_hist); break;
        case DampingMode::fixed: c.rate = d.rate; break;
        case DampingMode::none: break;
    }
    c.validate();
    return c;
}

struct PricingInputs {
    StatsTable stats;
    std::optional<LossPanel> panel;  // interpolated losses; realized values for nominal, ARO and CMA
    std::optional<PolicyPanel> policies;
    std::vector<RiskForecast> forecasts;
    int test_start = 2013;
    int test_end = 2022;

    int horizon() const { return test_end - test_start + 1; }
    int forecast_base_year() const { return test_start - 1; }

    /// Pricing targets: panel states when a panel is present, else stats keys.
    std::vector<std::string> states() const {
        if (panel) return panel->states();
        std::vector<std::string> out;
        for (const auto& [k, v] : stats) out.push_back(k);
        return out;
    }
};

struct PricingParams {
    double gamma1 = 50000.0;
    double delta = 10000.0;
    double gamma3 = 50000.0;
    double gamma4 = 1.0;
    double eps = 0.1;
    double premium_cap = 0.0;
    DampingSettings damping;
    unsigned workers = 0;
};

struct PricingResult {
    PremiumSchedule schedule;
    std::vector<AffinePolicy> aro;
    std::vector<CltSet> clt;
    std::vector<MlSet> ml;
};

namespace detail {

inline const StateStats& stats_for(const PricingInputs& in, const std::string& st) {
    auto it = in.stats.find(st);
    require(it != in.stats.end(), ErrorKind::data, "no loss statistics for state " + st);
    return it->second;
}

inline const LossPanel& need_panel(const PricingInputs& in, Scheme s) {
    require(in.panel.has_value(), ErrorKind::config,
            std::string("scheme ") + to_string(s) + " requires the loss panel (run ingest first)");
    require(in.panel->covers(in.test_start) && in.panel->covers(in.test_end), ErrorKind::data,
            std::string("scheme ") + to_string(s) + " needs realized losses for the test window");
    return *in.panel;
}

inline double hist_max(const PricingInputs& in, const std::string& st, PremiumBasis basis) {
    if (!in.policies) return 0.0;
    auto idx = in.policies->state_index(st);
    if (!idx) return 0.0;
    return basis == PremiumBasis::mean_policy ? in.policies->max_mean_policy_premium(*idx)
                                              : in.policies->max_state_premium(*idx);
}

inline RoParams ro_params(const PricingInputs& in, const PricingParams& p, const std::string& st, double gamma2) {
    RoParams r;
    r.gamma1 = p.gamma1;
    r.gamma2 = gamma2;
    r.delta = p.delta;
    r.premium_cap = p.premium_cap;
    r.hist_max_premium = hist_max(in, st, PremiumBasis::state_total);
    if (p.damping.mode != DampingMode::none) {
        const double ph = p.damping.p_hist > 0.0 ? p.damping.p_hist : hist_max(in, st, p.damping.basis);
        require(ph > 0.0, ErrorKind::data, st + ": damping needs historical policy premiums (none found)");
        r.damping = make_damping(p.damping, ph);
    }
    return r;
}

}  // namespace detail

inline PricingResult price_scheme(const PricingInputs& in, const PricingParams& p, Scheme scheme, double gamma2) {
    PricingResult res;
    auto& sched = res.schedule;
    sched.scheme = scheme;
    sched.gamma2 = gamma2;
    sched.first_year = in.test_start;
    sched.num_years = static_cast<std::size_t>(in.horizon());
    require(in.horizon() >= 1, ErrorKind::config, "test window is empty");
    const int T = in.horizon();
    const auto states = in.states();

    if (scheme == Scheme::cma) {
        res.schedule = cma_schedule(detail::need_panel(in, scheme), in.test_start, in.test_end);
        res.schedule.gamma2 = gamma2;
        return res;
    }
    if (scheme == Scheme::hist) {
        require(in.policies.has_value(), ErrorKind::config, "scheme hist requires the policy panel (policies path)");
        res.schedule = hist_schedule(*in.policies, states, in.test_start, in.test_end);
        res.schedule.gamma2 = gamma2;
        return res;
    }
    if (scheme == Scheme::ro2) {
        bool any = false;
        for (const auto& f : in.forecasts) any = any || (f.base_year == in.forecast_base_year() && f.horizon <= T);
        require(any, ErrorKind::config,
                "scheme ro2 requires risk forecasts for base year " + std::to_string(in.forecast_base_year()) +
                    " (run train-risk or set paths.external_forecasts)");
    }

    sched.states.resize(states.size());
    std::vector<std::vector<MlSet>> ml(states.size());
    std::vector<std::optional<AffinePolicy>> aro(states.size());
    std::vector<std::vector<std::string>> warn(states.size());
    const LossPanel* actual = (scheme == Scheme::nominal || scheme == Scheme::aro) ? &detail::need_panel(in, scheme)
                                                                                   : nullptr;

    parallel_for(
        states.size(),
        [&](std::size_t i) {
            const auto& st = states[i];
            const auto rp = detail::ro_params(in, p, st, gamma2);
            switch (scheme) {
                case Scheme::nominal: {
                    const auto idx = actual->state_index(st);
                    const auto losses = actual->window(*idx, in.test_start, in.test_end);
                    sched.states[i] = solve_nominal(st, losses, rp);
                    break;
                }
                case Scheme::ro1: sched.states[i] = solve_ro1(st, detail::stats_for(in, st), T, rp); break;
                case Scheme::ro2: {
                    for (const auto& f : in.forecasts)
                        if (f.state == st && f.base_year == in.forecast_base_year() && f.horizon <= T)
                            ml[i].push_back(ml_bound(f.theta, f.probability, p.eps, f.horizon, st));
                    if (ml[i].empty()) warn[i].push_back(st + ": no risk forecasts, ro2 reduces to ro1");
                    sched.states[i] = solve_ro2(st, detail::stats_for(in, st), ml[i], T, rp);
                    break;
                }
                case Scheme::aro: {
                    AroParams ap;
                    ap.delta = p.delta;
                    ap.gamma3 = p.gamma3;
                    ap.gamma4 = p.gamma4;
                    const auto set = clt_bound(detail::stats_for(in, st), T, gamma2, st);
                    aro[i] = solve_aro(set, ap, st);
                    const auto idx = actual->state_index(st);
                    const auto losses = actual->window(*idx, in.test_start, in.test_end);
                    sched.states[i] = realize_premiums(*aro[i], losses, &warn[i]);
                    break;
                }
                default: break;
            }
        },
        p.workers);

    for (std::size_t i = 0; i < states.size(); ++i) {
        if (scheme != Scheme::nominal) res.clt.push_back(clt_bound(detail::stats_for(in, states[i]), T, gamma2, states[i]));
        for (auto& m : ml[i]) res.ml.push_back(std::move(m));
        if (aro[i]) res.aro.push_back(std::move(*aro[i]));
        for (auto& w : warn[i]) sched.warnings.push_back(std::move(w));
    }
    return res;
}

}  // namespace catpremium
