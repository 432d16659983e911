#pragma once

// Uncertainty sets on cumulative future losses of one location.
//
//   CLT band:  |sum_t l_t - T*mean| <= gamma2 * sigma * sqrt(T),  l >= 0
//   ML set:    sum_{t<=k} l_t <= theta * z,  |z - q| <= eps,  0 <= z <= 1
//
// Both reduce to an upper bound on a loss total; the sampler produces
// in-set paths for auditing premium schedules against adversarial losses.

#include "catpremium/csv.hpp"
#include "catpremium/data_ingest.hpp"
#include "catpremium/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace catpremium {

struct CltSet {
    std::string state;
    int horizon = 1;  // T
    Usd mean = 0.0;
    Usd sigma = 0.0;
    double gamma2 = 0.0;
    Usd upper = 0.0;  // T*mean + gamma2*sigma*sqrt(T)
    Usd lower = 0.0;  // max(0, T*mean - gamma2*sigma*sqrt(T))

    double half_width() const { return gamma2 * sigma * std::sqrt(static_cast<double>(horizon)); }
};

struct MlSet {
    std::string state;
    int horizon = 1;  // k
    Usd theta = 0.0;
    double q = 0.0;
    double eps = 0.0;
    Usd bound = 0.0;  // theta * min(1, q + eps)
};

inline CltSet clt_bound(const StateStats& stats, int horizon, double gamma2, const std::string& state = {}) {
    require(horizon >= 1, ErrorKind::config, "CLT horizon must be at least 1 year");
    require(gamma2 >= 0.0, ErrorKind::config, "gamma2 must be non-negative");
    require(stats.std >= 0.0, ErrorKind::data, "standard deviation must be non-negative");
    CltSet set;
    set.state = state;
    set.horizon = horizon;
    set.mean = stats.mean;
    set.sigma = stats.std;
    set.gamma2 = gamma2;
    const double centre = horizon * stats.mean;
    const double hw = set.half_width();
    set.upper = std::max(0.0, centre + hw);
    set.lower = std::max(0.0, centre - hw);
    return set;
}

inline MlSet ml_bound(double theta, double q, double eps, int horizon = 1, const std::string& state = {}) {
    require(theta > 0.0, ErrorKind::config, "loss threshold must be positive");
    require(q >= 0.0 && q <= 1.0, ErrorKind::data, "forecast probability must lie in [0,1]");
    require(eps >= 0.0, ErrorKind::config, "eps must be non-negative");
    require(horizon >= 1, ErrorKind::config, "forecast horizon must be at least 1 year");
    MlSet set;
    set.state = state;
    set.horizon = horizon;
    set.theta = theta;
    set.q = q;
    set.eps = eps;
    set.bound = theta * std::min(1.0, q + eps);
    return set;
}

/// Loss paths of length T inside the CLT band. Path 0 is the worst-case vertex
/// with the upper total split evenly across years; the rest draw a total
/// uniformly in [lower, upper] and split it with flat Dirichlet weights.
inline std::vector<std::vector<Usd>> sample_clt_scenarios(const CltSet& set, std::size_t n, std::uint64_t seed) {
    require(n >= 1, ErrorKind::config, "scenario count must be at least 1");
    const auto T = static_cast<std::size_t>(set.horizon);
    std::vector<std::vector<Usd>> paths;
    paths.reserve(n);
    paths.emplace_back(T, set.upper / static_cast<double>(T));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(T);
    while (paths.size() < n) {
        const double total = set.lower + unit(rng) * (set.upper - set.lower);
        double sum = 0.0;
        for (auto& x : w) sum += (x = expo(rng));
        std::vector<Usd> path(T);
        double acc = 0.0;
        for (std::size_t t = 0; t + 1 < T; ++t) {
            path[t] = total * (w[t] / sum);
            acc += path[t];
        }
        path[T - 1] = std::max(0.0, total - acc);
        paths.push_back(std::move(path));
    }
    return paths;
}

/// Extreme points of the CLT band: all mass on one year at the upper total and
/// at the clamped lower total, plus the zero path when the lower total is 0.
inline std::vector<std::vector<Usd>> clt_vertex_paths(const CltSet& set) {
    const auto T = static_cast<std::size_t>(set.horizon);
    std::vector<std::vector<Usd>> out;
    for (double total : {set.upper, set.lower}) {
        if (total == 0.0) continue;
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<Usd> p(T, 0.0);
            p[t] = total;
            out.push_back(std::move(p));
        }
    }
    if (set.lower == 0.0) out.emplace_back(T, 0.0);
    return out;
}

/// CSV export: state,T,gamma2,L_CLT,k,theta,q,eps,L_ML. A CLT row leaves the ML
/// columns empty; ML rows leave the CLT columns empty.
inline std::string bounds_to_csv(const std::vector<CltSet>& clt, const std::vector<MlSet>& ml) {
    csv::Writer w({"state", "T", "gamma2", "L_CLT", "k", "theta", "q", "eps", "L_ML"});
    for (const auto& s : clt)
        w.row({s.state, std::to_string(s.horizon), csv::format_number(s.gamma2), csv::format_number(s.upper), "", "",
               "", "", ""});
    for (const auto& s : ml)
        w.row({s.state, "", "", "", std::to_string(s.horizon), csv::format_number(s.theta), csv::format_number(s.q),
               csv::format_number(s.eps), csv::format_number(s.bound)});
    return w.str();
}

}  // namespace catpremium
