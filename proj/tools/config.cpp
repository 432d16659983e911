#include "config.hpp"

#include "catpremium/csv.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace catpremium::cli {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    require(obj.is_object(), ErrorKind::config, where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
        require(ok.count(k) > 0, ErrorKind::config, "unknown config key " + (where.empty() ? k : where + "." + k));
}

template <class T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::config, "config key " + where + "." + key + " has the wrong type");
    }
}

std::string basis_name(PremiumBasis b) { return b == PremiumBasis::mean_policy ? "mean_policy" : "state_total"; }

std::string mode_name(DampingMode m) {
    switch (m) {
        case DampingMode::none: return "none";
        case DampingMode::m1: return "m1";
        case DampingMode::m2: return "m2";
        case DampingMode::fixed: return "explicit";
    }
    return "none";
}

}  // namespace

RunConfig config_from_json(const json& j) {
    RunConfig c;
    check_keys(j, "", {"paths", "ingest", "windows", "params", "risk", "damping", "seed", "workers"});
    if (j.contains("paths")) {
        const auto& p = j["paths"];
        check_keys(p, "paths", {"claims", "policies", "external_forecasts", "output_dir"});
        read(p, "paths", "claims", c.paths.claims);
        read(p, "paths", "policies", c.paths.policies);
        read(p, "paths", "external_forecasts", c.paths.external_forecasts);
        read(p, "paths", "output_dir", c.paths.output_dir);
    }
    if (j.contains("ingest")) {
        const auto& p = j["ingest"];
        check_keys(p, "ingest",
                   {"claims_date_column", "claims_state_column", "claims_amount_column", "policy_date_column",
                    "policy_state_column", "policy_premium_column", "policy_count_column", "jurisdictions",
                    "error_threshold"});
        auto& g = c.ingest;
        read(p, "ingest", "claims_date_column", g.claims_date_column);
        read(p, "ingest", "claims_state_column", g.claims_state_column);
        read(p, "ingest", "claims_amount_column", g.claims_amount_column);
        read(p, "ingest", "policy_date_column", g.policy_date_column);
        read(p, "ingest", "policy_state_column", g.policy_state_column);
        read(p, "ingest", "policy_premium_column", g.policy_premium_column);
        read(p, "ingest", "policy_count_column", g.policy_count_column);
        read(p, "ingest", "jurisdictions", g.jurisdictions);
        read(p, "ingest", "error_threshold", g.error_threshold);
    }
    if (j.contains("windows")) {
        const auto& p = j["windows"];
        check_keys(p, "windows",
                   {"panel_start", "panel_end", "train_start", "train_end", "risk_split_year", "test_start",
                    "test_end"});
        auto& w = c.windows;
        read(p, "windows", "panel_start", w.panel_start);
        read(p, "windows", "panel_end", w.panel_end);
        read(p, "windows", "train_start", w.train_start);
        read(p, "windows", "train_end", w.train_end);
        read(p, "windows", "risk_split_year", w.risk_split_year);
        read(p, "windows", "test_start", w.test_start);
        read(p, "windows", "test_end", w.test_end);
    }
    if (j.contains("params")) {
        const auto& p = j["params"];
        check_keys(p, "params",
                   {"gamma1", "gamma2", "gamma2_grid", "gamma3", "gamma4", "delta", "eps", "premium_cap"});
        auto& q = c.params;
        read(p, "params", "gamma1", q.gamma1);
        read(p, "params", "gamma2", q.gamma2);
        read(p, "params", "gamma2_grid", q.gamma2_grid);
        read(p, "params", "gamma3", q.gamma3);
        read(p, "params", "gamma4", q.gamma4);
        read(p, "params", "delta", q.delta);
        read(p, "params", "eps", q.eps);
        read(p, "params", "premium_cap", q.premium_cap);
    }
    if (j.contains("risk")) {
        const auto& p = j["risk"];
        check_keys(p, "risk", {"percentiles", "thresholds", "horizons", "C_grid", "folds", "max_iter", "tol"});
        auto& r = c.risk;
        read(p, "risk", "percentiles", r.percentiles);
        read(p, "risk", "thresholds", r.thresholds);
        read(p, "risk", "horizons", r.horizons);
        read(p, "risk", "C_grid", r.c_grid);
        read(p, "risk", "folds", r.folds);
        read(p, "risk", "max_iter", r.max_iter);
        read(p, "risk", "tol", r.tol);
    }
    if (j.contains("damping")) {
        const auto& p = j["damping"];
        check_keys(p, "damping", {"m_mode", "p0_frac", "c_min", "rate", "p_hist", "basis"});
        auto& d = c.damping;
        std::string mode = mode_name(d.mode), basis = basis_name(d.basis);
        read(p, "damping", "m_mode", mode);
        read(p, "damping", "basis", basis);
        auto m = parse_damping_mode(mode);
        require(m.has_value(), ErrorKind::config, "damping.m_mode must be none, m1, m2 or explicit (got " + mode + ")");
        d.mode = *m;
        require(basis == "mean_policy" || basis == "state_total", ErrorKind::config,
                "damping.basis must be mean_policy or state_total (got " + basis + ")");
        d.basis = basis == "mean_policy" ? PremiumBasis::mean_policy : PremiumBasis::state_total;
        read(p, "damping", "p0_frac", d.p0_frac);
        read(p, "damping", "c_min", d.c_min);
        read(p, "damping", "rate", d.rate);
        read(p, "damping", "p_hist", d.p_hist);
    }
    read(j, "", "seed", c.seed);
    read(j, "", "workers", c.workers);
    validate(c);
    return c;
}

void validate(const RunConfig& c) {
    const auto& w = c.windows;
    require(w.panel_start <= w.panel_end, ErrorKind::config, "windows.panel_start must not exceed windows.panel_end");
    require(w.train_start <= w.train_end, ErrorKind::config, "windows.train_start must not exceed windows.train_end");
    require(w.test_start <= w.test_end, ErrorKind::config, "windows.test_start must not exceed windows.test_end");
    require(w.train_end < w.test_start, ErrorKind::config, "training and test windows must be disjoint and ordered");
    require(w.panel_start <= w.train_start && w.test_end <= w.panel_end, ErrorKind::config,
            "training and test windows must lie inside the panel window");
    require(w.risk_split_year >= w.train_start && w.risk_split_year < w.test_start, ErrorKind::config,
            "windows.risk_split_year must lie in the training window");

    const auto& p = c.params;
    auto nonneg = [](double v, const char* key) {
        require(std::isfinite(v) && v >= 0.0, ErrorKind::config, std::string("params.") + key + " must be >= 0");
    };
    nonneg(p.gamma1, "gamma1");
    nonneg(p.gamma2, "gamma2");
    nonneg(p.gamma3, "gamma3");
    nonneg(p.gamma4, "gamma4");
    nonneg(p.delta, "delta");
    nonneg(p.eps, "eps");
    nonneg(p.premium_cap, "premium_cap");
    require(!p.gamma2_grid.empty(), ErrorKind::config, "params.gamma2_grid must not be empty");
    for (double g : p.gamma2_grid) nonneg(g, "gamma2_grid");
    require(std::is_sorted(p.gamma2_grid.begin(), p.gamma2_grid.end()), ErrorKind::config,
            "params.gamma2_grid must be ascending");

    const auto& r = c.risk;
    require(!r.percentiles.empty() || !r.thresholds.empty(), ErrorKind::config,
            "risk.percentiles or risk.thresholds must be set");
    for (double q : r.percentiles)
        require(q >= 0.0 && q <= 100.0, ErrorKind::config, "risk.percentiles must lie in [0, 100]");
    for (double t : r.thresholds) require(t > 0.0, ErrorKind::config, "risk.thresholds must be positive");
    require(!r.horizons.empty(), ErrorKind::config, "risk.horizons must not be empty");
    for (int k : r.horizons) require(k >= 1, ErrorKind::config, "risk.horizons must be >= 1");
    require(!r.c_grid.empty(), ErrorKind::config, "risk.C_grid must not be empty");
    for (double v : r.c_grid) require(v >= 0.0, ErrorKind::config, "risk.C_grid values must be >= 0");
    require(r.folds >= 2, ErrorKind::config, "risk.folds must be >= 2");
    require(r.max_iter >= 1, ErrorKind::config, "risk.max_iter must be >= 1");
    require(r.tol > 0.0, ErrorKind::config, "risk.tol must be positive");

    require(c.ingest.error_threshold >= 0.0 && c.ingest.error_threshold <= 1.0, ErrorKind::config,
            "ingest.error_threshold must lie in [0, 1]");
    const auto& d = c.damping;
    require(d.p0_frac >= 0.0, ErrorKind::config, "damping.p0_frac must be >= 0");
    require(d.c_min > 0.0 && d.c_min <= 1.0, ErrorKind::config, "damping.c_min must lie in (0, 1]");
    require(d.rate >= 0.0, ErrorKind::config, "damping.rate must be >= 0");
    require(d.p_hist >= 0.0, ErrorKind::config, "damping.p_hist must be >= 0");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io, "cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::config, "config file " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const RunConfig& c) {
    const auto& g = c.ingest;
    return {{"paths",
             {{"claims", c.paths.claims},
              {"policies", c.paths.policies},
              {"external_forecasts", c.paths.external_forecasts},
              {"output_dir", c.paths.output_dir}}},
            {"ingest",
             {{"claims_date_column", g.claims_date_column},
              {"claims_state_column", g.claims_state_column},
              {"claims_amount_column", g.claims_amount_column},
              {"policy_date_column", g.policy_date_column},
              {"policy_state_column", g.policy_state_column},
              {"policy_premium_column", g.policy_premium_column},
              {"policy_count_column", g.policy_count_column},
              {"jurisdictions", g.jurisdictions},
              {"error_threshold", g.error_threshold}}},
            {"windows",
             {{"panel_start", c.windows.panel_start},
              {"panel_end", c.windows.panel_end},
              {"train_start", c.windows.train_start},
              {"train_end", c.windows.train_end},
              {"risk_split_year", c.windows.risk_split_year},
              {"test_start", c.windows.test_start},
              {"test_end", c.windows.test_end}}},
            {"params",
             {{"gamma1", c.params.gamma1},
              {"gamma2", c.params.gamma2},
              {"gamma2_grid", c.params.gamma2_grid},
              {"gamma3", c.params.gamma3},
              {"gamma4", c.params.gamma4},
              {"delta", c.params.delta},
              {"eps", c.params.eps},
              {"premium_cap", c.params.premium_cap}}},
            {"risk",
             {{"percentiles", c.risk.percentiles},
              {"thresholds", c.risk.thresholds},
              {"horizons", c.risk.horizons},
              {"C_grid", c.risk.c_grid},
              {"folds", c.risk.folds},
              {"max_iter", c.risk.max_iter},
              {"tol", c.risk.tol}}},
            {"damping",
             {{"m_mode", mode_name(c.damping.mode)},
              {"p0_frac", c.damping.p0_frac},
              {"c_min", c.damping.c_min},
              {"rate", c.damping.rate},
              {"p_hist", c.damping.p_hist},
              {"basis", basis_name(c.damping.basis)}}},
            {"seed", c.seed},
            {"workers", c.workers}};
}

std::string config_hash(const RunConfig& c) { return sha256_hex(config_to_json(c).dump()); }

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    const bool ok = EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1;
    require(ok, ErrorKind::numeric, "SHA-256 computation failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::string sha256_file(const std::string& path) { return sha256_hex(csv::read_file(path)); }

PricingParams pricing_params(const RunConfig& c) {
    PricingParams p;
    p.gamma1 = c.params.gamma1;
    p.delta = c.params.delta;
    p.gamma3 = c.params.gamma3;
    p.gamma4 = c.params.gamma4;
    p.eps = c.params.eps;
    p.premium_cap = c.params.premium_cap;
    p.damping = c.damping;
    p.workers = c.workers;
    return p;
}

}  // namespace catpremium::cli
