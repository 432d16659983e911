#pragma once

#include "catpremium/data_ingest.hpp"
#include "catpremium/pipeline.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace catpremium::cli {

struct Paths {
    std::string claims;
    std::string policies;
    std::string external_forecasts;
    std::string output_dir = "out";
};

struct Windows {
    int panel_start = 1975;
    int panel_end = 2022;
    int train_start = 1975;  // loss statistics and risk thresholds
    int train_end = 2012;
    int risk_split_year = 2011;  // last base year used to fit the risk model
    int test_start = 2013;
    int test_end = 2022;
};

struct Params {
    double gamma1 = 50000.0;
    double gamma2 = 1.0;
    std::vector<double> gamma2_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
    double gamma3 = 50000.0;
    double gamma4 = 1.0;
    double delta = 10000.0;
    double eps = 0.1;
    double premium_cap = 0.0;
};

struct RiskSettings {
    std::vector<double> percentiles{90.0, 95.0, 99.0};
    std::vector<double> thresholds;  // explicit USD values; replace percentiles when set
    std::vector<int> horizons{3, 5, 10};
    std::vector<double> c_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    int folds = 3;
    int max_iter = 500;
    double tol = 1e-8;
};

struct RunConfig {
    Paths paths;
    IngestConfig ingest;
    Windows windows;
    Params params;
    RiskSettings risk;
    DampingSettings damping;
    std::uint64_t seed = 42;
    unsigned workers = 0;
};

/// Parses and validates a config document. Absent keys keep their defaults;
/// unknown keys are errors.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& c);
void validate(const RunConfig& c);

/// SHA-256 of the canonical JSON form of the effective config.
std::string config_hash(const RunConfig& c);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

PricingParams pricing_params(const RunConfig& c);

}  // namespace catpremium::cli
