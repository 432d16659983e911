#include "catpremium/risk_model.hpp"
#include "temp_dir.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

using namespace catpremium;
using Catch::Approx;

namespace {

LossPanel one_state(const std::vector<double>& v) {
    LossPanel p({"LA"}, 2000, 2000 + static_cast<int>(v.size()) - 1);
    for (std::size_t t = 0; t < v.size(); ++t) p.at(0, t) = v[t];
    return p;
}

LossPanel random_panel(std::mt19937_64& rng, std::size_t states, int years) {
    std::vector<std::string> names;
    for (std::size_t s = 0; s < states; ++s) names.push_back("S" + std::to_string(s));
    LossPanel p(names, 1980, 1980 + years - 1);
    std::lognormal_distribution<double> ln(10.0, 1.5);
    for (std::size_t s = 0; s < states; ++s)
        for (std::size_t t = 0; t < static_cast<std::size_t>(years); ++t) p.at(s, t) = ln(rng);
    return p;
}

// central differences, step scaled to the coordinate
Eigen::VectorXd fd_gradient(const LogisticObjective& obj, Eigen::VectorXd x) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = 1e-5 * (1.0 + std::abs(x(j)));
        const double keep = x(j);
        x(j) = keep + h;
        const double fp = obj.value(x);
        x(j) = keep - h;
        const double fm = obj.value(x);
        x(j) = keep;
        g(j) = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("dataset: lookahead beyond the panel drops the row") {
    CHECK(build_rows(one_state({5, 5, 5, 5, 5, 100, 5}), 50.0, 2).empty());
    const auto ds = build_rows(one_state({5, 5, 5, 5, 5, 5, 100, 5}), 50.0, 2);
    REQUIRE(ds.rows.size() == 1);
    CHECK(ds.rows[0].year == 2005);
    CHECK(ds.rows[0].label == 1);
    CHECK(ds.rows[0].features.size() == ds.num_features());
    CHECK(ds.rows[0].features[0] == 1.0);
    CHECK(ds.rows[0].features[1] == 5.0);
}

TEST_CASE("dataset: threshold above every loss gives all-zero labels") {
    std::mt19937_64 rng(2);
    const auto panel = random_panel(rng, 4, 30);
    const auto ds = build_rows(panel, 1e30, 3);
    CHECK_FALSE(ds.empty());
    CHECK(ds.positives() == 0);
}

TEST_CASE("dataset: chronological split") {
    std::mt19937_64 rng(3);
    const auto panel = random_panel(rng, 3, 40);
    const auto [train, test] = build_dataset(panel, 50000.0, 3, 2005);
    for (const auto& r : train.rows) CHECK(r.year <= 2005);
    for (const auto& r : test.rows) CHECK(r.year > 2005);
    CHECK(train.rows.size() + test.rows.size() == build_rows(panel, 50000.0, 3).rows.size());
    CHECK_THROWS_AS(build_dataset(panel, 50000.0, 3, 1900), Error);
    CHECK_THROWS_AS(build_rows(panel, 0.0, 3), Error);
    CHECK_THROWS_AS(build_rows(panel, 1.0, 0), Error);
}

TEST_CASE("dataset: labels monotone in threshold and horizon") {
    std::mt19937_64 rng(4);
    const auto panel = random_panel(rng, 5, 35);
    auto key = [](const RiskRow& r) { return r.state + ":" + std::to_string(r.year); };
    for (int K : {1, 3, 5}) {
        for (double theta : {1e4, 5e4, 2e5}) {
            std::map<std::string, int> low, high, longer;
            for (const auto& r : build_rows(panel, theta, K).rows) low[key(r)] = r.label;
            for (const auto& r : build_rows(panel, theta * 2.0, K).rows) high[key(r)] = r.label;
            for (const auto& r : build_rows(panel, theta, K + 2).rows) longer[key(r)] = r.label;
            CHECK(low.size() == high.size());
            for (const auto& [k, l] : high) CHECK(l <= low.at(k));
            for (const auto& [k, l] : longer) {
                REQUIRE(low.count(k));
                CHECK(l >= low.at(k));
            }
        }
    }
}

TEST_CASE("thresholds: linear-interpolation percentile") {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    CHECK(percentile(v, 90.0) == Approx(90.1));
    CHECK(percentile(v, 0.0) == 1.0);
    CHECK(percentile(v, 100.0) == 100.0);
    CHECK(percentile({7.0}, 95.0) == 7.0);
    CHECK_THROWS_AS(percentile({}, 50.0), Error);

    LossPanel flat({"A", "B"}, 2000, 2004);
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t t = 0; t < 5; ++t) flat.at(s, t) = 42.0;
    for (double th : default_thresholds(flat, 2000, 2004)) CHECK(th == 42.0);
}

TEST_CASE("logistic: separable data saturates") {
    const std::vector<std::vector<double>> X{{-1.0}, {1.0}};
    const auto m = train_logistic_rows(X, {0, 1}, 0.0);
    CHECK(predict_proba(m, {-1.0}) < 0.01);
    CHECK(predict_proba(m, {1.0}) > 0.99);
}

TEST_CASE("logistic: constant features fit the base rate") {
    const std::vector<std::vector<double>> X(8, std::vector<double>{3.0, -2.0});
    const auto m = train_logistic_rows(X, {1, 0, 0, 0, 1, 0, 0, 0}, 1.0);
    for (double w : m.weights) CHECK(w == Approx(0.0).margin(1e-9));
    CHECK(m.intercept == Approx(std::log(0.25 / 0.75)).margin(1e-9));
    for (double s : m.feature_scale) CHECK(s == 1.0);
}

TEST_CASE("logistic: analytic gradient matches finite differences") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    for (double C : {0.0, 0.2, 1.0}) {
        LogisticObjective obj;
        obj.C = C;
        obj.Z.resize(40, 4);
        obj.y.resize(40);
        for (int i = 0; i < 40; ++i) {
            for (int j = 0; j < 4; ++j) obj.Z(i, j) = nd(rng);
            obj.y(i) = (obj.Z(i, 0) + 0.5 * nd(rng) > 0) ? 1.0 : 0.0;
        }
        for (int k = 0; k < 20; ++k) {
            Eigen::VectorXd x(5);
            for (int j = 0; j < 5; ++j) x(j) = 2.0 * nd(rng);
            const auto g = obj.gradient(x);
            const auto f = fd_gradient(obj, x);
            CHECK((g - f).lpNorm<Eigen::Infinity>() <= 1e-5 * std::max(1.0, g.lpNorm<Eigen::Infinity>()));
        }
    }
}

TEST_CASE("logistic: trained model converges with a monotone trace") {
    std::mt19937_64 rng(12);
    const auto panel = random_panel(rng, 6, 40);
    const auto ds = build_rows(panel, 60000.0, 3);
    REQUIRE(ds.positives() > 0);
    REQUIRE(ds.positives() < ds.rows.size());
    for (double C : {0.2, 1.0}) {
        const auto m = train_logistic(ds, C);
        CHECK(m.converged);
        CHECK(m.gradient_norm <= 1e-8);
        REQUIRE(m.objective_trace.size() >= 2);
        for (std::size_t i = 1; i < m.objective_trace.size(); ++i)
            CHECK(m.objective_trace[i] <= m.objective_trace[i - 1] + 1e-15);
        for (double p : predict_all(m, ds)) {
            CHECK(p > 0.0);
            CHECK(p < 1.0);
        }
    }
}

TEST_CASE("logistic: invalid inputs") {
    CHECK_THROWS_AS(train_logistic_rows({{1.0}, {2.0}}, {1, 1}, 1.0), Error);
    CHECK_THROWS_AS(train_logistic_rows({{1.0}, {NAN}}, {0, 1}, 1.0), Error);
    CHECK_THROWS_AS(train_logistic_rows({{1.0}, {2.0}}, {0, 1}, -1.0), Error);
}

TEST_CASE("predict: neutral and saturated models") {
    RiskModel m;
    m.weights = {0.0, 0.0};
    m.feature_mean = {0.0, 0.0};
    m.feature_scale = {1.0, 1.0};
    CHECK(predict_proba(m, {3.0, 4.0}) == 0.5);
    m.intercept = 1e3;
    CHECK(std::abs(predict_proba(m, {3.0, 4.0}) - 1.0) <= 1e-300);
    CHECK_THROWS_AS(predict_proba(m, {1.0}), Error);
}

TEST_CASE("metrics: worked examples") {
    auto m = evaluate_classifier({0.9, 0.1, 0.8, 0.4}, {1, 0, 1, 0});
    CHECK(m.auc == 1.0);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
    CHECK(m.accu == 1.0);
    CHECK(m.accu_bl == 1.0);
    CHECK(auc_score({0.1, 0.9}, {1, 0}) == 0.0);
    CHECK(auc_score({0.5, 0.5, 0.5, 0.5}, {1, 1, 0, 0}) == 0.5);
    CHECK_THROWS_AS(auc_score({0.1, 0.2}, {1, 1}), Error);

    m = evaluate_classifier({0.1, 0.2, 0.3}, {1, 0, 0});
    CHECK_FALSE(m.precision_defined);
    CHECK(m.precision == 0.0);
    CHECK(m.accu_bl == 0.5);
}

TEST_CASE("metrics: AUC invariant under increasing transforms") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> p(30);
        std::vector<int> y(30);
        for (std::size_t i = 0; i < 30; ++i) {
            p[i] = std::round(u(rng) * 10.0) / 10.0;
            y[i] = i % 3 == 0 ? 1 : static_cast<int>(rng() % 2);
        }
        y[1] = 0;
        std::vector<double> q;
        for (double v : p) q.push_back(std::pow(v, 3.0) + 2.0);
        CHECK(auc_score(q, y) == Approx(auc_score(p, y)).epsilon(1e-14));
        const auto m = evaluate_classifier(p, y);
        for (double v : {m.auc, m.f1, m.accu, m.accu_bl, m.precision, m.recall}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("cv: stratified folds keep both classes") {
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) y.push_back(i < 9 ? 1 : 0);
    const auto f = stratified_folds(y, 3, 7);
    CHECK(f == stratified_folds(y, 3, 7));
    for (int k = 0; k < 3; ++k) {
        int pos = 0, n = 0;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (f[i] == k) {
                ++n;
                pos += y[i];
            }
        CHECK(n == 10);
        CHECK(pos == 3);
    }
}

TEST_CASE("cv: singleton grid, ties and separable data") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 12; ++i) {
        X.push_back({i < 6 ? -1.0 - i : 1.0 + i});
        y.push_back(i < 6 ? 0 : 1);
    }
    auto cv = cross_validate_rows(X, y, {0.2}, 3, 1);
    CHECK(cv.best_C == 0.2);
    CHECK(cv.mean_auc[0] == 1.0);

    // constant features score 0.5 for every C, so the tie goes to the smaller one
    const std::vector<std::vector<double>> flat(12, std::vector<double>{1.0});
    cv = cross_validate_rows(flat, y, {0.8, 0.4}, 3, 1);
    CHECK(cv.mean_auc[0] == cv.mean_auc[1]);
    CHECK(cv.best_C == 0.4);

    cv = cross_validate_rows(X, y, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, 3, 5);
    for (std::size_t k = 0; k < cv.grid.size(); ++k) CHECK(cv.mean_auc[k] == 1.0);
    CHECK(cv.best_C == 0.0);
    CHECK_THROWS_AS(cross_validate_rows(X, y, {}, 3, 1), Error);
}

TEST_CASE("forecasts: external file loading") {
    TempDir dir;
    const std::string header = "state,base_year,horizon,threshold,probability\n";
    auto fs = load_external_predictions(dir.write("ok.csv", header + "LA,2016,5,18558788,0.8\n"));
    REQUIRE(fs.size() == 1);
    CHECK(fs[0].state == "LA");
    CHECK(fs[0].horizon == 5);
    CHECK(fs[0].probability == 0.8);
    CHECK_THROWS_AS(load_external_predictions(dir.write("bad.csv", header + "LA,2016,5,18558788,1.2\n")), Error);
    CHECK(load_external_predictions(dir.write("empty.csv", "")).empty());
    CHECK(load_external_predictions(dir.write("hdr.csv", header)).empty());
}

TEST_CASE("forecasts: round trip through CSV and model JSON") {
    std::mt19937_64 rng(30);
    const auto panel = random_panel(rng, 3, 30);
    const auto ds = build_rows(panel, 40000.0, 3);
    const auto m = train_logistic(ds, 0.6);
    const auto back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
    for (const auto& r : ds.rows) CHECK(predict_proba(back, r.features) == predict_proba(m, r.features));

    const auto fc = forecast(m, panel, 2009);
    REQUIRE(fc.size() == 3);
    TempDir dir;
    const auto loaded = load_external_predictions(dir.write("f.csv", forecasts_to_csv(fc)));
    REQUIRE(loaded.size() == fc.size());
    for (std::size_t i = 0; i < fc.size(); ++i) {
        CHECK(loaded[i].probability == fc[i].probability);
        CHECK(loaded[i].theta == fc[i].theta);
        CHECK(loaded[i].base_year == 2009);
    }
    CHECK_THROWS_AS(forecast(m, panel, 1981), Error);
    CHECK_THROWS_AS(model_from_json(nlohmann::json{{"states", {"LA"}}}), Error);
}
