#pragma once

// Threshold-exceedance risk model: will any of the next K annual losses of a
// state reach theta? Features are the state one-hot code, the current-year
// loss and the five previous years. The classifier is L2-regularized logistic
// regression fitted by damped Newton iterations on standardized features.

#include "catpremium/csv.hpp"
#include "catpremium/data_ingest.hpp"
#include "catpremium/error.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace catpremium {

inline constexpr int kLossLags = 5;

struct RiskRow {
    std::string state;
    int year = 0;  // base year t; features use t and t-1..t-5, the label t+1..t+K
    std::vector<double> features;
    int label = 0;
};

struct RiskDataset {
    std::vector<std::string> states;  // one-hot layout
    Usd theta = 0.0;
    int horizon = 1;
    std::vector<RiskRow> rows;

    std::size_t num_features() const { return states.size() + 1 + kLossLags; }
    std::size_t positives() const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const RiskRow& r) { return r.label; }));
    }
    bool empty() const { return rows.empty(); }
};

inline std::vector<std::string> feature_names(const std::vector<std::string>& states) {
    std::vector<std::string> out;
    for (const auto& s : states) out.push_back("state=" + s);
    out.push_back("loss_t");
    for (int k = 1; k <= kLossLags; ++k) out.push_back("loss_t-" + std::to_string(k));
    return out;
}

/// Features of one state at base year t; nullopt when a lag is outside the
/// panel or missing.
inline std::optional<std::vector<double>> risk_features(const LossPanel& panel, const std::vector<std::string>& layout,
                                                        std::size_t state, int year) {
    if (!panel.covers(year - kLossLags) || !panel.covers(year)) return std::nullopt;
    std::vector<double> f(layout.size() + 1 + kLossLags, 0.0);
    const auto pos = std::find(layout.begin(), layout.end(), panel.states()[state]);
    require(pos != layout.end(), ErrorKind::data, "state " + panel.states()[state] + " is not in the feature layout");
    f[static_cast<std::size_t>(pos - layout.begin())] = 1.0;
    for (int k = 0; k <= kLossLags; ++k) {
        const double v = panel.value(state, year - k);
        if (std::isnan(v)) return std::nullopt;
        f[layout.size() + static_cast<std::size_t>(k)] = v;
    }
    return f;
}

/// Every (state, year) with all lags and K future years present.
inline RiskDataset build_rows(const LossPanel& panel, Usd theta, int K) {
    require(theta > 0.0, ErrorKind::config, "threshold must be positive");
    require(K >= 1, ErrorKind::config, "lookahead K must be at least 1");
    RiskDataset ds;
    ds.states = panel.states();
    ds.theta = theta;
    ds.horizon = K;
    for (std::size_t s = 0; s < panel.num_states(); ++s)
        for (int y = panel.first_year() + kLossLags; y + K <= panel.last_year(); ++y) {
            auto f = risk_features(panel, ds.states, s, y);
            if (!f) continue;
            bool complete = true, hit = false;
            for (int k = 1; k <= K; ++k) {
                const double v = panel.value(s, y + k);
                if (std::isnan(v)) complete = false;
                else if (v >= theta) hit = true;
            }
            if (!complete) continue;
            ds.rows.push_back({panel.states()[s], y, std::move(*f), hit ? 1 : 0});
        }
    return ds;
}

/// Chronological split: base year <= split_year trains, later years test.
inline std::pair<RiskDataset, RiskDataset> build_dataset(const LossPanel& panel, Usd theta, int K, int split_year) {
    auto all = build_rows(panel, theta, K);
    RiskDataset train{all.states, theta, K, {}}, test{all.states, theta, K, {}};
    for (auto& r : all.rows) (r.year <= split_year ? train : test).rows.push_back(std::move(r));
    require(!train.empty(), ErrorKind::data, "risk dataset has no training rows (theta=" + csv::format_number(theta) +
                                                 ", K=" + std::to_string(K) + ")");
    require(!test.empty(), ErrorKind::data,
            "risk dataset has no test rows (theta=" + csv::format_number(theta) + ", K=" + std::to_string(K) + ")");
    return {std::move(train), std::move(test)};
}

/// Percentile with linear interpolation between order statistics:
/// position p/100 * (n-1) in the sorted sample.
inline double percentile(std::vector<double> values, double p) {
    require(!values.empty(), ErrorKind::data, "percentile of an empty sample");
    require(p >= 0.0 && p <= 100.0, ErrorKind::config, "percentile level must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return values[lo] + w * (values[hi] - values[lo]);
}

/// Loss thresholds at the given percentiles of all state-year losses in
/// [first_year, last_year].
inline std::vector<double> default_thresholds(const LossPanel& panel, int first_year, int last_year,
                                              const std::vector<double>& levels = {90.0, 95.0, 99.0}) {
    std::vector<double> flat;
    for (std::size_t s = 0; s < panel.num_states(); ++s)
        for (int y = std::max(first_year, panel.first_year()); y <= std::min(last_year, panel.last_year()); ++y) {
            const double v = panel.value(s, y);
            if (!std::isnan(v)) flat.push_back(v);
        }
    require(!flat.empty(), ErrorKind::data, "threshold window holds no losses");
    std::vector<double> out;
    for (double p : levels) out.push_back(percentile(flat, p));
    return out;
}

namespace detail {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace detail

/// Penalized mean log-loss over standardized features. Parameters are laid
/// out as [w_1..w_d, b]; the intercept is not penalized. C = 0 disables the
/// penalty.
struct LogisticObjective {
    Eigen::MatrixXd Z;  // n x d standardized features
    Eigen::VectorXd y;  // 0/1
    double C = 0.0;

    std::size_t dim() const { return static_cast<std::size_t>(Z.cols()) + 1; }
    double n() const { return static_cast<double>(Z.rows()); }
    double penalty() const { return C > 0.0 ? 1.0 / (2.0 * C * n()) : 0.0; }

    Eigen::VectorXd margins(const Eigen::VectorXd& theta) const {
        const auto d = Z.cols();
        return (Z * theta.head(d)).array() + theta(d);
    }

    double value(const Eigen::VectorXd& theta) const {
        const auto eta = margins(theta);
        double s = 0.0;
        for (Eigen::Index i = 0; i < eta.size(); ++i) s += detail::softplus(eta(i)) - y(i) * eta(i);
        const auto d = Z.cols();
        return s / n() + penalty() * theta.head(d).squaredNorm();
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const {
        const auto d = Z.cols();
        const auto eta = margins(theta);
        Eigen::VectorXd r(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) r(i) = detail::sigmoid(eta(i)) - y(i);
        Eigen::VectorXd g(d + 1);
        g.head(d) = Z.transpose() * r / n() + 2.0 * penalty() * theta.head(d);
        g(d) = r.sum() / n();
        return g;
    }

    Eigen::MatrixXd hessian(const Eigen::VectorXd& theta) const {
        const auto d = Z.cols();
        const auto eta = margins(theta);
        Eigen::MatrixXd X(Z.rows(), d + 1);
        X.leftCols(d) = Z;
        X.col(d).setOnes();
        Eigen::VectorXd w(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            const double p = detail::sigmoid(eta(i));
            w(i) = p * (1.0 - p);
        }
        Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X / n();
        H.topLeftCorner(d, d).diagonal().array() += 2.0 * penalty();
        return H;
    }
};

struct TrainOptions {
    int max_iter = 500;
    double tol = 1e-8;
};

struct RiskModel {
    std::vector<std::string> states;
    Usd theta = 0.0;
    int horizon = 1;
    double C = 0.0;
    std::vector<double> weights;  // on standardized features
    double intercept = 0.0;
    std::vector<double> feature_mean;
    std::vector<double> feature_scale;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    std::vector<double> objective_trace;  // value before the first step and after each step

    std::size_t num_features() const { return weights.size(); }
};

struct Standardizer {
    std::vector<double> mean, scale;
};

inline Standardizer fit_standardizer(const std::vector<std::vector<double>>& X) {
    require(!X.empty(), ErrorKind::data, "cannot standardize an empty design");
    const std::size_t d = X.front().size();
    Standardizer st{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (const auto& x : X)
        for (std::size_t j = 0; j < d; ++j) st.mean[j] += x[j];
    for (auto& m : st.mean) m /= static_cast<double>(X.size());
    for (const auto& x : X)
        for (std::size_t j = 0; j < d; ++j) st.scale[j] += (x[j] - st.mean[j]) * (x[j] - st.mean[j]);
    for (auto& s : st.scale) {
        s = std::sqrt(s / static_cast<double>(X.size()));
        if (!(s > 0.0)) s = 1.0;
    }
    return st;
}

/// Fits on raw feature rows. Throws on single-class labels or non-finite input.
inline RiskModel train_logistic_rows(const std::vector<std::vector<double>>& X, const std::vector<int>& labels,
                                     double C, const TrainOptions& opt = {}) {
    require(!X.empty() && X.size() == labels.size(), ErrorKind::data, "feature and label counts differ or are zero");
    require(C >= 0.0 && std::isfinite(C), ErrorKind::config, "regularization C must be finite and >= 0");
    const std::size_t d = X.front().size();
    std::size_t pos = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        require(X[i].size() == d, ErrorKind::data, "ragged feature rows");
        for (double v : X[i]) require(std::isfinite(v), ErrorKind::data, "non-finite feature value");
        require(labels[i] == 0 || labels[i] == 1, ErrorKind::data, "labels must be 0 or 1");
        pos += static_cast<std::size_t>(labels[i]);
    }
    require(pos > 0 && pos < X.size(), ErrorKind::data, "training labels contain a single class");

    const auto st = fit_standardizer(X);
    LogisticObjective obj;
    obj.C = C;
    obj.Z.resize(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(d));
    obj.y.resize(static_cast<Eigen::Index>(X.size()));
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j)
            obj.Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (X[i][j] - st.mean[j]) / st.scale[j];
        obj.y(static_cast<Eigen::Index>(i)) = labels[i];
    }

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d + 1));
    const double rate = static_cast<double>(pos) / static_cast<double>(X.size());
    theta(static_cast<Eigen::Index>(d)) = std::log(rate / (1.0 - rate));

    RiskModel m;
    m.C = C;
    double f = obj.value(theta);
    m.objective_trace.push_back(f);
    Eigen::VectorXd g = obj.gradient(theta);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= opt.tol) {
            m.converged = true;
            break;
        }
        Eigen::MatrixXd H = obj.hessian(theta);
        // small ridge keeps the system solvable on separable data
        H.diagonal().array() += 1e-10 * (1.0 + H.diagonal().maxCoeff());
        Eigen::VectorXd step = -H.ldlt().solve(g);
        double slope = g.dot(step);
        if (!(slope < 0.0) || !step.allFinite()) {
            step = -g;
            slope = -g.squaredNorm();
        }
        double t = 1.0, fn = f;
        Eigen::VectorXd cand;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            cand = theta + t * step;
            fn = obj.value(cand);
            if (fn <= f + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
        }
        m.iterations = it + 1;
        if (!accepted) break;  // no further decrease attainable in double precision
        theta = cand;
        f = fn;
        g = obj.gradient(theta);
        m.objective_trace.push_back(f);
    }
    if (!m.converged && g.lpNorm<Eigen::Infinity>() <= opt.tol) m.converged = true;
    m.gradient_norm = g.lpNorm<Eigen::Infinity>();
    m.weights.assign(theta.data(), theta.data() + d);
    m.intercept = theta(static_cast<Eigen::Index>(d));
    m.feature_mean = st.mean;
    m.feature_scale = st.scale;
    return m;
}

inline std::vector<std::vector<double>> design(const RiskDataset& ds) {
    std::vector<std::vector<double>> X;
    X.reserve(ds.rows.size());
    for (const auto& r : ds.rows) X.push_back(r.features);
    return X;
}

inline std::vector<int> labels_of(const RiskDataset& ds) {
    std::vector<int> y;
    for (const auto& r : ds.rows) y.push_back(r.label);
    return y;
}

inline RiskModel train_logistic(const RiskDataset& train, double C, const TrainOptions& opt = {}) {
    require(!train.empty(), ErrorKind::data, "empty training set");
    auto m = train_logistic_rows(design(train), labels_of(train), C, opt);
    m.states = train.states;
    m.theta = train.theta;
    m.horizon = train.horizon;
    return m;
}

inline double predict_proba(const RiskModel& m, const std::vector<double>& x) {
    require(x.size() == m.weights.size(), ErrorKind::data,
            "feature length " + std::to_string(x.size()) + " does not match model (" + std::to_string(m.weights.size()) +
                ")");
    double z = m.intercept;
    for (std::size_t j = 0; j < x.size(); ++j) z += m.weights[j] * (x[j] - m.feature_mean[j]) / m.feature_scale[j];
    return detail::sigmoid(z);
}

inline std::vector<double> predict_all(const RiskModel& m, const RiskDataset& ds) {
    std::vector<double> p;
    for (const auto& r : ds.rows) p.push_back(predict_proba(m, r.features));
    return p;
}

struct ClassifierMetrics {
    double auc = 0.0;
    double f1 = 0.0;
    double accu = 0.0;
    double accu_bl = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    bool precision_defined = true;  // false when nothing was predicted positive
};

/// Mann-Whitney AUC with average ranks for ties.
inline double auc_score(const std::vector<double>& prob, const std::vector<int>& labels) {
    require(prob.size() == labels.size(), ErrorKind::data, "probability and label counts differ");
    const std::size_t n = prob.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prob[a] < prob[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && prob[order[j + 1]] == prob[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    double npos = 0.0, rsum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i]) {
            npos += 1.0;
            rsum += rank[i];
        }
    const double nneg = static_cast<double>(n) - npos;
    require(npos > 0.0 && nneg > 0.0, ErrorKind::data, "AUC undefined for single-class labels");
    return (rsum - npos * (npos + 1.0) / 2.0) / (npos * nneg);
}

inline ClassifierMetrics evaluate_classifier(const std::vector<double>& prob, const std::vector<int>& labels,
                                             double cutoff = 0.5) {
    require(prob.size() == labels.size() && !prob.empty(), ErrorKind::data, "probability and label counts differ");
    for (int l : labels) require(l == 0 || l == 1, ErrorKind::data, "labels must be 0 or 1");
    ClassifierMetrics m;
    m.auc = auc_score(prob, labels);
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const bool pred = prob[i] >= cutoff;
        if (pred && labels[i]) ++tp;
        else if (pred) ++fp;
        else if (labels[i]) ++fn;
        else ++tn;
    }
    m.precision_defined = tp + fp > 0;
    m.precision = m.precision_defined ? tp / (tp + fp) : 0.0;
    m.recall = tp / (tp + fn);
    m.f1 = (m.precision + m.recall > 0.0) ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    m.accu = (tp + tn) / static_cast<double>(prob.size());
    m.accu_bl = 0.5 * (tp / (tp + fn) + tn / (tn + fp));
    return m;
}

/// Stratified fold assignment: positives and negatives are shuffled separately
/// and dealt round-robin.
inline std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
    require(folds >= 2, ErrorKind::config, "cross-validation needs at least 2 folds");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    std::mt19937_64 rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::vector<int> fold(labels.size(), 0);
    std::size_t k = 0;
    for (auto i : pos) fold[i] = static_cast<int>(k++ % static_cast<std::size_t>(folds));
    for (auto i : neg) fold[i] = static_cast<int>(k++ % static_cast<std::size_t>(folds));
    return fold;
}

struct CvResult {
    double best_C = 0.0;
    std::vector<double> grid;
    std::vector<double> mean_auc;      // NaN when every fold was excluded
    std::vector<int> folds_used;
};

inline CvResult cross_validate_rows(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                                    const std::vector<double>& grid, int folds, std::uint64_t seed,
                                    const TrainOptions& opt = {}) {
    require(!grid.empty(), ErrorKind::config, "regularization grid is empty");
    const auto fold = stratified_folds(y, folds, seed);
    CvResult cv;
    cv.grid = grid;
    for (double C : grid) {
        double sum = 0.0;
        int used = 0;
        for (int f = 0; f < folds; ++f) {
            std::vector<std::vector<double>> Xt, Xv;
            std::vector<int> yt, yv;
            for (std::size_t i = 0; i < X.size(); ++i) {
                if (fold[i] == f) {
                    Xv.push_back(X[i]);
                    yv.push_back(y[i]);
                } else {
                    Xt.push_back(X[i]);
                    yt.push_back(y[i]);
                }
            }
            const auto pv = std::count(yv.begin(), yv.end(), 1), pt = std::count(yt.begin(), yt.end(), 1);
            if (pv == 0 || pv == static_cast<long>(yv.size()) || pt == 0 || pt == static_cast<long>(yt.size()))
                continue;
            const auto m = train_logistic_rows(Xt, yt, C, opt);
            std::vector<double> p;
            for (const auto& x : Xv) p.push_back(predict_proba(m, x));
            sum += auc_score(p, yv);
            ++used;
        }
        cv.folds_used.push_back(used);
        cv.mean_auc.push_back(used ? sum / used : std::numeric_limits<double>::quiet_NaN());
    }
    int best = -1;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (std::isnan(cv.mean_auc[k])) continue;
        const auto b = static_cast<std::size_t>(best);
        if (best < 0 || cv.mean_auc[k] > cv.mean_auc[b] + 1e-12 ||
            (std::abs(cv.mean_auc[k] - cv.mean_auc[b]) <= 1e-12 && grid[k] < grid[b]))
            best = static_cast<int>(k);
    }
    require(best >= 0, ErrorKind::data, "every cross-validation fold had a single class");
    cv.best_C = grid[static_cast<std::size_t>(best)];
    return cv;
}

inline CvResult cross_validate(const RiskDataset& train, const std::vector<double>& grid, int folds,
                               std::uint64_t seed, const TrainOptions& opt = {}) {
    return cross_validate_rows(design(train), labels_of(train), grid, folds, seed, opt);
}

struct RiskForecast {
    std::string state;
    int base_year = 0;
    int horizon = 1;
    Usd theta = 0.0;
    double probability = 0.0;
};

/// q_{i,k} for every model state observed in the panel at base_year.
inline std::vector<RiskForecast> forecast(const RiskModel& m, const LossPanel& panel, int base_year) {
    std::vector<RiskForecast> out;
    for (std::size_t s = 0; s < panel.num_states(); ++s) {
        if (std::find(m.states.begin(), m.states.end(), panel.states()[s]) == m.states.end()) continue;
        auto f = risk_features(panel, m.states, s, base_year);
        require(f.has_value(), ErrorKind::data,
                panel.states()[s] + ": lag losses unavailable for base year " + std::to_string(base_year));
        out.push_back({panel.states()[s], base_year, m.horizon, m.theta, predict_proba(m, *f)});
    }
    return out;
}

/// CSV columns: state,base_year,horizon,threshold,probability
inline std::string forecasts_to_csv(const std::vector<RiskForecast>& fs) {
    csv::Writer w({"state", "base_year", "horizon", "threshold", "probability"});
    for (const auto& f : fs)
        w.row({f.state, std::to_string(f.base_year), std::to_string(f.horizon), csv::format_number(f.theta),
               csv::format_number(f.probability)});
    return w.str();
}

/// Reads forecasts produced elsewhere. An empty file gives an empty list.
inline std::vector<RiskForecast> load_external_predictions(const std::string& path) {
    csv::Reader reader(path);
    std::vector<RiskForecast> out;
    if (!reader.has_header()) return out;
    const auto cs = reader.require_column("state"), cb = reader.require_column("base_year"),
               ch = reader.require_column("horizon"), ct = reader.require_column("threshold"),
               cp = reader.require_column("probability");
    std::vector<std::string> f;
    while (reader.next(f)) {
        const auto where = path + " line " + std::to_string(reader.line_number());
        const std::string st(csv::trim(csv::field_or_empty(f, cs)));
        auto b = csv::parse_int(csv::field_or_empty(f, cb));
        auto h = csv::parse_int(csv::field_or_empty(f, ch));
        auto t = csv::parse_double(csv::field_or_empty(f, ct));
        auto p = csv::parse_double(csv::field_or_empty(f, cp));
        require(!st.empty() && b && h && t && p, ErrorKind::data, "malformed forecast row at " + where);
        require(*h >= 1, ErrorKind::data, "forecast horizon must be >= 1 at " + where);
        require(*t > 0.0, ErrorKind::data, "forecast threshold must be positive at " + where);
        require(*p >= 0.0 && *p <= 1.0, ErrorKind::data, "forecast probability outside [0,1] at " + where);
        out.push_back({st, static_cast<int>(*b), static_cast<int>(*h), *t, *p});
    }
    return out;
}

inline nlohmann::json metrics_to_json(const ClassifierMetrics& m) {
    return {{"auc", m.auc},           {"f1", m.f1},         {"accu", m.accu},
            {"accu_bl", m.accu_bl},   {"precision", m.precision}, {"recall", m.recall},
            {"precision_defined", m.precision_defined}};
}

inline nlohmann::json model_to_json(const RiskModel& m) {
    return {{"states", m.states},
            {"features", feature_names(m.states)},
            {"theta", m.theta},
            {"horizon", m.horizon},
            {"C", m.C},
            {"weights", m.weights},
            {"intercept", m.intercept},
            {"feature_mean", m.feature_mean},
            {"feature_scale", m.feature_scale},
            {"converged", m.converged},
            {"iterations", m.iterations},
            {"gradient_norm", m.gradient_norm}};
}

inline RiskModel model_from_json(const nlohmann::json& j) {
    RiskModel m;
    try {
        m.states = j.at("states").get<std::vector<std::string>>();
        m.theta = j.at("theta").get<double>();
        m.horizon = j.at("horizon").get<int>();
        m.C = j.at("C").get<double>();
        m.weights = j.at("weights").get<std::vector<double>>();
        m.intercept = j.at("intercept").get<double>();
        m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
        m.feature_scale = j.at("feature_scale").get<std::vector<double>>();
        m.converged = j.value("converged", false);
        m.iterations = j.value("iterations", 0);
        m.gradient_norm = j.value("gradient_norm", 0.0);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::data, std::string("malformed risk model: ") + e.what());
    }
    require(m.weights.size() == m.feature_mean.size() && m.weights.size() == m.feature_scale.size() &&
                m.weights.size() == m.states.size() + 1 + kLossLags,
            ErrorKind::data, "risk model feature layout is inconsistent");
    for (double s : m.feature_scale) require(s > 0.0, ErrorKind::data, "risk model scale must be positive");
    return m;
}

}  // namespace catpremium
