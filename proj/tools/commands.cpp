#include "commands.hpp"

#include "catpremium/csv.hpp"
#include "catpremium/evaluation.hpp"
#include "catpremium/parallel.hpp"
#include "catpremium/risk_model.hpp"

#include <filesystem>
#include <ostream>

namespace catpremium::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Writes artifacts into the output directory and records their checksums.
class Manifest {
public:
    Manifest(const RunConfig& c, const std::string& command) : dir_(c.paths.output_dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        require(!ec, ErrorKind::io, "cannot create output directory " + dir_.string() + ": " + ec.message());
        doc_["command"] = command;
        doc_["config_hash"] = config_hash(c);
        doc_["seed"] = c.seed;
        doc_["inputs"] = json::array();
        doc_["artifacts"] = json::array();
        doc_["warnings"] = json::array();
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void input(const std::string& p) { doc_["inputs"].push_back({{"path", p}, {"sha256", sha256_file(p)}}); }

    void artifact(const std::string& name, const std::string& contents) {
        csv::write_file(path(name), contents);
        doc_["artifacts"].push_back({{"file", name}, {"sha256", sha256_hex(contents)}});
    }

    void warn(const std::string& w) { doc_["warnings"].push_back(w); }
    json& doc() { return doc_; }

    void write(const std::string& name) { csv::write_file(path(name), doc_.dump(2) + "\n"); }

private:
    fs::path dir_;
    json doc_;
};

std::string artifact_path(const RunConfig& c, const std::string& name) {
    return (fs::path(c.paths.output_dir) / name).string();
}

bool exists(const std::string& p) {
    std::error_code ec;
    return fs::is_regular_file(p, ec);
}

json report_json(const ParseReport& r) {
    return {{"rows_read", r.rows_read},
            {"kept", r.kept},
            {"dropped_missing_amount", r.dropped_missing_amount},
            {"dropped_jurisdiction", r.dropped_jurisdiction},
            {"row_errors", r.errors.size()}};
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    return (kind == ErrorKind::infeasible || kind == ErrorKind::numeric) ? kInfeasible : kConfigOrIo;
}

PricingInputs load_inputs(const RunConfig& c) {
    PricingInputs in;
    const auto stats = artifact_path(c, "stats.csv");
    require(exists(stats), ErrorKind::io, "missing " + stats + " (run ingest first)");
    in.stats = read_stats_csv(stats);
    if (const auto p = artifact_path(c, "panel.csv"); exists(p)) in.panel = read_panel_csv(p);
    if (const auto p = artifact_path(c, "policies.csv"); exists(p)) in.policies = read_policies_csv(p);
    if (!c.paths.external_forecasts.empty()) {
        require(exists(c.paths.external_forecasts), ErrorKind::io,
                "paths.external_forecasts not found: " + c.paths.external_forecasts);
        in.forecasts = load_external_predictions(c.paths.external_forecasts);
    } else if (const auto p = artifact_path(c, "forecasts.csv"); exists(p)) {
        in.forecasts = load_external_predictions(p);
    }
    in.test_start = c.windows.test_start;
    in.test_end = c.windows.test_end;
    return in;
}

int cmd_ingest(const RunConfig& c, std::ostream& out) {
    require(!c.paths.claims.empty(), ErrorKind::config, "config key paths.claims is required for ingest");
    require(exists(c.paths.claims), ErrorKind::io, "paths.claims not found: " + c.paths.claims);
    Manifest m(c, "ingest");
    m.input(c.paths.claims);

    const auto claims = parse_claims(c.paths.claims, c.ingest);
    const auto raw = aggregate_state_year(claims.records, c.windows.panel_start, c.windows.panel_end);
    const auto panel = interpolate_missing(raw);
    const auto stats = compute_stats(panel, c.windows.train_start, c.windows.train_end);
    m.doc()["claims_report"] = report_json(claims.report);
    m.doc()["windows"] = {{"panel", {c.windows.panel_start, c.windows.panel_end}},
                          {"stats", {c.windows.train_start, c.windows.train_end}}};
    m.artifact("panel_raw.csv", panel_to_csv(raw));
    m.artifact("panel.csv", panel_to_csv(panel));
    m.artifact("stats.csv", stats_to_csv(stats));
    for (const auto& e : claims.report.errors) m.warn("claims line " + std::to_string(e.line) + ": " + e.message);

    if (!c.paths.policies.empty()) {
        require(exists(c.paths.policies), ErrorKind::io, "paths.policies not found: " + c.paths.policies);
        m.input(c.paths.policies);
        const auto pol = parse_policies(c.paths.policies, c.ingest);
        m.doc()["policies_report"] = report_json(pol.report);
        m.artifact("policies.csv", policies_to_csv(pol.panel));
        for (const auto& e : pol.report.errors) m.warn("policies line " + std::to_string(e.line) + ": " + e.message);
    }
    m.write("ingest_manifest.json");
    out << "ingest: " << claims.records.size() << " claims, " << panel.num_states() << " states, "
        << panel.first_year() << "-" << panel.last_year() << " -> " << c.paths.output_dir << "\n";
    return kOk;
}

int cmd_train_risk(const RunConfig& c, std::ostream& out) {
    const auto panel_path = artifact_path(c, "panel.csv");
    require(exists(panel_path), ErrorKind::io, "missing " + panel_path + " (run ingest first)");
    const auto panel = read_panel_csv(panel_path);
    Manifest m(c, "train-risk");
    m.input(panel_path);

    struct Job {
        double theta;
        std::string label;
        int K;
        json result;
        std::vector<RiskForecast> forecasts;
        std::vector<std::pair<RiskRow, double>> test_pred;
    };
    std::vector<std::pair<double, std::string>> thetas;
    if (!c.risk.thresholds.empty()) {
        for (double t : c.risk.thresholds) thetas.emplace_back(t, "explicit");
    } else {
        const auto vals = default_thresholds(panel, c.windows.train_start, c.windows.risk_split_year, c.risk.percentiles);
        for (std::size_t i = 0; i < vals.size(); ++i)
            thetas.emplace_back(vals[i], "p" + csv::format_number(c.risk.percentiles[i]));
    }
    std::vector<Job> jobs;
    for (const auto& [t, l] : thetas)
        for (int K : c.risk.horizons) jobs.push_back({t, l, K, {}, {}, {}});

    const TrainOptions opt{c.risk.max_iter, c.risk.tol};
    const int base_year = c.windows.test_start - 1;
    parallel_for(
        jobs.size(),
        [&](std::size_t i) {
            auto& job = jobs[i];
            auto& r = job.result;
            r = {{"threshold", job.theta}, {"threshold_source", job.label}, {"horizon", job.K}};
            try {
                auto [train, test] = build_dataset(panel, job.theta, job.K, c.windows.risk_split_year);
                r["train_rows"] = train.rows.size();
                r["train_positives"] = train.positives();
                r["test_rows"] = test.rows.size();
                r["test_positives"] = test.positives();
                require(train.positives() > 0 && train.positives() < train.rows.size(), ErrorKind::data,
                        "training labels contain a single class");
                const auto cv = cross_validate(train, c.risk.c_grid, c.risk.folds, c.seed, opt);
                json cvj = json::array();
                for (std::size_t k = 0; k < cv.grid.size(); ++k)
                    cvj.push_back({{"C", cv.grid[k]},
                                   {"mean_auc", std::isnan(cv.mean_auc[k]) ? json(nullptr) : json(cv.mean_auc[k])},
                                   {"folds_used", cv.folds_used[k]}});
                r["cv"] = cvj;
                r["best_C"] = cv.best_C;
                const auto model = train_logistic(train, cv.best_C, opt);
                r["model"] = model_to_json(model);
                const auto prob = predict_all(model, test);
                for (std::size_t k = 0; k < prob.size(); ++k) job.test_pred.emplace_back(test.rows[k], prob[k]);
                const auto pos = test.positives();
                if (pos > 0 && pos < test.rows.size()) r["metrics"] = metrics_to_json(evaluate_classifier(prob, labels_of(test)));
                else r["metrics_note"] = "test labels contain a single class; metrics undefined";
                job.forecasts = forecast(model, panel, base_year);
                r["status"] = "ok";
            } catch (const Error& e) {
                r["status"] = "skipped";
                r["reason"] = e.what();
            }
        },
        c.workers);

    json runs = json::array();
    std::vector<RiskForecast> all;
    csv::Writer preds({"state", "base_year", "horizon", "threshold", "probability", "label"});
    std::size_t ok = 0;
    for (auto& job : jobs) {
        if (job.result["status"] == "ok") ++ok;
        else m.warn("theta=" + csv::format_number(job.theta) + " K=" + std::to_string(job.K) +
                    " skipped: " + job.result["reason"].get<std::string>());
        runs.push_back(job.result);
        for (auto& f : job.forecasts) all.push_back(f);
        for (const auto& [row, p] : job.test_pred)
            preds.row({row.state, std::to_string(row.year), std::to_string(job.K), csv::format_number(job.theta),
                       csv::format_number(p), std::to_string(row.label)});
    }
    m.artifact("risk_metrics.json", json{{"base_year", base_year}, {"runs", runs}}.dump(2) + "\n");
    m.artifact("risk_test_predictions.csv", preds.str());
    m.artifact("forecasts.csv", forecasts_to_csv(all));
    m.write("train_risk_manifest.json");
    out << "train-risk: " << ok << " of " << jobs.size() << " (threshold, horizon) models trained, " << all.size()
        << " forecasts for base year " << base_year << "\n";
    return kOk;
}

int cmd_price(const RunConfig& c, Scheme scheme, std::ostream& out) {
    const auto in = load_inputs(c);
    Manifest m(c, std::string("price ") + to_string(scheme));
    m.input(artifact_path(c, "stats.csv"));
    const auto res = price_scheme(in, pricing_params(c), scheme, c.params.gamma2);
    const std::string tag = to_string(scheme);
    m.artifact("schedule_" + tag + ".csv", schedule_to_csv(res.schedule));
    if (!res.clt.empty() || !res.ml.empty()) m.artifact("bounds_" + tag + ".csv", bounds_to_csv(res.clt, res.ml));
    for (const auto& w : res.schedule.warnings) m.warn(w);

    int code = kOk;
    if (scheme == Scheme::aro) {
        m.artifact("aro_policy.csv", policies_to_csv(res.aro));
        const auto audit = audit_to_json(res.aro);
        m.artifact("aro_audit.json", audit.dump(2) + "\n");
        if (!audit["passed"].get<bool>()) {
            m.warn("ARO duality audit failed; see aro_audit.json");
            code = kInfeasible;
        }
    }
    if (in.panel && in.panel->covers(in.test_start) && in.panel->covers(in.test_end)) {
        const auto rep = backtest(res.schedule, *in.panel, in.test_start, in.test_end);
        m.artifact("backtest_" + tag + ".csv", backtest_to_csv(rep));
        m.doc()["backtest"] = {{"surplus", rep.surplus},
                               {"abs_deviation", rep.abs_deviation},
                               {"insolvent_count", rep.insolvent_count},
                               {"states", rep.states.size()}};
        out << "price " << tag << ": " << rep.states.size() << " states, S=" << csv::format_number(rep.surplus)
            << ", AD=" << csv::format_number(rep.abs_deviation) << ", insolvent=" << rep.insolvent_count << "\n";
    } else {
        m.warn("no realized losses for the test window; backtest skipped");
        out << "price " << tag << ": " << res.schedule.states.size() << " states priced\n";
    }
    m.write("price_" + tag + "_manifest.json");
    return code;
}

int cmd_sweep(const RunConfig& c, const std::vector<Scheme>& schemes, std::ostream& out) {
    const auto in = load_inputs(c);
    require(in.panel.has_value(), ErrorKind::io, "sweep needs " + artifact_path(c, "panel.csv") + " (run ingest first)");
    std::vector<Scheme> list = schemes;
    if (list.empty()) list = {Scheme::nominal, Scheme::ro1, Scheme::ro2, Scheme::aro, Scheme::cma, Scheme::hist};
    auto params = pricing_params(c);
    params.workers = 1;  // cells already run in parallel
    const SchedulePricer price = [&](Scheme s, double g) { return price_scheme(in, params, s, g).schedule; };
    const auto table = sweep_gamma2(list, c.params.gamma2_grid, price, *in.panel, in.test_start, in.test_end, c.workers);

    Manifest m(c, "sweep");
    m.input(artifact_path(c, "stats.csv"));
    m.input(artifact_path(c, "panel.csv"));
    json errs = json::array();
    for (const auto& e : table.errors) {
        errs.push_back({{"scheme", to_string(e.scheme)}, {"gamma2", e.gamma2}, {"error", e.what}});
        m.warn(std::string(to_string(e.scheme)) + " gamma2=" + csv::format_number(e.gamma2) + ": " + e.what);
    }
    m.doc()["cell_errors"] = errs;
    m.doc()["cells"] = table.cells;
    if (table.rows.empty()) {
        m.write("sweep_manifest.json");
        out << "sweep: all " << table.cells << " cells failed\n";
        return kInfeasible;
    }
    m.artifact("frontier.csv", frontier_to_csv(table.rows));
    m.write("sweep_manifest.json");
    out << "sweep: " << table.rows.size() << " of " << table.cells << " cells priced -> "
        << m.path("frontier.csv") << "\n";
    return kOk;
}

}  // namespace catpremium::cli
