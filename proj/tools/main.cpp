#include "commands.hpp"
#include "config.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace catpremium;

int main(int argc, char** argv) {
    CLI::App app{"Flood-insurance premium pricing under loss uncertainty"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> workers;
    app.add_option("--config", config_path, "Run configuration (JSON)")->required();
    app.add_option("--seed", seed, "Override the configured seed");
    app.add_option("--out", out_dir, "Override paths.output_dir");
    app.add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");

    auto* ingest = app.add_subcommand("ingest", "Parse claims and policies into the state-year panel and statistics");
    auto* train = app.add_subcommand("train-risk", "Fit exceedance classifiers and write forecasts");
    auto* price = app.add_subcommand("price", "Price every state under one scheme and backtest it");
    std::string scheme_name;
    price->add_option("--scheme", scheme_name, "nominal|ro1|ro2|aro|cma|hist")->required();
    auto* sweep = app.add_subcommand("sweep", "Backtest schemes across the gamma2 grid");
    std::vector<std::string> sweep_schemes;
    sweep->add_option("--scheme", sweep_schemes, "Restrict to these schemes (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kConfigOrIo;
    }

    try {
        auto cfg = cli::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.paths.output_dir = *out_dir;
        if (workers) cfg.workers = *workers;

        auto parse = [](const std::string& name) {
            auto s = parse_scheme(name);
            require(s.has_value(), ErrorKind::config, "unknown scheme " + name);
            return *s;
        };
        if (*ingest) return cli::cmd_ingest(cfg, std::cout);
        if (*train) return cli::cmd_train_risk(cfg, std::cout);
        if (*price) return cli::cmd_price(cfg, parse(scheme_name), std::cout);
        if (*sweep) {
            std::vector<Scheme> list;
            for (const auto& n : sweep_schemes) list.push_back(parse(n));
            return cli::cmd_sweep(cfg, list, std::cout);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kConfigOrIo;
    }
    return cli::kConfigOrIo;
}
