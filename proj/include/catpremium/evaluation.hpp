#pragma once

// Backtests of premium schedules against realized losses, and the gamma2
// sweep behind the surplus / insolvency frontier.

#include "catpremium/csv.hpp"
#include "catpremium/data_ingest.hpp"
#include "catpremium/error.hpp"
#include "catpremium/parallel.hpp"
#include "catpremium/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace catpremium {

struct StateBacktest {
    std::string state;
    Usd cum_premium = 0.0;  // revenue actually collected (damped where the scheme damps)
    Usd cum_loss = 0.0;
    Usd balance = 0.0;
    bool insolvent = false;
};

struct BacktestReport {
    Scheme scheme = Scheme::ro1;
    double gamma2 = 0.0;
    int first_year = 0;
    int last_year = 0;
    std::vector<StateBacktest> states;
    Usd surplus = 0.0;         // S: sum of revenue minus losses
    Usd abs_deviation = 0.0;   // AD: sum over state-years of |revenue - loss|
    std::size_t insolvent_count = 0;
};

inline BacktestReport backtest(const PremiumSchedule& sched, const LossPanel& actual, int first_year, int last_year) {
    require(first_year <= last_year, ErrorKind::config, "backtest window is empty");
    require(sched.first_year <= first_year && sched.last_year() >= last_year, ErrorKind::data,
            "schedule years " + std::to_string(sched.first_year) + "-" + std::to_string(sched.last_year()) +
                " do not cover the backtest window");
    require(actual.covers(first_year) && actual.covers(last_year), ErrorKind::data,
            "loss panel does not cover the backtest window");
    require(!sched.states.empty(), ErrorKind::data, "schedule has no states to backtest");

    BacktestReport rep;
    rep.scheme = sched.scheme;
    rep.gamma2 = sched.gamma2;
    rep.first_year = first_year;
    rep.last_year = last_year;
    for (const auto& s : sched.states) {
        const auto idx = actual.state_index(s.state);
        require(idx.has_value(), ErrorKind::data, "state " + s.state + " has no realized losses in the panel");
        StateBacktest b;
        b.state = s.state;
        for (int y = first_year; y <= last_year; ++y) {
            const auto t = static_cast<std::size_t>(y - sched.first_year);
            const double loss = actual.value(*idx, y);
            require(!std::isnan(loss), ErrorKind::data, s.state + ": missing realized loss in " + std::to_string(y));
            const double rev = s.revenue(t);
            b.cum_premium += rev;
            b.cum_loss += loss;
            rep.abs_deviation += std::abs(rev - loss);
        }
        b.balance = b.cum_premium - b.cum_loss;
        b.insolvent = b.cum_premium < b.cum_loss;
        rep.surplus += b.balance;
        rep.insolvent_count += b.insolvent ? 1 : 0;
        rep.states.push_back(std::move(b));
    }
    return rep;
}

/// The schedule's own revenues as a loss panel; backtesting against it gives
/// S = AD = 0.
inline LossPanel schedule_as_losses(const PremiumSchedule& sched) {
    std::vector<std::string> states;
    for (const auto& s : sched.states) states.push_back(s.state);
    LossPanel panel(states, sched.first_year, sched.last_year());
    for (std::size_t i = 0; i < sched.states.size(); ++i)
        for (std::size_t t = 0; t < sched.num_years; ++t) panel.at(i, t) = sched.states[i].revenue(t);
    return panel;
}

/// CSV columns: state,cum_premium,cum_loss,balance,insolvent
inline std::string backtest_to_csv(const BacktestReport& rep) {
    csv::Writer w({"state", "cum_premium", "cum_loss", "balance", "insolvent"});
    for (const auto& s : rep.states)
        w.row({s.state, csv::format_number(s.cum_premium), csv::format_number(s.cum_loss), csv::format_number(s.balance),
               s.insolvent ? "1" : "0"});
    return w.str();
}

struct FrontierRow {
    Scheme scheme = Scheme::ro1;
    double gamma2 = 0.0;
    std::size_t insolvent_count = 0;
    Usd surplus = 0.0;
    Usd abs_deviation = 0.0;

    friend bool operator==(const FrontierRow&, const FrontierRow&) = default;
};

struct SweepError {
    Scheme scheme;
    double gamma2;
    std::string what;
};

struct FrontierTable {
    std::vector<FrontierRow> rows;
    std::vector<SweepError> errors;
    std::size_t cells = 0;
};

/// Prices one scheme at one gamma2; must be safe to call concurrently.
using SchedulePricer = std::function<PremiumSchedule(Scheme, double)>;

inline bool gamma2_invariant(Scheme s) { return s == Scheme::hist || s == Scheme::cma || s == Scheme::nominal; }

inline void sort_frontier(std::vector<FrontierRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const FrontierRow& a, const FrontierRow& b) {
        return std::tuple(std::string(to_string(a.scheme)), a.gamma2) <
               std::tuple(std::string(to_string(b.scheme)), b.gamma2);
    });
}

/// One frontier row per (scheme, gamma2). Hist, CMA and nominal do not depend on gamma2;
/// they are priced once and repeated. Failed cells are recorded and skipped.
inline FrontierTable sweep_gamma2(const std::vector<Scheme>& schemes, const std::vector<double>& grid,
                                  const SchedulePricer& price, const LossPanel& actual, int first_year, int last_year,
                                  unsigned workers = 0) {
    require(!grid.empty(), ErrorKind::config, "gamma2 grid is empty");
    require(std::is_sorted(grid.begin(), grid.end()), ErrorKind::config, "gamma2 grid must be ascending");
    for (double g : grid) require(g >= 0.0, ErrorKind::config, "gamma2 values must be >= 0");

    struct Cell {
        Scheme scheme;
        double gamma2;
        std::optional<BacktestReport> report;
        std::string error;
    };
    std::vector<Cell> cells;
    for (Scheme s : schemes) {
        if (gamma2_invariant(s)) cells.push_back({s, grid.front(), std::nullopt, {}});
        else
            for (double g : grid) cells.push_back({s, g, std::nullopt, {}});
    }
    parallel_for(
        cells.size(),
        [&](std::size_t i) {
            auto& c = cells[i];
            try {
                auto sched = price(c.scheme, c.gamma2);
                sched.gamma2 = c.gamma2;
                c.report = backtest(sched, actual, first_year, last_year);
            } catch (const std::exception& e) {
                c.error = e.what();
            }
        },
        workers);

    FrontierTable table;
    for (const auto& c : cells) {
        const bool invariant = gamma2_invariant(c.scheme);
        const auto& gs = invariant ? grid : std::vector<double>{c.gamma2};
        for (double g : gs) {
            ++table.cells;
            if (!c.report) {
                table.errors.push_back({c.scheme, g, c.error});
                continue;
            }
            table.rows.push_back({c.scheme, g, c.report->insolvent_count, c.report->surplus, c.report->abs_deviation});
        }
    }
    sort_frontier(table.rows);
    return table;
}

/// CSV columns: scheme,gamma2,insolvent_count,surplus,abs_deviation
inline std::string frontier_to_csv(std::vector<FrontierRow> rows) {
    sort_frontier(rows);
    csv::Writer w({"scheme", "gamma2", "insolvent_count", "surplus", "abs_deviation"});
    for (const auto& r : rows)
        w.row({to_string(r.scheme), csv::format_number(r.gamma2), std::to_string(r.insolvent_count),
               csv::format_number(r.surplus), csv::format_number(r.abs_deviation)});
    return w.str();
}

inline void emit_frontier(const FrontierTable& table, const std::string& path) {
    require(!table.rows.empty(), ErrorKind::data, "frontier table is empty");
    csv::write_file(path, frontier_to_csv(table.rows));
}

inline std::vector<FrontierRow> parse_frontier(const std::string& path) {
    csv::Reader reader(path);
    const auto cs = reader.require_column("scheme"), cg = reader.require_column("gamma2"),
               ci = reader.require_column("insolvent_count"), cS = reader.require_column("surplus"),
               cA = reader.require_column("abs_deviation");
    std::vector<FrontierRow> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
        auto sc = parse_scheme(std::string(csv::trim(csv::field_or_empty(f, cs))));
        auto g = csv::parse_double(csv::field_or_empty(f, cg));
        auto n = csv::parse_int(csv::field_or_empty(f, ci));
        auto S = csv::parse_double(csv::field_or_empty(f, cS));
        auto A = csv::parse_double(csv::field_or_empty(f, cA));
        require(sc && g && n && *n >= 0 && S && A, ErrorKind::data,
                "bad frontier row at line " + std::to_string(reader.line_number()));
        rows.push_back({*sc, *g, static_cast<std::size_t>(*n), *S, *A});
    }
    return rows;
}

}  // namespace catpremium
