#pragma once

// NFIP-style claims/policy CSV ingestion, state-year aggregation, gap
// interpolation, and training-window statistics.

#include "catpremium/csv.hpp"
#include "catpremium/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace catpremium {

using Usd = double;

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;
};

inline bool is_leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int y, int m) {
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap_year(y) ? 29 : days[m - 1];
}

/// Accepts ISO dates ("2016-08-13", optionally followed by a time part such as
/// "T00:00:00.000Z") and US-style "08/13/2016".
inline std::optional<Date> parse_date(std::string_view text) {
    text = csv::trim(text);
    Date d;
    auto num = [](std::string_view s) -> std::optional<int> {
        if (s.empty()) return std::nullopt;
        for (char c : s)
            if (c < '0' || c > '9') return std::nullopt;
        auto v = csv::parse_int(s);
        if (!v) return std::nullopt;
        return static_cast<int>(*v);
    };
    if (text.size() >= 10 && text[4] == '-' && text[7] == '-') {
        if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
        auto y = num(text.substr(0, 4)), m = num(text.substr(5, 2)), dd = num(text.substr(8, 2));
        if (!y || !m || !dd) return std::nullopt;
        d = {*y, *m, *dd};
    } else {
        const auto s1 = text.find('/');
        const auto s2 = s1 == std::string_view::npos ? s1 : text.find('/', s1 + 1);
        if (s2 == std::string_view::npos) return std::nullopt;
        auto rest = text.substr(s2 + 1);
        if (auto sp = rest.find(' '); sp != std::string_view::npos) rest = rest.substr(0, sp);
        auto m = num(text.substr(0, s1)), dd = num(text.substr(s1 + 1, s2 - s1 - 1)), y = num(rest);
        if (!y || !m || !dd || rest.size() != 4) return std::nullopt;
        d = {*y, *m, *dd};
    }
    if (d.month < 1 || d.month > 12) return std::nullopt;
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
    return d;
}

/// 50 states plus Puerto Rico and the U.S. Virgin Islands. DC, GU, AS and MP are
/// not listed, so their rows are dropped.
inline std::vector<std::string> default_jurisdictions() {
    return {"AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA", "HI", "ID", "IL",
            "IN", "IA", "KS", "KY", "LA", "ME", "MD", "MA", "MI", "MN", "MS", "MO", "MT",
            "NE", "NV", "NH", "NJ", "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI",
            "SC", "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY", "PR", "VI"};
}

struct IngestConfig {
    std::string claims_date_column = "dateOfLoss";
    std::string claims_state_column = "state";
    std::string claims_amount_column = "amountPaidOnBuildingClaim";

    std::string policy_date_column = "policyTerminationDate";
    std::string policy_state_column = "propertyState";
    std::string policy_premium_column = "totalInsurancePremiumOfThePolicy";
    /// When non-empty and present in the file, counts are summed from this column
    /// instead of counting rows.
    std::string policy_count_column;

    std::vector<std::string> jurisdictions = default_jurisdictions();
    /// Abort when (row errors / data rows) exceeds this fraction.
    double error_threshold = 0.01;
};

struct ClaimRecord {
    Date date_of_loss;
    std::string state;
    Usd amount_paid = 0.0;
};

struct RowError {
    std::size_t line = 0;
    std::string message;
};

struct ParseReport {
    std::size_t rows_read = 0;
    std::size_t kept = 0;
    std::size_t dropped_missing_amount = 0;
    std::size_t dropped_jurisdiction = 0;
    std::vector<RowError> errors;

    std::size_t dropped() const { return dropped_missing_amount + dropped_jurisdiction + errors.size(); }
};

struct ClaimsParse {
    std::vector<ClaimRecord> records;
    ParseReport report;
};

namespace detail {

inline void check_error_rate(const ParseReport& rep, double threshold, const std::string& path) {
    if (rep.rows_read == 0) return;
    const double rate = static_cast<double>(rep.errors.size()) / static_cast<double>(rep.rows_read);
    if (rate > threshold) {
        std::string msg = "row error rate " + csv::format_number(rate) + " exceeds threshold " +
                          csv::format_number(threshold) + " in " + path;
        if (!rep.errors.empty())
            msg += " (first: line " + std::to_string(rep.errors.front().line) + ": " + rep.errors.front().message + ")";
        fail(ErrorKind::data, msg);
    }
}

}  // namespace detail

inline ClaimsParse parse_claims(const std::string& path, const IngestConfig& config = {}) {
    csv::Reader reader(path);
    require(reader.has_header(), ErrorKind::data, "claims file has no header row: " + path);
    const auto c_date = reader.require_column(config.claims_date_column);
    const auto c_state = reader.require_column(config.claims_state_column);
    const auto c_amount = reader.require_column(config.claims_amount_column);
    const std::set<std::string> allowed(config.jurisdictions.begin(), config.jurisdictions.end());

    ClaimsParse out;
    auto& rep = out.report;
    std::vector<std::string> f;
    while (reader.next(f)) {
        ++rep.rows_read;
        const auto line = reader.line_number();
        const std::string state(csv::trim(csv::field_or_empty(f, c_state)));
        if (!allowed.contains(state)) {
            ++rep.dropped_jurisdiction;
            continue;
        }
        const auto amount_text = csv::trim(csv::field_or_empty(f, c_amount));
        if (amount_text.empty()) {
            ++rep.dropped_missing_amount;
            continue;
        }
        const auto date = parse_date(csv::field_or_empty(f, c_date));
        if (!date) {
            rep.errors.push_back({line, "unparseable date '" + csv::field_or_empty(f, c_date) + "'"});
            continue;
        }
        const auto amount = csv::parse_double(amount_text);
        if (!amount || !std::isfinite(*amount) || *amount < 0.0) {
            rep.errors.push_back({line, "invalid amount '" + std::string(amount_text) + "'"});
            continue;
        }
        out.records.push_back({*date, state, *amount});
    }
    rep.kept = out.records.size();
    detail::check_error_rate(rep, config.error_threshold, path);
    return out;
}

/// State x year grid. Missing cells hold NaN until interpolated.
class LossPanel {
public:
    LossPanel() = default;

    LossPanel(std::vector<std::string> states, int first_year, int last_year)
        : states_(std::move(states)), first_year_(first_year), last_year_(last_year) {
        require(first_year <= last_year, ErrorKind::data, "panel year range is empty");
        values_.assign(states_.size() * num_years(), missing_value());
    }

    static double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

    const std::vector<std::string>& states() const { return states_; }
    int first_year() const { return first_year_; }
    int last_year() const { return last_year_; }
    std::size_t num_states() const { return states_.size(); }
    std::size_t num_years() const { return static_cast<std::size_t>(last_year_ - first_year_ + 1); }
    bool empty() const { return states_.empty(); }
    bool covers(int year) const { return year >= first_year_ && year <= last_year_; }

    std::optional<std::size_t> state_index(const std::string& code) const {
        auto it = std::find(states_.begin(), states_.end(), code);
        if (it == states_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - states_.begin());
    }

    std::size_t year_index(int year) const {
        require(covers(year), ErrorKind::data, "year " + std::to_string(year) + " outside panel");
        return static_cast<std::size_t>(year - first_year_);
    }

    double at(std::size_t state, std::size_t year_idx) const { return values_[state * num_years() + year_idx]; }
    double& at(std::size_t state, std::size_t year_idx) { return values_[state * num_years() + year_idx]; }
    double value(std::size_t state, int year) const { return at(state, year_index(year)); }
    bool is_missing(std::size_t state, std::size_t year_idx) const { return std::isnan(at(state, year_idx)); }

    std::span<const double> row(std::size_t state) const {
        return {values_.data() + state * num_years(), num_years()};
    }
    std::span<double> row(std::size_t state) { return {values_.data() + state * num_years(), num_years()}; }

    /// Losses for years [from, to] of one state.
    std::vector<double> window(std::size_t state, int from, int to) const {
        require(from <= to && covers(from) && covers(to), ErrorKind::data,
                "window " + std::to_string(from) + "-" + std::to_string(to) + " outside panel");
        const auto r = row(state);
        return {r.begin() + year_index(from), r.begin() + year_index(to) + 1};
    }

    bool has_missing() const {
        return std::any_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); });
    }

    friend bool operator==(const LossPanel& a, const LossPanel& b) {
        if (a.states_ != b.states_ || a.first_year_ != b.first_year_ || a.last_year_ != b.last_year_) return false;
        for (std::size_t i = 0; i < a.values_.size(); ++i) {
            const double x = a.values_[i], y = b.values_[i];
            if (std::isnan(x) != std::isnan(y)) return false;
            if (!std::isnan(x) && x != y) return false;
        }
        return true;
    }

private:
    std::vector<std::string> states_;
    int first_year_ = 0;
    int last_year_ = -1;
    std::vector<double> values_;
};

/// Sums claim amounts per (state, loss-date year). States are the sorted set of
/// codes seen in the records; cells without records stay missing.
inline LossPanel aggregate_state_year(const std::vector<ClaimRecord>& records, int start_year = 1975,
                                      int end_year = 2022) {
    require(!records.empty(), ErrorKind::data, "cannot aggregate an empty record list");
    require(start_year <= end_year, ErrorKind::config, "start_year must not exceed end_year");
    std::set<std::string> codes;
    for (const auto& r : records) codes.insert(r.state);
    LossPanel panel(std::vector<std::string>(codes.begin(), codes.end()), start_year, end_year);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < panel.num_states(); ++i) index[panel.states()[i]] = i;
    for (const auto& r : records) {
        const int y = r.date_of_loss.year;
        if (!panel.covers(y)) continue;
        double& cell = panel.at(index[r.state], panel.year_index(y));
        cell = std::isnan(cell) ? r.amount_paid : cell + r.amount_paid;
    }
    return panel;
}

/// Linear interpolation across interior gaps, nearest observed value at the
/// edges, negative interpolants clamped to zero. Observed cells are untouched.
inline LossPanel interpolate_missing(LossPanel panel) {
    const std::size_t ny = panel.num_years();
    for (std::size_t s = 0; s < panel.num_states(); ++s) {
        auto row = panel.row(s);
        std::vector<std::size_t> seen;
        for (std::size_t t = 0; t < ny; ++t)
            if (!std::isnan(row[t])) seen.push_back(t);
        require(!seen.empty(), ErrorKind::data, "state " + panel.states()[s] + " has no observed years");
        for (std::size_t t = 0; t < seen.front(); ++t) row[t] = row[seen.front()];
        for (std::size_t t = seen.back() + 1; t < ny; ++t) row[t] = row[seen.back()];
        for (std::size_t k = 0; k + 1 < seen.size(); ++k) {
            const std::size_t a = seen[k], b = seen[k + 1];
            for (std::size_t t = a + 1; t < b; ++t) {
                const double w = static_cast<double>(t - a) / static_cast<double>(b - a);
                row[t] = std::max(0.0, row[a] + w * (row[b] - row[a]));
            }
        }
    }
    return panel;
}

struct StateStats {
    Usd mean = 0.0;
    Usd std = 0.0;  // population standard deviation
    int window_start = 0;
    int window_end = 0;
};

using StatsTable = std::map<std::string, StateStats>;

/// Mean and population standard deviation over [start, end] for every state.
inline StatsTable compute_stats(const LossPanel& panel, int start = 1975, int end = 2012) {
    require(end - start + 1 >= 2, ErrorKind::config, "statistics window must span at least 2 years");
    require(panel.covers(start) && panel.covers(end), ErrorKind::data,
            "statistics window " + std::to_string(start) + "-" + std::to_string(end) + " outside panel years");
    StatsTable out;
    for (std::size_t s = 0; s < panel.num_states(); ++s) {
        const auto w = panel.window(s, start, end);
        double sum = 0.0;
        for (double v : w) {
            require(!std::isnan(v), ErrorKind::data, "missing cell in statistics window for " + panel.states()[s]);
            sum += v;
        }
        const double mean = sum / static_cast<double>(w.size());
        double ss = 0.0;
        for (double v : w) ss += (v - mean) * (v - mean);
        // all-equal windows give exactly zero
        const bool constant = std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); });
        const double sd = constant ? 0.0 : std::sqrt(ss / static_cast<double>(w.size()));
        out[panel.states()[s]] = {mean, sd, start, end};
    }
    return out;
}

class PolicyPanel {
public:
    PolicyPanel() = default;
    PolicyPanel(std::vector<std::string> states, int first_year, int last_year)
        : states_(std::move(states)), first_year_(first_year), last_year_(last_year) {
        const std::size_t n = states_.size() * num_years();
        premium_.assign(n, 0.0);
        count_.assign(n, 0.0);
        observed_.assign(n, 0);
    }

    const std::vector<std::string>& states() const { return states_; }
    int first_year() const { return first_year_; }
    int last_year() const { return last_year_; }
    std::size_t num_states() const { return states_.size(); }
    std::size_t num_years() const { return static_cast<std::size_t>(last_year_ - first_year_ + 1); }
    bool covers(int year) const { return year >= first_year_ && year <= last_year_; }

    std::optional<std::size_t> state_index(const std::string& code) const {
        auto it = std::find(states_.begin(), states_.end(), code);
        if (it == states_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - states_.begin());
    }

    /// nullopt when the state-year has no policy rows.
    std::optional<Usd> premium(const std::string& state, int year) const {
        auto s = state_index(state);
        if (!s || !covers(year) || !observed_[cell(*s, year)]) return std::nullopt;
        return premium_[cell(*s, year)];
    }
    double count(std::size_t s, int year) const { return count_[cell(s, year)]; }
    double premium_at(std::size_t s, int year) const { return premium_[cell(s, year)]; }
    bool observed(std::size_t s, int year) const { return observed_[cell(s, year)] != 0; }

    void add(std::size_t s, int year, Usd premium, double count) {
        const auto c = cell(s, year);
        premium_[c] += premium;
        count_[c] += count;
        observed_[c] = 1;
    }

    /// Largest observed per-policy mean premium (premium / count) for a state.
    double max_mean_policy_premium(std::size_t s) const {
        double best = 0.0;
        for (int y = first_year_; y <= last_year_; ++y)
            if (observed(s, y) && count(s, y) > 0) best = std::max(best, premium_at(s, y) / count(s, y));
        return best;
    }

    double max_state_premium(std::size_t s) const {
        double best = 0.0;
        for (int y = first_year_; y <= last_year_; ++y)
            if (observed(s, y)) best = std::max(best, premium_at(s, y));
        return best;
    }

private:
    std::size_t cell(std::size_t s, int year) const {
        return s * num_years() + static_cast<std::size_t>(year - first_year_);
    }

    std::vector<std::string> states_;
    int first_year_ = 0;
    int last_year_ = -1;
    std::vector<double> premium_;
    std::vector<double> count_;
    std::vector<std::uint8_t> observed_;
};

struct PolicyParse {
    PolicyPanel panel;
    ParseReport report;
};

/// Aggregates premiums to state-year sums and policy counts. The panel spans the
/// observed years.
inline PolicyParse parse_policies(const std::string& path, const IngestConfig& config = {}) {
    csv::Reader reader(path);
    require(reader.has_header(), ErrorKind::data, "policy file has no header row: " + path);
    const auto c_date = reader.require_column(config.policy_date_column);
    const auto c_state = reader.require_column(config.policy_state_column);
    const auto c_prem = reader.require_column(config.policy_premium_column);
    std::optional<std::size_t> c_count;
    if (!config.policy_count_column.empty()) c_count = reader.column(config.policy_count_column);
    const std::set<std::string> allowed(config.jurisdictions.begin(), config.jurisdictions.end());

    struct Row {
        std::string state;
        int year;
        double premium;
        double count;
    };
    std::vector<Row> rows;
    ParseReport rep;
    std::vector<std::string> f;
    while (reader.next(f)) {
        ++rep.rows_read;
        const auto line = reader.line_number();
        std::string state(csv::trim(csv::field_or_empty(f, c_state)));
        if (!allowed.contains(state)) {
            ++rep.dropped_jurisdiction;
            continue;
        }
        const auto prem_text = csv::trim(csv::field_or_empty(f, c_prem));
        if (prem_text.empty()) {
            ++rep.dropped_missing_amount;
            continue;
        }
        const auto date = parse_date(csv::field_or_empty(f, c_date));
        if (!date) {
            rep.errors.push_back({line, "unparseable date '" + csv::field_or_empty(f, c_date) + "'"});
            continue;
        }
        const auto prem = csv::parse_double(prem_text);
        if (!prem || !std::isfinite(*prem) || *prem < 0.0) {
            rep.errors.push_back({line, "invalid premium '" + std::string(prem_text) + "'"});
            continue;
        }
        double count = 1.0;
        if (c_count) {
            auto c = csv::parse_double(csv::field_or_empty(f, *c_count));
            if (!c || *c < 0.0) {
                rep.errors.push_back({line, "invalid policy count"});
                continue;
            }
            count = *c;
        }
        rows.push_back({std::move(state), date->year, *prem, count});
    }
    rep.kept = rows.size();
    detail::check_error_rate(rep, config.error_threshold, path);
    require(!rows.empty(), ErrorKind::data, "no usable policy rows in " + path);

    std::set<std::string> codes;
    int lo = rows.front().year, hi = rows.front().year;
    for (const auto& r : rows) {
        codes.insert(r.state);
        lo = std::min(lo, r.year);
        hi = std::max(hi, r.year);
    }
    PolicyParse out{PolicyPanel(std::vector<std::string>(codes.begin(), codes.end()), lo, hi), rep};
    for (const auto& r : rows) out.panel.add(*out.panel.state_index(r.state), r.year, r.premium, r.count);
    return out;
}

// ---- serialization ----------------------------------------------------------

/// Long-format CSV: state,year,value (missing cells have an empty value).
inline std::string panel_to_csv(const LossPanel& panel) {
    csv::Writer w({"state", "year", "value"});
    for (std::size_t s = 0; s < panel.num_states(); ++s)
        for (std::size_t t = 0; t < panel.num_years(); ++t) {
            const double v = panel.at(s, t);
            w.row({panel.states()[s], std::to_string(panel.first_year() + static_cast<int>(t)),
                   std::isnan(v) ? std::string{} : csv::format_number(v)});
        }
    return w.str();
}

inline LossPanel read_panel_csv(const std::string& path) {
    csv::Reader reader(path);
    const auto c_state = reader.require_column("state");
    const auto c_year = reader.require_column("year");
    const auto c_value = reader.require_column("value");
    struct Cell {
        std::string state;
        int year;
        double value;
    };
    std::vector<Cell> cells;
    std::vector<std::string> order;
    std::set<std::string> seen;
    std::vector<std::string> f;
    while (reader.next(f)) {
        auto year = csv::parse_int(csv::field_or_empty(f, c_year));
        require(year.has_value(), ErrorKind::data, "bad year at line " + std::to_string(reader.line_number()));
        const auto vtext = csv::trim(csv::field_or_empty(f, c_value));
        double v = LossPanel::missing_value();
        if (!vtext.empty()) {
            auto pv = csv::parse_double(vtext);
            require(pv.has_value(), ErrorKind::data, "bad value at line " + std::to_string(reader.line_number()));
            v = *pv;
        }
        std::string st(csv::trim(csv::field_or_empty(f, c_state)));
        if (seen.insert(st).second) order.push_back(st);
        cells.push_back({std::move(st), static_cast<int>(*year), v});
    }
    require(!cells.empty(), ErrorKind::data, "panel file is empty: " + path);
    int lo = cells.front().year, hi = cells.front().year;
    for (const auto& c : cells) {
        lo = std::min(lo, c.year);
        hi = std::max(hi, c.year);
    }
    LossPanel panel(order, lo, hi);
    for (const auto& c : cells) panel.at(*panel.state_index(c.state), panel.year_index(c.year)) = c.value;
    return panel;
}

inline std::string stats_to_csv(const StatsTable& stats) {
    csv::Writer w({"state", "mean", "std", "window_start", "window_end"});
    for (const auto& [state, s] : stats)
        w.row({state, csv::format_number(s.mean), csv::format_number(s.std), std::to_string(s.window_start),
               std::to_string(s.window_end)});
    return w.str();
}

inline StatsTable read_stats_csv(const std::string& path) {
    csv::Reader reader(path);
    const auto cs = reader.require_column("state"), cm = reader.require_column("mean"),
               cd = reader.require_column("std"), c0 = reader.require_column("window_start"),
               c1 = reader.require_column("window_end");
    StatsTable out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        auto m = csv::parse_double(csv::field_or_empty(f, cm));
        auto d = csv::parse_double(csv::field_or_empty(f, cd));
        auto a = csv::parse_int(csv::field_or_empty(f, c0));
        auto b = csv::parse_int(csv::field_or_empty(f, c1));
        require(m && d && a && b && *d >= 0.0, ErrorKind::data,
                "bad stats row at line " + std::to_string(reader.line_number()));
        out[std::string(csv::trim(csv::field_or_empty(f, cs)))] = {*m, *d, static_cast<int>(*a), static_cast<int>(*b)};
    }
    return out;
}

inline std::string policies_to_csv(const PolicyPanel& p) {
    csv::Writer w({"state", "year", "premium", "count"});
    for (std::size_t s = 0; s < p.num_states(); ++s)
        for (int y = p.first_year(); y <= p.last_year(); ++y)
            if (p.observed(s, y))
                w.row({p.states()[s], std::to_string(y), csv::format_number(p.premium_at(s, y)),
                       csv::format_number(p.count(s, y))});
    return w.str();
}

inline PolicyPanel read_policies_csv(const std::string& path) {
    csv::Reader reader(path);
    const auto cs = reader.require_column("state"), cy = reader.require_column("year"),
               cp = reader.require_column("premium"), cc = reader.require_column("count");
    struct Row {
        std::string state;
        int year;
        double premium, count;
    };
    std::vector<Row> rows;
    std::set<std::string> codes;
    std::vector<std::string> f;
    while (reader.next(f)) {
        auto y = csv::parse_int(csv::field_or_empty(f, cy));
        auto p = csv::parse_double(csv::field_or_empty(f, cp));
        auto c = csv::parse_double(csv::field_or_empty(f, cc));
        require(y && p && c, ErrorKind::data, "bad policy row at line " + std::to_string(reader.line_number()));
        rows.push_back({std::string(csv::trim(csv::field_or_empty(f, cs))), static_cast<int>(*y), *p, *c});
        codes.insert(rows.back().state);
    }
    require(!rows.empty(), ErrorKind::data, "policy panel file is empty: " + path);
    int lo = rows.front().year, hi = lo;
    for (const auto& r : rows) {
        lo = std::min(lo, r.year);
        hi = std::max(hi, r.year);
    }
    PolicyPanel panel(std::vector<std::string>(codes.begin(), codes.end()), lo, hi);
    for (const auto& r : rows) panel.add(*panel.state_index(r.state), r.year, r.premium, r.count);
    return panel;
}

}  // namespace catpremium
