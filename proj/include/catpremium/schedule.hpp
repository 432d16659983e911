#pragma once

#include "catpremium/csv.hpp"
#include "catpremium/error.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace catpremium {

enum class Scheme { nominal, ro1, ro2, aro, cma, hist };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::nominal: return "nominal";
        case Scheme::ro1: return "ro1";
        case Scheme::ro2: return "ro2";
        case Scheme::aro: return "aro";
        case Scheme::cma: return "cma";
        case Scheme::hist: return "hist";
    }
    return "?";
}

inline std::optional<Scheme> parse_scheme(const std::string& name) {
    for (Scheme s : {Scheme::nominal, Scheme::ro1, Scheme::ro2, Scheme::aro, Scheme::cma, Scheme::hist})
        if (name == to_string(s)) return s;
    return std::nullopt;
}

/// Premiums of one state over consecutive years. Revenue in year t is
/// damped_fraction[t] * premium[t]; schemes without damping carry 1.
struct StateSchedule {
    std::string state;
    std::vector<double> premium;
    std::vector<double> damped_fraction;
    std::string binding;  // which constraint determined the premium level
    double residual = 0.0;

    double revenue(std::size_t t) const { return damped_fraction[t] * premium[t]; }

    double total_revenue() const {
        double s = 0.0;
        for (std::size_t t = 0; t < premium.size(); ++t) s += revenue(t);
        return s;
    }
};

struct PremiumSchedule {
    Scheme scheme = Scheme::ro1;
    int first_year = 0;
    std::size_t num_years = 0;
    double gamma2 = 0.0;
    std::vector<StateSchedule> states;
    std::vector<std::string> warnings;

    int last_year() const { return first_year + static_cast<int>(num_years) - 1; }

    const StateSchedule* find(const std::string& code) const {
        for (const auto& s : states)
            if (s.state == code) return &s;
        return nullptr;
    }
};

/// CSV columns: state,year,premium,damped_fraction,scheme,binding_constraint
inline std::string schedule_to_csv(const PremiumSchedule& sched) {
    csv::Writer w({"state", "year", "premium", "damped_fraction", "scheme", "binding_constraint"});
    for (const auto& s : sched.states)
        for (std::size_t t = 0; t < s.premium.size(); ++t)
            w.row({s.state, std::to_string(sched.first_year + static_cast<int>(t)), csv::format_number(s.premium[t]),
                   csv::format_number(s.damped_fraction[t]), to_string(sched.scheme), s.binding});
    return w.str();
}

inline PremiumSchedule read_schedule_csv(const std::string& path) {
    csv::Reader reader(path);
    const auto cs = reader.require_column("state"), cy = reader.require_column("year"),
               cp = reader.require_column("premium"), cf = reader.require_column("damped_fraction"),
               csch = reader.require_column("scheme"), cb = reader.require_column("binding_constraint");
    PremiumSchedule out;
    std::map<std::string, std::map<int, std::pair<double, double>>> cells;
    std::map<std::string, std::string> binding;
    std::vector<std::string> order;
    std::optional<Scheme> scheme;
    std::vector<std::string> f;
    int lo = 0, hi = -1;
    bool first = true;
    while (reader.next(f)) {
        auto y = csv::parse_int(csv::field_or_empty(f, cy));
        auto p = csv::parse_double(csv::field_or_empty(f, cp));
        auto d = csv::parse_double(csv::field_or_empty(f, cf));
        auto sc = parse_scheme(std::string(csv::trim(csv::field_or_empty(f, csch))));
        require(y && p && d && sc, ErrorKind::data, "bad schedule row at line " + std::to_string(reader.line_number()));
        require(!scheme || *scheme == *sc, ErrorKind::data, "schedule file mixes schemes: " + path);
        scheme = sc;
        const std::string st(csv::trim(csv::field_or_empty(f, cs)));
        if (!cells.contains(st)) order.push_back(st);
        cells[st][static_cast<int>(*y)] = {*p, *d};
        binding[st] = csv::field_or_empty(f, cb);
        lo = first ? static_cast<int>(*y) : std::min(lo, static_cast<int>(*y));
        hi = first ? static_cast<int>(*y) : std::max(hi, static_cast<int>(*y));
        first = false;
    }
    require(!first, ErrorKind::data, "schedule file is empty: " + path);
    out.scheme = *scheme;
    out.first_year = lo;
    out.num_years = static_cast<std::size_t>(hi - lo + 1);
    for (const auto& st : order) {
        StateSchedule s;
        s.state = st;
        s.binding = binding[st];
        for (int y = lo; y <= hi; ++y) {
            auto it = cells[st].find(y);
            require(it != cells[st].end(), ErrorKind::data, "schedule for " + st + " misses year " + std::to_string(y));
            s.premium.push_back(it->second.first);
            s.damped_fraction.push_back(it->second.second);
        }
        out.states.push_back(std::move(s));
    }
    return out;
}

}  // namespace catpremium
