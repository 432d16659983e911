#pragma once

// Reference schemes: historical premiums as charged, and the cumulative moving
// average of past losses.

#include "catpremium/data_ingest.hpp"
#include "catpremium/error.hpp"
#include "catpremium/schedule.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace catpremium {

/// p_{i,t} = mean of the panel losses of state i over every panel year before t.
/// The current year is excluded so the backtest never sees its own outcome.
inline PremiumSchedule cma_schedule(const LossPanel& panel, int first_year, int last_year) {
    require(first_year <= last_year, ErrorKind::config, "CMA evaluation window is empty");
    require(first_year > panel.first_year(), ErrorKind::data,
            "CMA evaluation year " + std::to_string(first_year) + " has no prior history in the panel");
    require(panel.covers(last_year - 1), ErrorKind::data, "panel ends before the CMA evaluation window");
    PremiumSchedule out;
    out.scheme = Scheme::cma;
    out.first_year = first_year;
    out.num_years = static_cast<std::size_t>(last_year - first_year + 1);
    out.warnings.push_back("cma: mean over strictly prior years (current year excluded)");
    for (std::size_t s = 0; s < panel.num_states(); ++s) {
        StateSchedule sch;
        sch.state = panel.states()[s];
        sch.binding = "history";
        double sum = 0.0;
        std::size_t n = 0;
        int next = panel.first_year();
        for (int y = first_year; y <= last_year; ++y) {
            for (; next < y; ++next) {
                const double v = panel.value(s, next);
                if (std::isnan(v)) continue;
                sum += v;
                ++n;
            }
            require(n > 0, ErrorKind::data, sch.state + ": no observed history before " + std::to_string(y));
            sch.premium.push_back(sum / static_cast<double>(n));
        }
        sch.damped_fraction.assign(sch.premium.size(), 1.0);
        out.states.push_back(std::move(sch));
    }
    return out;
}

/// Premiums collected as recorded in the policy panel. Missing cells become 0
/// and are listed in the schedule warnings.
inline PremiumSchedule hist_schedule(const PolicyPanel& policies, const std::vector<std::string>& states,
                                     int first_year, int last_year) {
    require(first_year <= last_year, ErrorKind::config, "hist evaluation window is empty");
    PremiumSchedule out;
    out.scheme = Scheme::hist;
    out.first_year = first_year;
    out.num_years = static_cast<std::size_t>(last_year - first_year + 1);
    for (const auto& st : states) {
        StateSchedule sch;
        sch.state = st;
        sch.binding = "history";
        for (int y = first_year; y <= last_year; ++y) {
            auto p = policies.premium(st, y);
            if (!p) out.warnings.push_back("hist: no policy premium for " + st + " " + std::to_string(y) + ", using 0");
            sch.premium.push_back(p.value_or(0.0));
        }
        sch.damped_fraction.assign(sch.premium.size(), 1.0);
        out.states.push_back(std::move(sch));
    }
    return out;
}

}  // namespace catpremium
