// Real-data reproduction against the public NFIP claims and policies extracts.
// Exit 77 (skipped) unless CATPREMIUM_NFIP_CLAIMS and CATPREMIUM_NFIP_POLICIES
// name readable files.

#include "catpremium/baselines.hpp"
#include "catpremium/data_ingest.hpp"
#include "catpremium/evaluation.hpp"
#include "catpremium/risk_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

using namespace catpremium;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("%s criterion %s: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    if (!ok) ++failures;
}

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

std::string env_file(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return {};
    std::error_code ec;
    return std::filesystem::is_regular_file(v, ec) ? std::string(v) : std::string();
}

}  // namespace

int main() {
    const auto claims_path = env_file("CATPREMIUM_NFIP_CLAIMS");
    const auto policies_path = env_file("CATPREMIUM_NFIP_POLICIES");
    if (claims_path.empty() || policies_path.empty()) {
        std::printf("SKIP criterion 9: set CATPREMIUM_NFIP_CLAIMS and CATPREMIUM_NFIP_POLICIES to the NFIP extracts\n");
        return 77;
    }
    try {
        const auto claims = parse_claims(claims_path);
        const auto panel = interpolate_missing(aggregate_state_year(claims.records, 1975, 2022));
        const auto policies = parse_policies(policies_path);
        std::printf("INFO %zu claims kept, %zu states\n", claims.records.size(), panel.num_states());

        const auto th = default_thresholds(panel, 1975, 2011);
        std::printf("INFO thresholds p90/p95/p99: %.0f %.0f %.0f (reference 18558788 50688672 321903271)\n", th[0],
                    th[1], th[2]);

        const auto hist = backtest(hist_schedule(policies.panel, panel.states(), 2013, 2022), panel, 2013, 2022);
        const auto cma = backtest(cma_schedule(panel, 2013, 2022), panel, 2013, 2022);
        report("9a", hist.insolvent_count == 52, "Hist insolvent states " + std::to_string(hist.insolvent_count) + " (want 52)");
        report("9b", cma.insolvent_count <= 38 && cma.insolvent_count >= 34,
               "CMA insolvent states " + std::to_string(cma.insolvent_count) + " (want 36 +- 2)");
        report("9c", within(hist.surplus, -1.98e10, 0.15), "Hist total surplus " + std::to_string(hist.surplus) + " (want -1.98e10 +- 15%)");
        report("9d", within(cma.surplus, -8.31e9, 0.15), "CMA total surplus " + std::to_string(cma.surplus) + " (want -8.31e9 +- 15%)");
    } catch (const std::exception& e) {
        report("9", false, std::string("exception: ") + e.what());
    }
    return failures ? 1 : 0;
}
