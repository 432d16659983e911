#include "catpremium/evaluation.hpp"
#include "catpremium/pricing_ro.hpp"
#include "temp_dir.hpp"

#include <catch_amalgamated.hpp>

#include <atomic>
#include <random>

using namespace catpremium;
using Catch::Approx;

namespace {

PremiumSchedule flat_schedule(const std::vector<std::string>& states, std::vector<std::vector<double>> premiums,
                              int first) {
    PremiumSchedule s;
    s.scheme = Scheme::ro1;
    s.first_year = first;
    s.num_years = premiums.front().size();
    for (std::size_t i = 0; i < states.size(); ++i) {
        StateSchedule st;
        st.state = states[i];
        st.premium = premiums[i];
        st.damped_fraction.assign(st.premium.size(), 1.0);
        s.states.push_back(st);
    }
    return s;
}

LossPanel panel_of(const std::vector<std::string>& states, const std::vector<std::vector<double>>& v, int first) {
    LossPanel p(states, first, first + static_cast<int>(v.front().size()) - 1);
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t t = 0; t < v[i].size(); ++t) p.at(i, t) = v[i][t];
    return p;
}

}  // namespace

TEST_CASE("backtest: worked example") {
    const auto rep = backtest(flat_schedule({"LA"}, {{10, 10}}, 2013), panel_of({"LA"}, {{5, 20}}, 2013), 2013, 2014);
    CHECK(rep.surplus == -5.0);
    CHECK(rep.abs_deviation == 15.0);
    CHECK(rep.insolvent_count == 1);
    CHECK(rep.states[0].insolvent);
    CHECK(backtest_to_csv(rep) == "state,cum_premium,cum_loss,balance,insolvent\nLA,20,25,-5,1\n");
}

TEST_CASE("backtest: damped revenue counts") {
    auto s = flat_schedule({"LA"}, {{10, 10}}, 2013);
    s.states[0].damped_fraction = {0.5, 1.0};
    const auto rep = backtest(s, panel_of({"LA"}, {{5, 10}}, 2013), 2013, 2014);
    CHECK(rep.surplus == 0.0);
    CHECK(rep.states[0].cum_premium == 15.0);
    CHECK_FALSE(rep.states[0].insolvent);
}

TEST_CASE("backtest: coverage errors") {
    const auto s = flat_schedule({"LA"}, {{10, 10}}, 2013);
    CHECK_THROWS_AS(backtest(s, panel_of({"LA"}, {{5, 20}}, 2013), 2012, 2014), Error);
    CHECK_THROWS_AS(backtest(s, panel_of({"TX"}, {{5, 20}}, 2013), 2013, 2014), Error);
    CHECK_THROWS_AS(backtest(s, panel_of({"LA"}, {{5, 20}}, 2010), 2013, 2014), Error);
}

TEST_CASE("backtest: AD bounds |S| and self-backtest is zero") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1e6);
    for (int k = 0; k < 100; ++k) {
        std::vector<std::string> st{"A", "B", "C"};
        std::vector<std::vector<double>> prem(3, std::vector<double>(5)), loss(3, std::vector<double>(5));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t t = 0; t < 5; ++t) {
                prem[i][t] = u(rng);
                loss[i][t] = u(rng);
            }
        auto s = flat_schedule(st, prem, 2013);
        for (auto& x : s.states[1].damped_fraction) x = 0.3;
        const auto rep = backtest(s, panel_of(st, loss, 2013), 2013, 2017);
        CHECK(rep.abs_deviation >= std::abs(rep.surplus) - 1e-9 * rep.abs_deviation);
        const auto self = backtest(s, schedule_as_losses(s), 2013, 2017);
        CHECK(self.surplus == 0.0);
        CHECK(self.abs_deviation == 0.0);
        CHECK(self.insolvent_count == 0);
    }
}

TEST_CASE("sweep: flat losses at gamma2 = 0 leave the buffer as surplus") {
    const auto actual = panel_of({"LA"}, {{100, 100, 100, 100}}, 2013);
    RoParams rp;
    rp.delta = 40.0;
    const StateStats st{100.0, 0.0, 0, 1};
    const SchedulePricer price = [&](Scheme, double g) {
        rp.gamma2 = g;
        PremiumSchedule s;
        s.scheme = Scheme::ro1;
        s.first_year = 2013;
        s.num_years = 4;
        s.states.push_back(solve_ro1("LA", st, 4, rp));
        return s;
    };
    const auto table = sweep_gamma2({Scheme::ro1}, {0.0}, price, actual, 2013, 2016, 1);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].surplus == Approx(40.0));
    CHECK(table.rows[0].insolvent_count == 0);
}

TEST_CASE("sweep: invariant schemes priced once, errors recorded") {
    const auto actual = panel_of({"LA", "TX"}, {{5, 20}, {1, 1}}, 2013);
    std::atomic<int> hist_calls{0};
    const SchedulePricer price = [&](Scheme s, double g) {
        if (s == Scheme::hist) {
            ++hist_calls;
            auto out = flat_schedule({"LA", "TX"}, {{10, 10}, {3, 3}}, 2013);
            out.scheme = Scheme::hist;
            return out;
        }
        if (g > 0.5) fail(ErrorKind::infeasible, "no premium for this gamma2");
        return flat_schedule({"LA", "TX"}, {{10 + g, 12}, {1, 1}}, 2013);
    };
    const std::vector<double> grid{0.0, 0.4, 0.8};
    const auto table = sweep_gamma2({Scheme::ro1, Scheme::hist}, grid, price, actual, 2013, 2014);
    CHECK(hist_calls == 1);
    CHECK(table.cells == 6);
    CHECK(table.errors.size() == 1);
    CHECK(table.errors[0].gamma2 == 0.8);
    std::vector<FrontierRow> hist;
    for (const auto& r : table.rows)
        if (r.scheme == Scheme::hist) hist.push_back(r);
    REQUIRE(hist.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(hist[i].gamma2 == grid[i]);
        CHECK(hist[i].surplus == hist[0].surplus);
        CHECK(hist[i].insolvent_count == hist[0].insolvent_count);
    }
    CHECK_THROWS_AS(sweep_gamma2({Scheme::ro1}, {}, price, actual, 2013, 2014), Error);
    CHECK_THROWS_AS(sweep_gamma2({Scheme::ro1}, {0.5, 0.1}, price, actual, 2013, 2014), Error);
}

TEST_CASE("frontier: CSV output sorted and round-trips") {
    std::vector<FrontierRow> rows{{Scheme::ro2, 0.4, 3, -12.5, 40.0}, {Scheme::cma, 0.0, 36, -1e10, 2e10}};
    TempDir dir;
    const auto path = dir.file("frontier.csv");
    emit_frontier(FrontierTable{rows, {}, 2}, path);
    const auto text = csv::read_file(path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.rfind("scheme,gamma2,insolvent_count,surplus,abs_deviation\ncma,", 0) == 0);
    auto sorted = rows;
    sort_frontier(sorted);
    CHECK(parse_frontier(path) == sorted);
    CHECK(frontier_to_csv(rows) == frontier_to_csv(sorted));
    CHECK_THROWS_AS(emit_frontier(FrontierTable{}, path), Error);
}
