#include "catpremium/baselines.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

using namespace catpremium;
using Catch::Approx;

namespace {

LossPanel one_state(const std::vector<double>& v, int first = 2000) {
    LossPanel p({"LA"}, first, first + static_cast<int>(v.size()) - 1);
    for (std::size_t t = 0; t < v.size(); ++t) p.at(0, t) = v[t];
    return p;
}

}  // namespace

TEST_CASE("cma: rolling mean of prior years") {
    auto s = cma_schedule(one_state({10, 20, 30, 40}), 2003, 2003);
    CHECK(s.states[0].premium == std::vector<double>{20.0});
    s = cma_schedule(one_state({0, 0, 0, 5}), 2003, 2003);
    CHECK(s.states[0].premium[0] == 0.0);
    s = cma_schedule(one_state({10, 20, 30, 40, 0}), 2003, 2004);
    CHECK(s.states[0].premium == std::vector<double>{20.0, 25.0});
    CHECK(s.scheme == Scheme::cma);
    CHECK(s.states[0].damped_fraction == std::vector<double>{1.0, 1.0});
    CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("cma: window checks") {
    const auto p = one_state({1, 2, 3});
    CHECK_THROWS_AS(cma_schedule(p, 2000, 2001), Error);
    CHECK_THROWS_AS(cma_schedule(p, 2002, 2001), Error);
    CHECK_THROWS_AS(cma_schedule(p, 2002, 2010), Error);
}

TEST_CASE("cma: permuting history leaves the premium unchanged") {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> h(15);
        for (auto& x : h) x = static_cast<double>(rng() % 100000);
        const double first = cma_schedule(one_state(h), 2014, 2014).states[0].premium[0];
        std::shuffle(h.begin(), h.end() - 1, rng);
        CHECK(cma_schedule(one_state(h), 2014, 2014).states[0].premium[0] == Approx(first).epsilon(1e-14));
    }
}

TEST_CASE("cma: no look-ahead") {
    std::mt19937_64 rng(2);
    std::vector<double> h(20);
    for (auto& x : h) x = static_cast<double>(rng() % 1000);
    const auto base = cma_schedule(one_state(h), 2010, 2019).states[0].premium;
    for (std::size_t j = 10; j < h.size(); ++j) {
        auto bumped = h;
        bumped[j] += 1e6;
        const auto p = cma_schedule(one_state(bumped), 2010, 2019).states[0].premium;
        for (std::size_t t = 0; t < p.size(); ++t) {
            const int year = 2010 + static_cast<int>(t);
            if (year <= 2000 + static_cast<int>(j)) CHECK(p[t] == base[t]);
        }
    }
}

TEST_CASE("hist: passthrough with missing cells") {
    PolicyPanel pol({"LA", "TX"}, 2013, 2014);
    pol.add(0, 2013, 100.0, 1);
    pol.add(0, 2013, 50.0, 1);
    pol.add(0, 2014, 70.0, 1);
    const auto s = hist_schedule(pol, {"LA", "TX"}, 2013, 2014);
    CHECK(s.states[0].premium == std::vector<double>{150.0, 70.0});
    CHECK(s.states[1].premium == std::vector<double>{0.0, 0.0});
    CHECK(s.warnings.size() == 2);
    CHECK(s.scheme == Scheme::hist);
}
