#include "catpremium/lp.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace catpremium;
using catpremium::lp::kInfinity;
using Catch::Approx;

TEST_CASE("lp: two-variable maximization") {
    lp::LinearProgram P;
    auto x = P.add_variable("x", 0, kInfinity, -1.0);
    auto y = P.add_variable("y", 0, kInfinity, -1.0);
    P.add_row("sum", {{x, 1}, {y, 1}}, 4);
    P.add_row("xcap", {{x, 1}}, 3);
    const auto s = lp::solve_lp(P);
    REQUIRE(s.status == lp::Status::optimal);
    CHECK(s.objective == Approx(-4.0));
    CHECK(lp::check_certificate(P, s).passed());
    for (double d : s.duals) CHECK(d >= 0.0);
}

TEST_CASE("lp: infeasible and unbounded are reported") {
    lp::LinearProgram inf;
    auto x = inf.add_variable("x", -kInfinity, kInfinity, 1.0);
    inf.add_row("ge1", {{x, -1}}, -1);
    inf.add_row("le0", {{x, 1}}, 0);
    CHECK(lp::solve_lp(inf).status == lp::Status::infeasible);

    lp::LinearProgram unb;
    auto z = unb.add_variable("z", 0, kInfinity, -1.0);
    unb.add_row("loose", {{z, -1}}, 5);
    CHECK(lp::solve_lp(unb).status == lp::Status::unbounded);
}

TEST_CASE("lp: free variable bounded by a row") {
    lp::LinearProgram P;
    auto x = P.add_variable("x", -kInfinity, kInfinity, 1.0);
    P.add_row("floor", {{x, -1}}, 3);
    const auto s = lp::solve_lp(P);
    REQUIRE(s.status == lp::Status::optimal);
    CHECK(s.x[x] == Approx(-3.0));
    CHECK(lp::check_certificate(P, s).passed());
}

TEST_CASE("lp: Beale's cycling example terminates at the optimum") {
    lp::LinearProgram P;
    auto x4 = P.add_variable("x4", 0, kInfinity, -0.75);
    auto x5 = P.add_variable("x5", 0, kInfinity, 150);
    auto x6 = P.add_variable("x6", 0, kInfinity, -0.02);
    auto x7 = P.add_variable("x7", 0, kInfinity, 6);
    P.add_row("a", {{x4, 0.25}, {x5, -60}, {x6, -0.04}, {x7, 9}}, 0);
    P.add_row("b", {{x4, 0.5}, {x5, -90}, {x6, -0.02}, {x7, 3}}, 0);
    P.add_row("c", {{x6, 1}}, 1);
    const auto s = lp::solve_lp(P);
    REQUIRE(s.status == lp::Status::optimal);
    CHECK(s.objective == Approx(-0.05).margin(1e-9));
    CHECK(lp::check_certificate(P, s).passed());
}

TEST_CASE("lp: fixed variables and equality pairs") {
    lp::LinearProgram P;
    auto x = P.add_variable("x", 2, 2, 1.0);
    auto y = P.add_variable("y", -kInfinity, kInfinity, 1.0);
    P.add_row("eq_up", {{x, 1}, {y, 1}}, 5);
    P.add_row("eq_dn", {{x, -1}, {y, -1}}, -5);
    const auto s = lp::solve_lp(P);
    REQUIRE(s.status == lp::Status::optimal);
    CHECK(s.x[x] == 2.0);
    CHECK(s.x[y] == Approx(3.0));
}

TEST_CASE("lp: random bounded programs agree with vertex enumeration") {
    std::mt19937_64 rng(20240611);
    int checked = 0;
    for (int k = 0; k < 150; ++k) {
        const std::size_t n = 1 + rng() % 6, m = 1 + rng() % 8;
        const auto P = oracle::random_bounded_lp(rng, n, m, k % 3 == 0);
        const auto ref = oracle::vertex_enumeration(P);
        const auto s = lp::solve_lp(P);
        REQUIRE(ref.feasible);
        INFO("instance " << k << "\n" << lp::to_string(s.status) << "\n" << lp::to_text(P));
        REQUIRE(s.status == lp::Status::optimal);
        CHECK(std::abs(s.objective - ref.objective) <= 1e-6 * (1.0 + std::abs(ref.objective)));
        const auto cert = lp::check_certificate(P, s);
        CHECK(cert.passed());
        ++checked;
    }
    CHECK(checked == 150);
}

TEST_CASE("lp: text dump round-trips bit-exactly") {
    std::mt19937_64 rng(7);
    auto P = oracle::random_bounded_lp(rng, 4, 5, false);
    P.add_variable("free", -kInfinity, kInfinity, 0.1);
    const auto text = lp::to_text(P);
    const auto Q = lp::from_text(text);
    REQUIRE(Q.num_vars() == P.num_vars());
    REQUIRE(Q.num_rows() == P.num_rows());
    for (std::size_t j = 0; j < P.num_vars(); ++j) {
        CHECK(Q.lower(j) == P.lower(j));
        CHECK(Q.upper(j) == P.upper(j));
        CHECK(Q.cost(j) == P.cost(j));
        CHECK(Q.var_name(j) == P.var_name(j));
    }
    for (std::size_t i = 0; i < P.num_rows(); ++i) {
        CHECK(Q.row(i).rhs == P.row(i).rhs);
        REQUIRE(Q.row(i).terms.size() == P.row(i).terms.size());
        for (std::size_t t = 0; t < P.row(i).terms.size(); ++t) {
            CHECK(Q.row(i).terms[t].var == P.row(i).terms[t].var);
            CHECK(Q.row(i).terms[t].coef == P.row(i).terms[t].coef);
        }
    }
    CHECK(lp::to_text(Q) == text);
    CHECK(Q.lower(P.num_vars() - 1) == -kInfinity);
}

TEST_CASE("lp: malformed dumps are rejected") {
    CHECK_THROWS_AS(lp::from_text("nonsense"), Error);
    CHECK_THROWS_AS(lp::from_text("lp 1 0\nvar x 0 abc 1\n"), Error);
}

TEST_CASE("lp: certificate rejects a perturbed solution") {
    lp::LinearProgram P;
    auto x = P.add_variable("x", 0, 10, -1.0);
    P.add_row("cap", {{x, 1}}, 4);
    auto s = lp::solve_lp(P);
    REQUIRE(lp::check_certificate(P, s).passed());
    s.x[x] = 5.0;
    CHECK_FALSE(lp::check_certificate(P, s).passed());
}

TEST_CASE("lp: iteration limit reports stalled") {
    std::mt19937_64 rng(3);
    const auto P = oracle::random_bounded_lp(rng, 6, 8, false);
    lp::SolveOptions opt;
    opt.max_iter = 1;
    const auto s = lp::solve_lp(P, opt);
    CHECK((s.status == lp::Status::stalled || s.status == lp::Status::optimal));
}

TEST_CASE("lp: badly scaled columns agree with vertex enumeration") {
    std::mt19937_64 rng(99);
    for (int k = 0; k < 60; ++k) {
        const std::size_t n = 2 + rng() % 5, m = 2 + rng() % 6;
        const auto base = oracle::random_bounded_lp(rng, n, m, false);
        // x_j = s_j * y_j with s_j up to 1e7: same optimum, wild column norms
        lp::LinearProgram P;
        std::vector<double> sc(n);
        for (std::size_t j = 0; j < n; ++j) {
            sc[j] = std::pow(10.0, static_cast<double>(rng() % 8));
            P.add_variable(base.var_name(j), base.lower(j) / sc[j], base.upper(j) / sc[j], base.cost(j) * sc[j]);
        }
        for (std::size_t i = 0; i < m; ++i) {
            auto terms = base.row(i).terms;
            for (auto& t : terms) t.coef *= sc[t.var];
            P.add_row(base.row(i).name, terms, base.row(i).rhs);
        }
        const auto ref = oracle::vertex_enumeration(base);
        const auto s = lp::solve_lp(P);
        REQUIRE(ref.feasible);
        INFO("instance " << k);
        REQUIRE(s.status == lp::Status::optimal);
        CHECK(std::abs(s.objective - ref.objective) <= 1e-6 * (1.0 + std::abs(ref.objective)));
    }
}
