#include <doctest.h>

#include <pla/errors.hpp>
#include <pla/random_worlds.hpp>
#include <pla/syntax.hpp>

#include <cmath>

using namespace pla;

namespace {

IidModel graph_model(double p) {
    IidModel m;
    m.signature.add("E", 2);
    m.probs["E"] = p;
    m.schedule = {20, 40};
    m.seed = 3;
    return m;
}

Literal E(const char* u, const char* v, bool positive = true) { return Literal::atom("E", {u, v}, positive); }

}  // namespace

TEST_CASE("model validation") {
    IidModel m = graph_model(0.3);
    CHECK_NOTHROW(m.validate());
    CHECK(m.prob("E") == 0.3);
    m.probs["E"] = 1.5;
    CHECK_THROWS_AS(m.validate(), Error);
    m = graph_model(0.3);
    m.probs.erase("E");
    CHECK_THROWS_AS(m.validate(), Error);
    m = graph_model(0.3);
    m.probs["F"] = 0.2;
    CHECK_THROWS_AS(m.validate(), Error);
    m = graph_model(0.3);
    m.schedule = {40, 20};
    CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("degenerate probabilities give empty and complete relations") {
    for (std::size_t n : {1, 5, 17}) {
        CHECK(sample(graph_model(0.0), n, 1).count("E") == 0);
        CHECK(sample(graph_model(1.0), n, 1).count("E") == n * n);
    }
}

TEST_CASE("edge counts are binomial") {
    // Bin(900, 0.3): mean 270, sd sqrt(189).
    const double sd = std::sqrt(900 * 0.3 * 0.7);
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const double c = static_cast<double>(sample(graph_model(0.3), 30, seed).count("E"));
        CHECK(std::abs(c - 270.0) < 4.0 * sd);
        total += c;
    }
    CHECK(std::abs(total / 100.0 - 270.0) < 4.0 * sd / 10.0);
}

TEST_CASE("small worlds are uniform") {
    IidModel m;
    m.signature.add("P", 1);
    m.probs["P"] = 0.5;
    // Four structures with one unary symbol on two elements.
    std::array<int, 4> hits{};
    const int runs = 10000;
    for (int seed = 0; seed < runs; ++seed) {
        Structure a = sample(m, 2, static_cast<std::uint64_t>(seed));
        const std::size_t e0 = 0, e1 = 1;
        hits[(a.holds("P", std::span(&e0, 1)) ? 1 : 0) + (a.holds("P", std::span(&e1, 1)) ? 2 : 0)]++;
    }
    for (int h : hits) CHECK(std::abs(h / static_cast<double>(runs) - 0.25) < 0.02);
}

TEST_CASE("sampling is reproducible") {
    IidModel m = graph_model(0.4);
    CHECK(sample(m, 12, 99) == sample(m, 12, 99));
    CHECK(!(sample(m, 12, 99) == sample(m, 12, 100)));
    CHECK(iid_sampler(m)(12, 99) == sample(m, 12, 99));
}

TEST_CASE("equivalence estimates") {
    IidModel m = graph_model(0.3);
    Formula f = parse("am{E(x, y) : y : true}");
    auto same = estimate_equivalence(f, f, m, 0.0, 10, 5);
    REQUIRE(same.points.size() == 2);
    for (const auto& pt : same.points) {
        CHECK(pt.fraction == 1.0);
        CHECK(pt.worst_sup == 0.0);
        CHECK(pt.samples == 10);
    }
    // E(x, y) and its negation differ by 1 somewhere in every world.
    auto far = estimate_equivalence(parse("E(x, y)"), parse("not E(x, y)"), m, 0.5, 5, 5);
    for (const auto& pt : far.points) {
        CHECK(pt.fraction == 0.0);
        CHECK(pt.worst_sup == 1.0);
    }
    CHECK_THROWS_AS(estimate_equivalence(parse("E(x, y)"), parse("E(x, x)"), m, 0.1, 5, 5), Error);
    CHECK_THROWS_AS(estimate_equivalence(f, f, m, -0.1, 5, 5), Error);
    CHECK_THROWS_AS(estimate_equivalence(f, f, m, 0.1, 0, 5), Error);
    auto again = estimate_equivalence(f, parse("0.3 and x = x"), m, 0.05, 10, 5);
    auto twice = estimate_equivalence(f, parse("0.3 and x = x"), m, 0.05, 10, 5);
    CHECK(again.points[1].worst_sup == twice.points[1].worst_sup);
}

TEST_CASE("analytic frequency parameters") {
    IidModel m = graph_model(0.3);
    std::vector<std::string> x{"x"};
    LiteralConjunction loop({E("x", "x")});
    LiteralConjunction no_loop({E("x", "x", false)});
    CHECK(analytic_alpha(LiteralConjunction(), loop, x, m) == 1.0);
    CHECK(analytic_alpha(LiteralConjunction({E("x", "y")}), loop, x, m) == doctest::Approx(0.3));
    CHECK(analytic_alpha(LiteralConjunction({E("x", "y"), E("y", "x")}), loop, x, m) == doctest::Approx(0.09));
    CHECK(analytic_alpha(LiteralConjunction({E("x", "y", false), E("y", "y")}), loop, x, m) ==
          doctest::Approx(0.21));
    CHECK(analytic_alpha(LiteralConjunction({E("x", "x")}), loop, x, m) == 1.0);
    CHECK(analytic_alpha(LiteralConjunction({E("x", "x")}), no_loop, x, m) == 0.0);
    // A bound variable pinned to a free one selects a vanishing fraction.
    CHECK(analytic_alpha(LiteralConjunction({Literal::equal("x", "y")}), loop, x, m) == 0.0);
    CHECK(analytic_alpha(LiteralConjunction({Literal::equal("x", "y", false), E("x", "y")}), loop, x, m) ==
          doctest::Approx(0.3));
}

TEST_CASE("Monte Carlo frequencies agree with the analytic ones") {
    IidModel m = graph_model(0.3);
    std::vector<std::string> x{"x"}, y{"y"};
    LiteralConjunction theta({E("x", "x")});
    std::vector<LiteralConjunction> guards{
        LiteralConjunction({E("x", "y")}),
        LiteralConjunction({E("x", "y"), E("y", "x")}),
        LiteralConjunction({E("x", "y", false), E("y", "y")}),
        LiteralConjunction(),
    };
    FreqEstimateOptions opt;
    opt.scope = TupleScope::Generic;
    auto est = estimate_freq_params(guards, theta, x, y, m, 300, 20, 11, opt);
    REQUIRE(est.size() == guards.size());
    for (std::size_t i = 0; i < guards.size(); ++i) {
        INFO(render(guards[i]));
        const double a = analytic_alpha(guards[i], theta, x, m);
        CHECK(est[i].worlds == 20);
        CHECK(std::abs(est[i].mean - a) <= 3.0 * est[i].std_error + 1e-3);
    }
}
