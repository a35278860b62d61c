#include <doctest.h>

#include "../support/oracles.hpp"

#include <pla/errors.hpp>
#include <pla/rng.hpp>
#include <pla/seq_metrics.hpp>

using namespace pla;

namespace {

ValueSeq random_seq(Rng& rng, std::size_t max_len) {
    std::vector<double> v(1 + rng.below(max_len));
    // Coarse values make ties and exact zeros common.
    for (auto& x : v) x = rng.below(3) == 0 ? static_cast<double>(rng.below(5)) / 4.0 : rng.uniform();
    return ValueSeq(std::move(v));
}

}  // namespace

TEST_CASE("step functions") {
    StepFunction f({0.0, 0.5, 1.0});
    CHECK(f(0.0) == 0.0);
    CHECK(f(0.4) == 0.5);
    CHECK(f(1.0) == 1.0);
    CHECK_THROWS_AS(f(1.5), Error);
    CHECK_THROWS_AS(StepFunction({}), Error);
    auto u = unordered_rep(ValueSeq{1.0, 0.0, 0.5});
    CHECK(std::vector<double>(u.values().begin(), u.values().end()) == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("mu1u identifies sequences with the same distribution") {
    CHECK(mu1u(ValueSeq{0, 0.5, 1}, ValueSeq{0, 0, 0.5, 0.5, 1, 1}) == 0.0);
    CHECK(mu1u(ValueSeq{1, 0}, ValueSeq{0, 1}) == 0.0);
    CHECK(muinf_o(ValueSeq{1, 0}, ValueSeq{0, 1}) == 1.0);
    CHECK(mu1u(ValueSeq{0}, ValueSeq{1}) == 1.0);
    // (0, 1) against (0, 0, 1): the sorted step functions differ on [1/2, 2/3).
    CHECK(mu1u(ValueSeq{0, 1}, ValueSeq{0, 0, 1}) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("metrics agree with the common-refinement oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        ValueSeq p = random_seq(rng, 30), q = random_seq(rng, 30);
        REQUIRE(mu1u(p, q) == doctest::Approx(oracle::mu1u_by_lcm(p, q)).epsilon(1e-12));
        REQUIRE(muinf_o(p, q) == oracle::muinf_o_by_lcm(p, q));
    }
}

TEST_CASE("pseudometric axioms on random sequences") {
    Rng rng(4);
    for (int trial = 0; trial < 2000; ++trial) {
        ValueSeq p = random_seq(rng, 25), q = random_seq(rng, 25), r = random_seq(rng, 25);
        for (auto d : {&mu1u, &muinf_o}) {
            REQUIRE((*d)(p, p) == 0.0);
            REQUIRE((*d)(p, q) == (*d)(q, p));
            REQUIRE((*d)(p, q) <= 1.0);
            REQUIRE((*d)(p, r) <= (*d)(p, q) + (*d)(q, r) + 1e-12);
        }
        REQUIRE(mu1u(p, q) <= muinf_o(p, q) + 1e-12);
    }
}

TEST_CASE("tuple metrics take the componentwise maximum") {
    std::vector<ValueSeq> p{ValueSeq{0, 1}, ValueSeq{0.5}};
    std::vector<ValueSeq> q{ValueSeq{1, 0}, ValueSeq{0.25}};
    CHECK(mu_tuple(Metric::mu1u, p, q) == 0.25);
    CHECK(mu_tuple(Metric::muinf_o, p, q) == 1.0);
    CHECK_THROWS_AS(mu_tuple(Metric::mu1u, p, std::vector<ValueSeq>{ValueSeq{0}}), Error);
    CHECK_THROWS_AS(mu_tuple(Metric::mu1u, std::vector<ValueSeq>{}, std::vector<ValueSeq>{}), Error);
}

TEST_CASE("mu1u between limiting distributions") {
    FreqParams a{{0.0, 0.5}, {1.0, 0.5}};
    FreqParams b{{0.0, 0.25}, {1.0, 0.75}};
    CHECK(mu1u_limit(a, a) == 0.0);
    CHECK(mu1u_limit(a, b) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(mu1u_limit(FreqParams{{0.2, 1.0}}, FreqParams{{0.7, 1.0}}) == doctest::Approx(0.5).epsilon(1e-15));
    // Finite sequences with exact proportions have the same distance.
    ValueSeq p{0, 0, 1, 1}, q{0, 1, 1, 1};
    CHECK(mu1u(p, q) == doctest::Approx(mu1u_limit(a, b)).epsilon(1e-15));
}
