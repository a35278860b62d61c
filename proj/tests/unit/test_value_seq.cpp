#include <doctest.h>

#include <pla/errors.hpp>
#include <pla/value_seq.hpp>

using namespace pla;

TEST_CASE("value sequences are nonempty with entries in [0,1]") {
    CHECK_THROWS_AS(ValueSeq(std::vector<double>{}), Error);
    CHECK_THROWS_AS(ValueSeq({0.5, 1.5}), Error);
    CHECK_THROWS_AS(ValueSeq({-0.1}), Error);
    ValueSeq p{0.0, 1.0, 1.0, 0.5};
    CHECK(p.size() == 4);
    CHECK(p[2] == 1.0);
    CHECK(p.count_equal(1.0) == 2);
    CHECK(p.count_equal(0.25) == 0);
}

TEST_CASE("frequency parameters need distinct points and unit mass") {
    CHECK_THROWS_AS(FreqParams(std::vector<FreqPoint>{}), Error);
    CHECK_THROWS_AS(FreqParams({{0.5, 0.5}, {0.5, 0.5}}), Error);
    CHECK_THROWS_AS(FreqParams({{0.5, 0.6}, {0.2, 0.5}}), Error);
    CHECK_THROWS_AS(FreqParams({{1.5, 1.0}}), Error);
    CHECK_THROWS_AS(FreqParams({{0.5, -0.5}, {0.2, 1.5}}), Error);

    FreqParams p{{1.0, 0.3}, {0.0, 0.7}};
    CHECK(p.size() == 2);
    CHECK(p.mass_at(1.0) == doctest::Approx(0.3));
    CHECK(p.mass_at(0.5) == 0.0);

    // A looser tolerance admits sums that are off by rounding.
    CHECK_NOTHROW(FreqParams({{0.1, 0.1 + 1e-10}, {0.2, 0.9}}, 1e-9));
    CHECK_THROWS_AS(FreqParams({{0.1, 0.1 + 1e-10}, {0.2, 0.9}}), Error);
}

TEST_CASE("frequency parameters order lexicographically") {
    FreqParams a{{0.0, 0.5}, {1.0, 0.5}};
    FreqParams b{{0.0, 0.4}, {1.0, 0.6}};
    CHECK(b < a);
    CHECK(a == FreqParams({{0.0, 0.5}, {1.0, 0.5}}));
}
