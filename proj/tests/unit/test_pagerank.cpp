#include <doctest.h>

#include "../support/oracles.hpp"

#include <pla/errors.hpp>
#include <pla/pagerank.hpp>
#include <pla/rng.hpp>

#include <cmath>

using namespace pla;

TEST_CASE("stage 0 is the uniform distribution") {
    Formula pr0 = pagerank_formula(0);
    CHECK(free_vars(pr0) == std::set<std::string>{"x"});
    for (std::size_t n = 2; n <= 10; ++n) {
        Structure a = oracle::to_structure(oracle::digraph(n, 0));
        for (std::size_t e = 0; e < n; ++e)
            CHECK(evaluate(a, pr0, {{"x", e}}) == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-15));
    }
}

TEST_CASE("stages agree with power iteration") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        oracle::Digraph g{n, std::vector<std::vector<bool>>(n, std::vector<bool>(n, false))};
        std::vector<std::vector<std::size_t>> out(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (rng.uniform() < 0.4) {
                    g.adj[i][j] = true;
                    out[i].push_back(j);
                }
        Structure a = oracle::to_structure(g);
        std::vector<double> rank(n, 1.0 / static_cast<double>(n));
        for (std::size_t stage = 1; stage <= 3; ++stage) {
            rank = oracle::pagerank_step(out, rank);
            Formula f = pagerank_formula(stage);
            for (std::size_t e = 0; e < n; ++e) CHECK(std::abs(evaluate(a, f, {{"x", e}}) - rank[e]) < 1e-12);
        }
    }
}

TEST_CASE("named formulas") {
    CHECK(named_formula("PR2") == pagerank_formula(2));
    CHECK(named_formula("pr1") == pagerank_formula(1));
    CHECK(!named_formula("PR"));
    CHECK(!named_formula("PRx"));
    CHECK(!named_formula("PR65"));
    CHECK(!named_formula("QR1"));
    CHECK(free_vars(pagerank_formula(2, "v")) == std::set<std::string>{"v"});
    CHECK_THROWS_AS(pagerank_formula(1, "y"), Error);
    CHECK_THROWS_AS(pagerank_formula(1, "z3"), Error);
}
