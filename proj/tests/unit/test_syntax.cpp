#include <doctest.h>

#include <pla/errors.hpp>
#include <pla/rng.hpp>
#include <pla/syntax.hpp>

using namespace pla;

namespace {

const Catalog& cat() { return Catalog::builtin(); }

Formula random_formula(Rng& rng, int depth) {
    static const char* vars[] = {"x", "y", "z"};
    auto var = [&] { return std::string(vars[rng.below(3)]); };
    const std::uint64_t pick = depth <= 0 ? rng.below(3) : rng.below(10);
    switch (pick) {
        case 0: return Formula::constant(static_cast<double>(rng.below(1001)) / 1000.0);
        case 1: return Formula::eq(var(), var());
        case 2: return Formula::atom("E", {var(), var()});
        case 3: return Formula::negation(random_formula(rng, depth - 1));
        case 4: return Formula::conjunction(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
        case 5: return Formula::disjunction(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
        case 6: return Formula::implication(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
        case 7: return Formula::product(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
        case 8: {
            static const char* names[] = {"am", "gm", "max", "min", "tsum", "lengthinv"};
            std::vector<std::string> bound{var()};
            if (rng.below(3) == 0) bound.push_back(bound[0] == "z" ? "y" : "z");
            return Formula::agg(cat().aggregator(names[rng.below(6)]), {random_formula(rng, depth - 1)}, bound,
                                {random_formula(rng, depth - 1)});
        }
        default: {
            auto agg = rng.below(2) ? cat().aggregator("mu1u")
                                    : cat().aggregator("proportional", {{"beta", 0.25}});
            std::vector<Formula> inner{random_formula(rng, depth - 1)};
            if (agg->arity == 2) inner.push_back(random_formula(rng, depth - 1));
            std::vector<Formula> conds(inner.size(), random_formula(rng, depth - 1));
            if (agg->arity == 2 && rng.below(2)) conds[1] = random_formula(rng, depth - 1);
            return Formula::agg(agg, inner, {var()}, conds);
        }
    }
}

std::size_t error_column(std::string_view text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.column();
    }
    return 0;
}

}  // namespace

TEST_CASE("parsing examples") {
    CHECK(parse("E(x, y)") == Formula::atom("E", {"x", "y"}));
    CHECK(parse("x = y") == Formula::eq("x", "y"));
    CHECK(parse("0.7") == Formula::constant(0.7));
    CHECK(parse("true") == Formula::truth());
    CHECK(parse("not E(x, y) and E(y, x)") ==
          Formula::conjunction(Formula::negation(parse("E(x, y)")), parse("E(y, x)")));
    CHECK(parse("E(x, y) or E(y, x) and x = y") ==
          Formula::disjunction(parse("E(x, y)"), Formula::conjunction(parse("E(y, x)"), parse("x = y"))));
    CHECK(parse("E(x, y) -> E(y, x) -> x = y") ==
          Formula::implication(parse("E(x, y)"), Formula::implication(parse("E(y, x)"), parse("x = y"))));
    CHECK(parse("prod(E(x, y), 0.5)") == Formula::product(parse("E(x, y)"), Formula::constant(0.5)));
    CHECK(parse("exists y. E(x, y)") == Formula::exists({"y"}, parse("E(x, y)")));
    CHECK(parse("forall y z. E(y, z)") == Formula::forall({"y", "z"}, parse("E(y, z)")));
    CHECK(parse("am{E(x, y) : y : true}") ==
          Formula::agg(cat().aggregator("am"), {parse("E(x, y)")}, {"y"}, {Formula::truth()}));
    CHECK(parse("am{E(x, y) : y, z : true}") == parse("am{E(x, y) : y z : true}"));
    CHECK(parse("proportional[beta=0.3]{E(x, y) : y : true}") ==
          Formula::agg(cat().aggregator("proportional", {{"beta", 0.3}}), {parse("E(x, y)")}, {"y"},
                       {Formula::truth()}));
    CHECK(parse("mu1u{E(x, y), E(y, x) : y : x = x, true}") ==
          Formula::agg(cat().aggregator("mu1u"), {parse("E(x, y)"), parse("E(y, x)")}, {"y"},
                       {parse("x = x"), Formula::truth()}));
}

TEST_CASE("pretty printing") {
    CHECK(pretty(parse("am{E(x,y):y:true}")) == "am{E(x, y) : y : 1}");
    CHECK(pretty(parse("not E(x, y) and 0.5")) == "((not E(x, y)) and 0.5)");
    CHECK(pretty(parse("E(x, y) -> x = y")) == "(E(x, y) -> x = y)");
    CHECK(pretty(parse("proportional[beta=0.3]{E(x, y) : y z : true}")) ==
          "proportional[beta=0.3]{E(x, y) : y z : 1}");
}

TEST_CASE("parse errors carry positions") {
    CHECK(error_column("E(x, y) and") == 12);
    CHECK(error_column("E(x, y) $ E(y, x)") == 9);
    CHECK(error_column("nosuch{E(x, y) : y : true}") == 1);
    CHECK(error_column("am{E(x, y) : : true}") == 14);
    CHECK(error_column("am[beta=0.5]{E(x, y) : y : true}") == 1);
    CHECK(error_column("E(x, y))") == 8);
    CHECK(error_column("1.5") == 1);
    CHECK(error_column("not(E(x, y)") == 12);
    try {
        parse("E(x, y)\n  and $");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 7);
    }
}

TEST_CASE("random formulas survive a print and parse round trip") {
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
        Formula f = random_formula(rng, 4);
        const std::string text = pretty(f);
        INFO(text);
        Formula g = parse(text);
        CHECK(g == f);
        CHECK(pretty(g) == text);
    }
}
