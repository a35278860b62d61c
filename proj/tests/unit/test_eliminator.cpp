#include <doctest.h>

#include "../support/oracles.hpp"

#include <pla/eliminator.hpp>
#include <pla/rng.hpp>
#include <pla/syntax.hpp>

#include <bit>
#include <cmath>

using namespace pla;

namespace {

IidModel graph_model(double p) {
    IidModel m;
    m.signature.add("E", 2);
    m.probs["E"] = p;
    m.schedule = {50, 100};
    m.seed = 7;
    return m;
}

const Catalog& cat() { return Catalog::builtin(); }

EliminationOptions quick() {
    EliminationOptions o;
    o.probe.trials = 8;
    return o;
}

// The basic formula and its formula translation agree with f on every
// structure with at most max_n elements.
void check_exact(const Formula& f, const L0BasicFormula& b, std::size_t max_n) {
    std::vector<std::string> vars(b.free_vars().begin(), b.free_vars().end());
    const Formula g = b.to_formula();
    oracle::for_all_binary_structures(max_n, [&](const Structure& a) {
        oracle::for_all_assignments(vars, a.domain_size(), [&](const VarAssignment& env) {
            const double want = evaluate(a, f, env);
            REQUIRE(b.evaluate(a, env) == want);
            REQUIRE(evaluate(a, g, env) == want);
        });
    });
}

// F on exact-proportion sequences of length n: largest-remainder counts, exact values.
double exact_value(const AggregatorDef& f, std::span<const FreqParams> params, std::size_t n) {
    std::vector<ValueSeq> seqs;
    for (const auto& p : params) {
        auto counts = largest_remainder_counts(p, n);
        std::vector<double> v;
        for (std::size_t j = 0; j < p.size(); ++j) v.insert(v.end(), counts[j], p[j].c);
        seqs.emplace_back(std::move(v));
    }
    return f(seqs);
}

}  // namespace

TEST_CASE("atoms become two-clause partitions") {
    for (const char* text : {"E(x, y)", "E(x, x)", "x = y", "x = x", "true", "false", "not E(y, x)",
                             "E(x, y) and not x = y", "E(x, y) -> E(y, x)", "E(x, y) or (E(y, z) and x = z)"}) {
        INFO(text);
        Formula f = parse(text);
        L0BasicFormula b = atom_to_basic(f);
        CHECK(b.partition());
        check_exact(f, b, 3);
    }
    CHECK(atom_to_basic(parse("x = x")).clauses().size() == 1);
    CHECK(atom_to_basic(parse("E(x, y)")).clauses().size() == 2);
    CHECK_THROWS_AS(atom_to_basic(parse("0.5")), Error);
    CHECK_THROWS_AS(atom_to_basic(parse("am{E(x, y) : y : true}")), Error);
}

TEST_CASE("connectives combine by refinement") {
    const std::vector<L0BasicFormula> in{atom_to_basic(parse("E(x, y)")), atom_to_basic(parse("E(y, x)"))};
    for (const char* name : {"and", "or", "implies", "prod"}) {
        INFO(name);
        L0BasicFormula b = combine_connective(*cat().connective(name), in);
        CHECK(b.partition());
        CHECK(b.clauses().size() == 4);
        std::vector<Formula> kids{parse("E(x, y)"), parse("E(y, x)")};
        check_exact(Formula::conn(cat().connective(name), kids), b, 3);
    }
    // Contradictory guards are dropped.
    const std::vector<L0BasicFormula> overlap{atom_to_basic(parse("E(x, y)")), atom_to_basic(parse("not E(x, y)"))};
    CHECK(combine_connective(*cat().connective("and"), overlap).clauses().size() == 2);
    const std::vector<L0BasicFormula> single{in[0]};
    CHECK_THROWS_AS(combine_connective(*cat().connective("and"), single), Error);
}

TEST_CASE("rendering basic formulas") {
    CHECK(L0BasicFormula::constant(0.3).render() == "0.3");
    L0BasicFormula b = atom_to_basic(parse("E(x, y)"));
    CHECK(b.render() == "(E(x, y) -> 1) and (not E(x, y) -> 0)");
    L0BasicFormula same({"x"}, {{LiteralConjunction({Literal::atom("E", {"x", "x"})}), 0.4},
                              {LiteralConjunction({Literal::atom("E", {"x", "x"}, false)}), 0.4}},
                        true);
    CHECK(same.render() == "0.4");
    CHECK(same.render(false) == "(E(x, x) -> 0.4) and (not E(x, x) -> 0.4)");
}

TEST_CASE("closed-form limits match direct evaluation on a random grid") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        // Three distinct values with positive proportions.
        double a1 = 0.05 + 0.9 * rng.uniform(), a2 = 0.05 + 0.9 * rng.uniform(), a3 = 0.05 + 0.9 * rng.uniform();
        const double s = a1 + a2 + a3;
        const double c1 = 0.3 * rng.uniform(), c2 = 0.35 + 0.3 * rng.uniform(), c3 = 0.7 + 0.3 * rng.uniform();
        a1 /= s;
        a2 /= s;
        const std::vector<FreqParams> params{FreqParams({{c1, a1}, {c2, a2}, {c3, 1.0 - a1 - a2}}, 1e-9)};
        const double beta = 0.65 + 0.35 * rng.uniform();
        for (auto f : {cat().aggregator("am"), cat().aggregator("gm"), cat().aggregator("max"),
                       cat().aggregator("min"), cat().aggregator("lengthinv"),
                       cat().aggregator("length", {{"beta", beta}})}) {
            INFO(f->display_name());
            if (!f->closed_form_limit) continue;
            auto r = limit_value_detailed(*f, params);
            CHECK(r.method == LimitMethod::closed_form);
            CHECK(std::abs(r.value - exact_value(*f, params, std::size_t{1} << 16)) < 1e-3);
        }
    }
}

TEST_CASE("limits without a closed form are extrapolated") {
    const std::vector<FreqParams> params{FreqParams{{0.2, 0.5}, {0.6, 0.5}}};
    auto r = limit_value_detailed(*cat().aggregator("tsum"), params);
    CHECK(r.method == LimitMethod::extrapolated);
    CHECK(r.value == 1.0);
    CHECK(r.ladder.size() == 7);
    CHECK(r.ladder.front().first == 1024);

    // A function oscillating with the length never stabilizes.
    AggregatorDef wobble;
    wobble.name = "wobble";
    wobble.eval = [](std::span<const ValueSeq> p) { return std::bit_width(p[0].size()) % 2 ? 1.0 : 0.0; };
    CHECK_THROWS_AS(limit_value(wobble, params), NotStabilized);
}

TEST_CASE("frequency parameters of a type sum to one") {
    IidModel m = graph_model(0.3);
    std::vector<std::string> x{"x"};
    L0BasicFormula inner = combine_connective(
        *cat().connective("prod"),
        std::vector<L0BasicFormula>{atom_to_basic(parse("E(x, y)")), atom_to_basic(parse("E(y, y)"))});
    for (const auto& theta : complete_types(x, m.signature)) {
        FreqParams p = type_freq_params(inner, theta, x, m);
        double total = 0.0;
        for (const auto& pt : p) total += pt.alpha;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.mass_at(1.0) == doctest::Approx(0.09));
    }
}

TEST_CASE("eliminating simple aggregations") {
    IidModel m = graph_model(0.3);
    auto r = eliminate(parse("am{E(x, y) : y : true}"), m, quick());
    CHECK(r.basic.free_vars() == std::vector<std::string>{"x"});
    for (const auto& c : r.basic.clauses()) CHECK(std::abs(c.value - 0.3) < 1e-9);
    REQUIRE(r.trace.aggregations.size() == 1);
    CHECK(r.trace.aggregations[0].path.empty());
    for (const auto& t : r.trace.aggregations[0].types) CHECK(t.ct == Verdict::pass);

    CHECK(eliminate(parse("max{E(x, y) : y : true}"), m, quick()).basic.render() == "1");
    CHECK(eliminate(parse("not max{E(x, y) : y : true}"), m, quick()).basic.render() == "0");
    CHECK(eliminate(parse("lengthinv{E(x, y) : y : true}"), m, quick()).basic.render() == "0");
    CHECK(eliminate(parse("E(x, y) and x = y"), m, quick()).basic.clauses().size() == 4);

    auto gm = eliminate(parse("gm{E(x, y) -> 0.5 : y : true}"), m, quick());
    for (const auto& c : gm.basic.clauses()) CHECK(c.value == doctest::Approx(std::pow(0.5, 0.3)));
}

TEST_CASE("nested aggregations reach a fixed point") {
    IidModel m = graph_model(0.3);
    Formula f = parse("am{E(x, y) and am{E(y, z) : z : true} : y : true}");
    auto r = eliminate(f, m, quick());
    CHECK(r.trace.aggregations.size() == 2);
    CHECK(r.trace.aggregations[0].path == ".0.1");
    for (const auto& c : r.basic.clauses()) CHECK(c.value == doctest::Approx(0.09));
    // A quantifier-free result eliminates to itself.
    auto again = eliminate(r.basic.to_formula(), m, quick());
    check_exact(r.basic.to_formula(), again.basic, 3);
    CHECK(again.trace.aggregations.empty());
}

TEST_CASE("discontinuities are reported") {
    IidModel m = graph_model(0.3);
    try {
        eliminate(parse("proportional[beta=0.3]{E(x, y) : y : true}"), m, quick());
        FAIL("expected a continuity violation");
    } catch (const ContinuityViolation& e) {
        CHECK(e.path().empty());
        CHECK(e.aggregator() == "proportional[beta=0.3]");
        CHECK(e.report().verdict == Verdict::fail);
    }
    CHECK_THROWS_AS(eliminate(parse("max{x = y : y : true}"), m, quick()), ContinuityViolation);

    auto nudged = quick();
    nudged.allow_nudge = true;
    auto r = eliminate(parse("proportional[beta=0.3]{E(x, y) : y : true}"), m, nudged);
    REQUIRE(r.trace.aggregations.size() == 1);
    CHECK(r.trace.aggregations[0].nudged_to.has_value());
}

TEST_CASE("out-of-scope inputs are rejected") {
    IidModel m = graph_model(0.3);
    CHECK_THROWS_AS(eliminate(parse("am{E(x, y) : y : E(x, y)}"), m, quick()), Error);
    CHECK_THROWS_AS(eliminate(parse("F(x)"), m, quick()), Error);
    CHECK_THROWS_AS(eliminate(parse("am{E(x, y) : y z w : true}"), m, quick()), Error);
    CHECK_THROWS_AS(eliminate(parse("E(a, b) and E(c, d)"), m, quick()), Error);
}
