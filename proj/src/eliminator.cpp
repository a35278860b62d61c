#include <pla/eliminator.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace pla {

L0BasicFormula::L0BasicFormula(std::vector<std::string> free_vars, std::vector<Clause> clauses, bool partition)
    : free_vars_(std::move(free_vars)), clauses_(std::move(clauses)), partition_(partition) {
    std::sort(free_vars_.begin(), free_vars_.end());
    free_vars_.erase(std::unique(free_vars_.begin(), free_vars_.end()), free_vars_.end());
    const std::set<std::string> allowed(free_vars_.begin(), free_vars_.end());
    for (const auto& c : clauses_) {
        if (!(c.value >= 0.0 && c.value <= 1.0)) throw Error("clause value outside [0,1]");
        for (const auto& v : c.guard.variables())
            if (!allowed.count(v)) throw Error("guard '" + pla::render(c.guard) + "' uses non-free variable " + v);
    }
}

L0BasicFormula L0BasicFormula::constant(double c) { return L0BasicFormula({}, {Clause{{}, c}}, true); }

double L0BasicFormula::evaluate(const Structure& a, const VarAssignment& assignment) const {
    // min over clauses of (guard -> value), which is the active value for a partition.
    double v = 1.0;
    for (const auto& c : clauses_)
        if (c.guard.holds(a, assignment)) v = std::min(v, c.value);
    return v;
}

Formula L0BasicFormula::to_formula() const {
    std::optional<Formula> out;
    for (const auto& c : clauses_) {
        Formula clause = c.guard.empty() ? Formula::constant(c.value)
                                         : Formula::implication(c.guard.to_formula(), Formula::constant(c.value));
        out = out ? Formula::conjunction(*out, clause) : clause;
    }
    Formula f = out ? *out : Formula::truth();
    // Pad with v = v so the formula has exactly the declared free variables.
    auto present = pla::free_vars(f);
    for (const auto& v : free_vars_)
        if (!present.count(v)) f = Formula::conjunction(f, Formula::eq(v, v));
    return f;
}

std::string L0BasicFormula::render(bool merge_equal_values) const {
    if (clauses_.empty()) return "true";
    auto guard_text = [](const LiteralConjunction& g) {
        return g.size() > 1 ? "(" + pla::render(g) + ")" : pla::render(g);
    };
    std::vector<std::pair<double, std::vector<const LiteralConjunction*>>> groups;
    for (const auto& c : clauses_) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == c.value; });
        if (merge_equal_values && it != groups.end())
            it->second.push_back(&c.guard);
        else
            groups.push_back({c.value, {&c.guard}});
    }
    if (merge_equal_values && partition_ && groups.size() == 1) return format_number(groups.front().first);
    std::string out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& [value, guards] = groups[i];
        std::string lhs;
        for (std::size_t j = 0; j < guards.size(); ++j) lhs += (j ? " or " : "") + guard_text(*guards[j]);
        if (guards.size() > 1) lhs = "(" + lhs + ")";
        out += (i ? " and " : "") + ("(" + lhs + " -> " + format_number(value) + ")");
    }
    return out;
}

namespace {

std::vector<std::string> sorted_free(const Formula& f) {
    auto fv = free_vars(f);
    return {fv.begin(), fv.end()};
}

void check_zero_one(double v, const char* what) {
    if (v != 0.0 && v != 1.0) throw Error(std::string(what) + " takes a value other than 0 or 1");
}

}  // namespace

L0BasicFormula atom_to_basic(const Formula& f) {
    const auto& node = f.node();
    if (const auto* c = std::get_if<ConstNode>(&node)) {
        check_zero_one(c->value, "constant");
        return L0BasicFormula::constant(c->value);
    }
    if (const auto* e = std::get_if<EqNode>(&node)) {
        if (e->left == e->right) return L0BasicFormula({e->left}, {Clause{{}, 1.0}}, true);
        auto pos = Literal::equal(e->left, e->right);
        return L0BasicFormula({e->left, e->right},
                              {Clause{LiteralConjunction({pos}), 1.0}, Clause{LiteralConjunction({pos.negated()}), 0.0}},
                              true);
    }
    if (const auto* at = std::get_if<AtomNode>(&node)) {
        auto pos = Literal::atom(at->symbol, at->vars);
        return L0BasicFormula(at->vars,
                              {Clause{LiteralConjunction({pos}), 1.0}, Clause{LiteralConjunction({pos.negated()}), 0.0}},
                              true);
    }
    if (const auto* cn = std::get_if<ConnNode>(&node)) {
        std::vector<L0BasicFormula> parts;
        for (const auto& child : cn->children) parts.push_back(atom_to_basic(child));
        L0BasicFormula out = combine_connective(*cn->connective, parts);
        for (const auto& c : out.clauses()) check_zero_one(c.value, ("connective " + cn->connective->name).c_str());
        return out;
    }
    throw Error("atom_to_basic needs an aggregation-free formula");
}

L0BasicFormula combine_connective(const ConnectiveDef& c, std::span<const L0BasicFormula> basics) {
    if (basics.size() != c.arity)
        throw Error("connective " + c.name + " expects " + std::to_string(c.arity) + " arguments, got " +
                    std::to_string(basics.size()));
    std::vector<std::string> vars;
    for (const auto& b : basics) {
        if (!b.partition()) throw Error("combine_connective needs partition-form inputs");
        vars.insert(vars.end(), b.free_vars().begin(), b.free_vars().end());
    }

    std::vector<Clause> out;
    std::vector<std::size_t> pick(basics.size(), 0);
    std::vector<double> values(basics.size());
    for (const auto& b : basics)
        if (b.clauses().empty()) return L0BasicFormula(vars, {}, true);
    while (true) {
        LiteralConjunction guard;
        for (std::size_t i = 0; i < basics.size(); ++i) {
            const Clause& cl = basics[i].clauses()[pick[i]];
            guard = guard & cl.guard;
            values[i] = cl.value;
        }
        if (literal_sat(guard)) out.push_back(Clause{std::move(guard), c(values)});
        std::size_t pos = basics.size();
        while (pos > 0 && ++pick[pos - 1] == basics[pos - 1].clauses().size()) pick[--pos] = 0;
        if (pos == 0) break;
    }
    if (out.empty()) throw Error("common refinement of partitions is empty");
    return L0BasicFormula(std::move(vars), std::move(out), true);
}

std::string to_string(LimitMethod m) { return m == LimitMethod::closed_form ? "closed_form" : "extrapolated"; }

LimitResult limit_value_detailed(const AggregatorDef& f, std::span<const FreqParams> params,
                                 const LimitOptions& options) {
    if (params.size() != f.arity)
        throw Error(f.display_name() + " expects " + std::to_string(f.arity) + " parameter sets, got " +
                    std::to_string(params.size()));
    if (f.closed_form_limit) return {f.closed_form_limit(params), LimitMethod::closed_form, {}};
    if (options.min_log2 >= options.max_log2 || options.max_log2 > 30)
        throw Error("limit ladder needs min_log2 < max_log2 <= 30");

    LimitResult result;
    result.method = LimitMethod::extrapolated;
    for (std::size_t e = options.min_log2; e <= options.max_log2; ++e) {
        const std::size_t n = std::size_t{1} << e;
        std::vector<ValueSeq> seqs;
        for (const auto& p : params) {
            auto counts = largest_remainder_counts(p, n);
            std::vector<double> entries;
            entries.reserve(n);
            for (std::size_t j = 0; j < p.size(); ++j) entries.insert(entries.end(), counts[j], p[j].c);
            seqs.emplace_back(std::move(entries));
        }
        result.ladder.emplace_back(n, f(seqs));
    }
    const double last = result.ladder.back().second;
    const double prev = result.ladder[result.ladder.size() - 2].second;
    if (!(std::abs(last - prev) < options.gate))
        throw NotStabilized(f.display_name() + " did not stabilize: F(" + std::to_string(result.ladder.back().first) +
                            ") = " + format_number(last) + " vs F(" +
                            std::to_string(result.ladder[result.ladder.size() - 2].first) +
                            ") = " + format_number(prev));
    result.value = last;
    return result;
}

double limit_value(const AggregatorDef& f, std::span<const FreqParams> params, const LimitOptions& options) {
    return limit_value_detailed(f, params, options).value;
}

FreqParams type_freq_params(const L0BasicFormula& inner, const LiteralConjunction& theta,
                            std::span<const std::string> xbar, const IidModel& model) {
    std::map<double, double> mass;
    double total = 0.0;
    for (const auto& c : inner.clauses()) {
        if (!literal_sat(c.guard & theta)) continue;
        const double a = analytic_alpha(c.guard, theta, xbar, model);
        mass[c.value] += a;
        total += a;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw Error("frequency parameters relative to '" + render(theta) + "' sum to " + format_number(total) +
                    " instead of 1 (discrepancy " + format_number(total - 1.0) + ")");
    std::vector<FreqPoint> points;
    for (const auto& [c, a] : mass) points.push_back({c, a});
    return FreqParams(std::move(points), 1e-9);
}

namespace {

using ProbeKey = std::pair<std::string, std::vector<FreqParams>>;
using ProbeCache = std::map<ProbeKey, std::pair<ProbeReport, ProbeReport>>;

const std::pair<ProbeReport, ProbeReport>& probes(ProbeCache& cache, const AggregatorDef& f,
                                                  const std::vector<FreqParams>& params, const ProbeConfig& config) {
    ProbeKey key{f.display_name(), params};
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(std::move(key), std::make_pair(ct_probe(f, params, config), up_probe(f, params, config)))
                 .first;
    return it->second;
}

std::string params_text(const std::vector<FreqParams>& params) {
    std::string out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        out += i ? "; " : "";
        out += "{";
        for (std::size_t j = 0; j < params[i].size(); ++j)
            out += (j ? ", " : "") + ("(" + format_number(params[i][j].c) + ", " + format_number(params[i][j].alpha) + ")");
        out += "}";
    }
    return out;
}

std::string node_label(const std::string& path) { return path.empty() ? "<root>" : path; }

}  // namespace

L0BasicFormula eliminate_aggregation(const AggregatorDef& f, std::span<const L0BasicFormula> inner,
                                     std::span<const std::string> xbar, std::span<const std::string> ybar,
                                     const IidModel& model, const EliminationOptions& options,
                                     EliminationTrace* trace, const std::string& path) {
    if (inner.size() != f.arity)
        throw Error(f.display_name() + " expects " + std::to_string(f.arity) + " arguments, got " +
                    std::to_string(inner.size()));
    if (ybar.empty()) throw Error("aggregation without bound variables");
    if (xbar.size() > options.max_free_vars)
        throw Error("aggregation at " + node_label(path) + " has " + std::to_string(xbar.size()) +
                    " free variables, above the cap of " + std::to_string(options.max_free_vars));
    if (ybar.size() > options.max_bound_vars)
        throw Error("aggregation at " + node_label(path) + " binds " + std::to_string(ybar.size()) +
                    " variables, above the cap of " + std::to_string(options.max_bound_vars));
    for (const auto& b : inner)
        if (!b.partition()) throw Error("eliminate_aggregation needs partition-form inner formulas");

    const auto types = complete_types(xbar, model.signature, options.max_free_vars);
    std::vector<std::vector<FreqParams>> params;
    for (const auto& theta : types) {
        std::vector<FreqParams> ps;
        for (const auto& b : inner) ps.push_back(type_freq_params(b, theta, xbar, model));
        params.push_back(std::move(ps));
    }

    AggregatorDef current = f;
    std::optional<std::string> nudged_to;
    ProbeCache cache;
    std::vector<Clause> clauses;
    std::vector<TypeStep> steps;
    for (std::size_t t = 0; t < types.size(); ++t) {
        const auto& [ct, up] = probes(cache, current, params[t], options.probe);
        if (ct.verdict != Verdict::pass || up.verdict != Verdict::pass) {
            const ProbeReport& bad = ct.verdict != Verdict::pass ? ct : up;
            const std::string message = current.display_name() + " at " + node_label(path) +
                                        " is not continuous at frequency parameters " + params_text(params[t]) +
                                        " for type '" + render(types[t]) + "' (" + bad.kind +
                                        " probe: " + to_string(bad.verdict) + ")";
            // One nudge per node; afterwards every type is re-probed with the new threshold.
            if (options.allow_nudge && current.threshold && !nudged_to) {
                try {
                    current = nudge(current, params[t], options.probe, options.nudge);
                } catch (const ContinuityViolation&) {
                    throw;
                } catch (const Error&) {
                    throw ContinuityViolation(message, path, current.display_name(), types[t], params[t], bad);
                }
                nudged_to = current.display_name();
                clauses.clear();
                steps.clear();
                t = static_cast<std::size_t>(-1);
                continue;
            }
            throw ContinuityViolation(message, path, current.display_name(), types[t], params[t], bad);
        }
        LimitResult limit;
        try {
            limit = limit_value_detailed(current, params[t], options.limit);
        } catch (const NotStabilized& e) {
            throw NotStabilized(std::string(e.what()) + " at " + node_label(path));
        }
        clauses.push_back(Clause{types[t], limit.value});
        steps.push_back(TypeStep{types[t], params[t], ct.verdict, up.verdict, ct.max_deviation, up.max_deviation,
                                 limit.value, limit.method});
    }

    if (trace)
        trace->aggregations.push_back(AggregationStep{path, f.display_name(), {xbar.begin(), xbar.end()},
                                                      {ybar.begin(), ybar.end()}, std::move(steps), nudged_to});
    return L0BasicFormula({xbar.begin(), xbar.end()}, std::move(clauses), true);
}

namespace {

L0BasicFormula eliminate_node(const Formula& f, const IidModel& model, const EliminationOptions& options,
                              EliminationTrace& trace, const std::string& path) {
    const auto& node = f.node();
    if (const auto* c = std::get_if<ConstNode>(&node)) return L0BasicFormula::constant(c->value);
    if (std::holds_alternative<EqNode>(node) || std::holds_alternative<AtomNode>(node)) return atom_to_basic(f);
    if (const auto* cn = std::get_if<ConnNode>(&node)) {
        std::vector<L0BasicFormula> parts;
        for (std::size_t i = 0; i < cn->children.size(); ++i)
            parts.push_back(eliminate_node(cn->children[i], model, options, trace, path + "." + std::to_string(i)));
        L0BasicFormula out = combine_connective(*cn->connective, parts);
        ConnectiveStep step{path, cn->connective->name, {}, out.clauses().size()};
        for (const auto& p : parts) step.input_sizes.push_back(p.clauses().size());
        trace.connectives.push_back(std::move(step));
        return out;
    }
    const auto& ag = std::get<AggNode>(node);
    for (const auto& cond : ag.conditions) {
        const auto* c = cond.as<ConstNode>();
        if (!c || c->value != 1.0)
            throw Error("aggregation at " + node_label(path) +
                        " has a condition other than true, which is not in the shipped instantiation");
    }
    const auto xbar = sorted_free(f);
    std::vector<L0BasicFormula> inner;
    for (std::size_t i = 0; i < ag.inner.size(); ++i)
        inner.push_back(eliminate_node(ag.inner[i], model, options, trace, path + "." + std::to_string(i)));
    return eliminate_aggregation(*ag.aggregator, inner, xbar, ag.bound, model, options, &trace, path);
}

}  // namespace

EliminationResult eliminate(const Formula& f, const IidModel& model, const EliminationOptions& options) {
    model.validate();
    for (const auto& [symbol, arity] : used_symbols(f)) {
        if (!model.signature.contains(symbol)) throw Error("symbol " + symbol + " is not in the model signature");
        if (model.signature.arity(symbol) != arity)
            throw Error("symbol " + symbol + " is used with arity " + std::to_string(arity) + " but declared with " +
                        std::to_string(model.signature.arity(symbol)));
    }
    if (free_vars(f).size() > options.max_free_vars)
        throw Error("formula has more free variables than the cap of " + std::to_string(options.max_free_vars));
    EliminationTrace trace;
    L0BasicFormula basic = eliminate_node(f, model, options, trace, "");
    return {std::move(basic), std::move(trace)};
}

EquivalenceReport validate(const Formula& f, const L0BasicFormula& result, const IidModel& model, double epsilon,
                           std::size_t samples, std::uint64_t seed) {
    return estimate_equivalence(f, result.to_formula(), model, epsilon, samples, seed);
}

}  // namespace pla
