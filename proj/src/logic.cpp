#include <pla/errors.hpp>
#include <pla/logic.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pla {

// ---------------------------------------------------------------- Signature

Signature::Signature(std::map<std::string, std::size_t, std::less<>> arities) {
    for (const auto& [name, arity] : arities) add(name, arity);
}

void Signature::add(const std::string& symbol, std::size_t arity) {
    if (symbol.empty()) throw Error("relation symbol names must be nonempty");
    if (arity == 0) throw Error("relation symbol " + symbol + " must have arity >= 1");
    auto [it, inserted] = arities_.emplace(symbol, arity);
    if (!inserted && it->second != arity) throw Error("relation symbol " + symbol + " declared with two arities");
}

bool Signature::contains(std::string_view symbol) const { return arities_.find(symbol) != arities_.end(); }

std::size_t Signature::arity(std::string_view symbol) const {
    auto it = arities_.find(symbol);
    if (it == arities_.end()) throw EvaluationError("unknown relation symbol '" + std::string(symbol) + "'");
    return it->second;
}

std::size_t Signature::index(std::string_view symbol) const {
    auto it = arities_.find(symbol);
    if (it == arities_.end()) throw EvaluationError("unknown relation symbol '" + std::string(symbol) + "'");
    return static_cast<std::size_t>(std::distance(arities_.begin(), it));
}

// ---------------------------------------------------------------- Structure

Structure::Structure(Signature signature, std::size_t domain_size)
    : signature_(std::move(signature)), n_(domain_size) {
    if (n_ == 0) throw Error("structures must have a nonempty domain");
    for (const auto& [name, arity] : signature_.symbols()) {
        double cells = std::pow(static_cast<double>(n_), static_cast<double>(arity));
        if (cells > static_cast<double>(std::uint64_t{1} << 34))
            throw Error("relation table for " + name + " is too large");
        std::size_t count = 1;
        for (std::size_t i = 0; i < arity; ++i) count *= n_;
        tables_.emplace_back((count + 63) / 64, 0);
    }
}

void Structure::check_tuple(std::size_t symbol_index, std::span<const std::size_t> tuple) const {
    auto it = signature_.symbols().begin();
    std::advance(it, static_cast<std::ptrdiff_t>(symbol_index));
    if (tuple.size() != it->second)
        throw EvaluationError("relation " + it->first + " has arity " + std::to_string(it->second) + ", got " +
                              std::to_string(tuple.size()) + " arguments");
    for (std::size_t e : tuple)
        if (e >= n_) throw EvaluationError("element " + std::to_string(e) + " outside the domain");
}

std::size_t Structure::tuple_code(std::span<const std::size_t> tuple) const {
    std::size_t code = 0;
    for (std::size_t e : tuple) code = code * n_ + e;
    return code;
}

void Structure::set_code(std::size_t symbol_index, std::size_t code, bool value) {
    auto& word = tables_[symbol_index][code >> 6];
    std::uint64_t bit = std::uint64_t{1} << (code & 63);
    word = value ? (word | bit) : (word & ~bit);
}

void Structure::set(std::string_view symbol, std::span<const std::size_t> tuple, bool value) {
    std::size_t idx = signature_.index(symbol);
    check_tuple(idx, tuple);
    set_code(idx, tuple_code(tuple), value);
}

bool Structure::holds(std::string_view symbol, std::span<const std::size_t> tuple) const {
    std::size_t idx = signature_.index(symbol);
    check_tuple(idx, tuple);
    return holds_code(idx, tuple_code(tuple));
}

std::vector<Tuple> Structure::tuples(std::string_view symbol) const {
    std::size_t idx = signature_.index(symbol);
    std::size_t arity = signature_.arity(symbol);
    std::vector<Tuple> out;
    Tuple t(arity, 0);
    std::size_t code = 0;
    while (true) {
        if (holds_code(idx, code)) out.push_back(t);
        ++code;
        std::size_t pos = arity;
        while (pos > 0 && ++t[pos - 1] == n_) t[--pos] = 0;
        if (pos == 0) break;
    }
    return out;
}

std::size_t Structure::count(std::string_view symbol) const {
    std::size_t idx = signature_.index(symbol);
    std::size_t total = 0;
    for (std::uint64_t w : tables_[idx]) total += static_cast<std::size_t>(__builtin_popcountll(w));
    return total;
}

// ---------------------------------------------------------------- Formula

Formula Formula::constant(double c) {
    if (!std::isfinite(c) || c < -1e-12 || c > 1.0 + 1e-12)
        throw Error("constant " + std::to_string(c) + " outside [0,1]");
    return Formula(ConstNode{std::clamp(c, 0.0, 1.0)});
}

Formula Formula::eq(std::string left, std::string right) {
    if (left.empty() || right.empty()) throw Error("variable names must be nonempty");
    return Formula(EqNode{std::move(left), std::move(right)});
}

Formula Formula::atom(std::string symbol, std::vector<std::string> vars) {
    if (symbol.empty()) throw Error("relation symbol names must be nonempty");
    if (vars.empty()) throw Error("atom " + symbol + " needs at least one variable");
    for (const auto& v : vars)
        if (v.empty()) throw Error("variable names must be nonempty");
    return Formula(AtomNode{std::move(symbol), std::move(vars)});
}

Formula Formula::conn(ConnectivePtr connective, std::vector<Formula> children) {
    if (!connective) throw Error("null connective");
    if (children.size() != connective->arity)
        throw Error("connective " + connective->name + " expects " + std::to_string(connective->arity) +
                    " arguments, got " + std::to_string(children.size()));
    return Formula(ConnNode{std::move(connective), std::move(children)});
}

Formula Formula::agg(AggregatorPtr aggregator, std::vector<Formula> inner, std::vector<std::string> bound,
                     std::vector<Formula> conditions) {
    if (!aggregator) throw Error("null aggregator");
    const auto& name = aggregator->display_name();
    if (inner.size() != aggregator->arity)
        throw Error("aggregator " + name + " expects " + std::to_string(aggregator->arity) + " formulas, got " +
                    std::to_string(inner.size()));
    if (bound.empty()) throw Error("aggregator " + name + " needs at least one bound variable");
    std::vector<std::string> sorted = bound;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("bound variables of " + name + " must be distinct");
    if (conditions.size() == 1 && inner.size() > 1) conditions.assign(inner.size(), conditions.front());
    if (conditions.size() != inner.size())
        throw Error("aggregator " + name + " expects " + std::to_string(inner.size()) + " conditions, got " +
                    std::to_string(conditions.size()));
    return Formula(AggNode{std::move(aggregator), std::move(inner), std::move(bound), std::move(conditions)});
}

Formula Formula::negation(Formula f) { return conn(Catalog::builtin().connective("not"), {std::move(f)}); }

Formula Formula::conjunction(Formula a, Formula b) {
    return conn(Catalog::builtin().connective("and"), {std::move(a), std::move(b)});
}

Formula Formula::disjunction(Formula a, Formula b) {
    return conn(Catalog::builtin().connective("or"), {std::move(a), std::move(b)});
}

Formula Formula::implication(Formula a, Formula b) {
    return conn(Catalog::builtin().connective("implies"), {std::move(a), std::move(b)});
}

Formula Formula::product(Formula a, Formula b) {
    return conn(Catalog::builtin().connective("prod"), {std::move(a), std::move(b)});
}

Formula Formula::exists(std::vector<std::string> bound, Formula f) {
    return agg(Catalog::builtin().aggregator("max"), {std::move(f)}, std::move(bound), {truth()});
}

Formula Formula::forall(std::vector<std::string> bound, Formula f) {
    return agg(Catalog::builtin().aggregator("min"), {std::move(f)}, std::move(bound), {truth()});
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->index() != b.node_->index()) return false;
    return std::visit(
        [&b](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(*b.node_);
            if constexpr (std::is_same_v<T, ConstNode>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, EqNode>) {
                return x.left == y.left && x.right == y.right;
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                return x.symbol == y.symbol && x.vars == y.vars;
            } else if constexpr (std::is_same_v<T, ConnNode>) {
                return x.connective->name == y.connective->name && x.connective->arity == y.connective->arity &&
                       x.children == y.children;
            } else {
                return x.aggregator->display_name() == y.aggregator->display_name() &&
                       x.aggregator->arity == y.aggregator->arity && x.bound == y.bound && x.inner == y.inner &&
                       x.conditions == y.conditions;
            }
        },
        *a.node_);
}

std::set<std::string> free_vars(const Formula& f) {
    return std::visit(
        [](const auto& x) -> std::set<std::string> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ConstNode>) {
                return {};
            } else if constexpr (std::is_same_v<T, EqNode>) {
                return {x.left, x.right};
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                return {x.vars.begin(), x.vars.end()};
            } else if constexpr (std::is_same_v<T, ConnNode>) {
                std::set<std::string> out;
                for (const auto& c : x.children) out.merge(free_vars(c));
                return out;
            } else {
                std::set<std::string> out;
                for (const auto& c : x.inner) out.merge(free_vars(c));
                for (const auto& c : x.conditions) out.merge(free_vars(c));
                for (const auto& v : x.bound) out.erase(v);
                return out;
            }
        },
        f.node());
}

namespace {

void collect_symbols(const Formula& f, std::map<std::string, std::size_t, std::less<>>& out) {
    std::visit(
        [&out](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, AtomNode>) {
                auto [it, inserted] = out.emplace(x.symbol, x.vars.size());
                if (!inserted && it->second != x.vars.size())
                    throw Error("relation symbol " + x.symbol + " used with two arities");
            } else if constexpr (std::is_same_v<T, ConnNode>) {
                for (const auto& c : x.children) collect_symbols(c, out);
            } else if constexpr (std::is_same_v<T, AggNode>) {
                for (const auto& c : x.inner) collect_symbols(c, out);
                for (const auto& c : x.conditions) collect_symbols(c, out);
            }
        },
        f.node());
}

}  // namespace

std::map<std::string, std::size_t, std::less<>> used_symbols(const Formula& f) {
    std::map<std::string, std::size_t, std::less<>> out;
    collect_symbols(f, out);
    return out;
}

bool is_aggregation_free(const Formula& f) {
    if (f.as<AggNode>()) return false;
    if (const auto* c = f.as<ConnNode>())
        return std::all_of(c->children.begin(), c->children.end(), [](const Formula& g) { return is_aggregation_free(g); });
    return true;
}

// ---------------------------------------------------------------- evaluation

struct CompiledFormula::Impl {
    enum class Kind { constant, eq, atom, conn, agg };

    struct Node {
        Kind kind = Kind::constant;
        double value = 0.0;
        std::vector<std::size_t> slots;     // eq: two slots, atom: argument slots, agg: bound slots
        std::size_t symbol = 0;
        std::vector<std::size_t> children;  // conn: children, agg: inner formulas
        std::vector<std::size_t> conditions;  // agg: distinct compiled conditions
        std::vector<std::size_t> cond_of;     // agg: argument i uses conditions[cond_of[i]]
        const ConnectiveDef* connective = nullptr;
        const AggregatorDef* aggregator = nullptr;
    };

    std::vector<Node> nodes;
    std::size_t root = 0;
    std::size_t slot_count = 0;
    std::vector<std::string> free_order;
    std::vector<std::size_t> symbol_arity;
    // Keep catalog entries alive for the raw pointers above.
    std::vector<ConnectivePtr> connectives;
    std::vector<AggregatorPtr> aggregators;

    std::size_t compile(const Formula& f, std::map<std::string, std::size_t, std::less<>>& scope,
                        const Signature& sig) {
        Node node;
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                auto slot_of = [&scope](const std::string& v) {
                    auto it = scope.find(v);
                    if (it == scope.end()) throw EvaluationError("unbound variable '" + v + "'");
                    return it->second;
                };
                if constexpr (std::is_same_v<T, ConstNode>) {
                    node.kind = Kind::constant;
                    node.value = x.value;
                } else if constexpr (std::is_same_v<T, EqNode>) {
                    node.kind = Kind::eq;
                    node.slots = {slot_of(x.left), slot_of(x.right)};
                } else if constexpr (std::is_same_v<T, AtomNode>) {
                    node.kind = Kind::atom;
                    if (!sig.contains(x.symbol))
                        throw EvaluationError("unknown relation symbol '" + x.symbol + "'");
                    if (sig.arity(x.symbol) != x.vars.size())
                        throw EvaluationError("relation " + x.symbol + " has arity " +
                                              std::to_string(sig.arity(x.symbol)) + ", used with " +
                                              std::to_string(x.vars.size()));
                    node.symbol = sig.index(x.symbol);
                    for (const auto& v : x.vars) node.slots.push_back(slot_of(v));
                } else if constexpr (std::is_same_v<T, ConnNode>) {
                    node.kind = Kind::conn;
                    connectives.push_back(x.connective);
                    node.connective = x.connective.get();
                    for (const auto& c : x.children) node.children.push_back(compile(c, scope, sig));
                } else {
                    node.kind = Kind::agg;
                    aggregators.push_back(x.aggregator);
                    node.aggregator = x.aggregator.get();
                    auto inner_scope = scope;
                    for (const auto& v : x.bound) {
                        node.slots.push_back(slot_count);
                        inner_scope[v] = slot_count++;
                    }
                    for (const auto& c : x.inner) node.children.push_back(compile(c, inner_scope, sig));
                    for (std::size_t i = 0; i < x.conditions.size(); ++i) {
                        std::size_t same = node.conditions.size();
                        for (std::size_t j = 0; j < i; ++j)
                            if (x.conditions[j] == x.conditions[i]) {
                                same = node.cond_of[j];
                                break;
                            }
                        if (same == node.conditions.size())
                            node.conditions.push_back(compile(x.conditions[i], inner_scope, sig));
                        node.cond_of.push_back(same);
                    }
                }
            },
            f.node());
        nodes.push_back(std::move(node));
        return nodes.size() - 1;
    }

    double eval(std::size_t idx, const Structure& a, std::vector<std::size_t>& env) const {
        const Node& node = nodes[idx];
        switch (node.kind) {
            case Kind::constant:
                return node.value;
            case Kind::eq:
                return env[node.slots[0]] == env[node.slots[1]] ? 1.0 : 0.0;
            case Kind::atom: {
                std::size_t code = 0;
                const std::size_t n = a.domain_size();
                for (std::size_t s : node.slots) code = code * n + env[s];
                return a.holds_code(node.symbol, code) ? 1.0 : 0.0;
            }
            case Kind::conn: {
                double args[8];
                std::vector<double> big;
                double* vals = args;
                if (node.children.size() > 8) {
                    big.resize(node.children.size());
                    vals = big.data();
                }
                for (std::size_t i = 0; i < node.children.size(); ++i) vals[i] = eval(node.children[i], a, env);
                return (*node.connective)(std::span<const double>(vals, node.children.size()));
            }
            case Kind::agg:
                return eval_agg(node, a, env);
        }
        return 0.0;
    }

    double eval_agg(const Node& node, const Structure& a, std::vector<std::size_t>& env) const {
        const std::size_t n = a.domain_size();
        const std::size_t k = node.children.size();
        const std::size_t m = node.slots.size();
        std::vector<std::vector<double>> seqs(k);
        std::vector<double> cond_values(node.conditions.size());
        std::vector<std::size_t> saved(m);
        for (std::size_t j = 0; j < m; ++j) {
            saved[j] = env[node.slots[j]];
            env[node.slots[j]] = 0;
        }
        while (true) {
            for (std::size_t c = 0; c < node.conditions.size(); ++c)
                cond_values[c] = eval(node.conditions[c], a, env);
            for (std::size_t i = 0; i < k; ++i)
                if (cond_values[node.cond_of[i]] == 1.0) seqs[i].push_back(eval(node.children[i], a, env));
            std::size_t pos = m;
            while (pos > 0) {
                std::size_t s = node.slots[pos - 1];
                if (++env[s] < n) break;
                env[s] = 0;
                --pos;
            }
            if (pos == 0) break;
        }
        for (std::size_t j = 0; j < m; ++j) env[node.slots[j]] = saved[j];
        for (const auto& s : seqs)
            if (s.empty()) return 0.0;
        std::vector<ValueSeq> args;
        args.reserve(k);
        for (auto& s : seqs) args.emplace_back(std::move(s));
        return (*node.aggregator)(args);
    }
};

CompiledFormula::CompiledFormula(const Formula& f, const Signature& signature, std::vector<std::string> free_order)
    : impl_(std::make_unique<Impl>()) {
    std::map<std::string, std::size_t, std::less<>> scope;
    for (const auto& v : free_order) {
        if (scope.count(v)) throw EvaluationError("variable '" + v + "' listed twice");
        scope[v] = impl_->slot_count++;
    }
    impl_->free_order = std::move(free_order);
    impl_->root = impl_->compile(f, scope, signature);
}

CompiledFormula::~CompiledFormula() = default;
CompiledFormula::CompiledFormula(CompiledFormula&&) noexcept = default;
CompiledFormula& CompiledFormula::operator=(CompiledFormula&&) noexcept = default;

const std::vector<std::string>& CompiledFormula::free_order() const noexcept { return impl_->free_order; }

double CompiledFormula::evaluate(const Structure& a, std::span<const std::size_t> values) const {
    if (values.size() != impl_->free_order.size())
        throw EvaluationError("expected " + std::to_string(impl_->free_order.size()) + " variable values, got " +
                              std::to_string(values.size()));
    std::vector<std::size_t> env(impl_->slot_count, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= a.domain_size())
            throw EvaluationError("variable '" + impl_->free_order[i] + "' assigned an element outside the domain");
        env[i] = values[i];
    }
    double v = impl_->eval(impl_->root, a, env);
    if (!(v >= 0.0 && v <= 1.0)) throw EvaluationError("formula value outside [0,1]");
    return v;
}

double evaluate(const Structure& a, const Formula& f, const VarAssignment& assignment) {
    std::vector<std::string> order;
    std::vector<std::size_t> values;
    for (const auto& v : free_vars(f)) {
        auto it = assignment.find(v);
        if (it == assignment.end()) throw EvaluationError("unbound variable '" + v + "'");
        order.push_back(v);
        values.push_back(it->second);
    }
    CompiledFormula compiled(f, a.signature(), std::move(order));
    return compiled.evaluate(a, values);
}

std::vector<Tuple> defined_set(const Structure& a, const Formula& f, const VarAssignment& assignment,
                               std::span<const std::string> ybars) {
    std::vector<std::string> order(ybars.begin(), ybars.end());
    std::vector<std::size_t> values(ybars.size(), 0);
    for (const auto& v : free_vars(f)) {
        if (std::find(ybars.begin(), ybars.end(), v) != ybars.end()) continue;
        auto it = assignment.find(v);
        if (it == assignment.end()) throw EvaluationError("unbound variable '" + v + "'");
        order.push_back(v);
        values.push_back(it->second);
    }
    CompiledFormula compiled(f, a.signature(), std::move(order));
    const std::size_t n = a.domain_size();
    const std::size_t m = ybars.size();
    std::vector<Tuple> out;
    while (true) {
        if (compiled.evaluate(a, values) == 1.0) out.emplace_back(values.begin(), values.begin() + m);
        std::size_t pos = m;
        while (pos > 0 && ++values[pos - 1] == n) values[--pos] = 0;
        if (pos == 0) break;
    }
    return out;
}

bool satisfies(const Structure& a, const Formula& f, const VarAssignment& assignment) {
    return evaluate(a, f, assignment) == 1.0;
}

}  // namespace pla
