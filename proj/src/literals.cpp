#include <pla/errors.hpp>
#include <pla/literals.hpp>

#include <algorithm>
#include <functional>

namespace pla {

Literal Literal::equal(std::string u, std::string v, bool positive) {
    Literal l;
    l.kind = Kind::eq;
    l.positive = positive;
    l.vars = {std::move(u), std::move(v)};
    return l.normalized();
}

Literal Literal::atom(std::string symbol, std::vector<std::string> vars, bool positive) {
    if (vars.empty()) throw Error("atom literal needs at least one variable");
    Literal l;
    l.kind = Kind::atom;
    l.positive = positive;
    l.symbol = std::move(symbol);
    l.vars = std::move(vars);
    return l;
}

Literal Literal::negated() const {
    Literal l = *this;
    l.positive = !positive;
    return l;
}

Literal Literal::normalized() const {
    Literal l = *this;
    if (l.kind == Kind::eq) {
        if (l.vars.size() != 2) throw Error("equality literal needs exactly two variables");
        if (l.vars[1] < l.vars[0]) std::swap(l.vars[0], l.vars[1]);
    }
    return l;
}

LiteralConjunction::LiteralConjunction(std::vector<Literal> literals) {
    for (auto& l : literals) literals_.push_back(l.normalized());
    std::sort(literals_.begin(), literals_.end());
    literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
}

LiteralConjunction LiteralConjunction::operator&(const LiteralConjunction& other) const {
    std::vector<Literal> all = literals_;
    all.insert(all.end(), other.literals_.begin(), other.literals_.end());
    return LiteralConjunction(std::move(all));
}

LiteralConjunction LiteralConjunction::with(const Literal& literal) const {
    std::vector<Literal> all = literals_;
    all.push_back(literal);
    return LiteralConjunction(std::move(all));
}

std::set<std::string> LiteralConjunction::variables() const {
    std::set<std::string> out;
    for (const auto& l : literals_) out.insert(l.vars.begin(), l.vars.end());
    return out;
}

namespace {

Formula literal_formula(const Literal& l) {
    Formula f = l.kind == Literal::Kind::eq ? Formula::eq(l.vars[0], l.vars[1]) : Formula::atom(l.symbol, l.vars);
    return l.positive ? f : Formula::negation(f);
}

std::string literal_text(const Literal& l) {
    std::string body;
    if (l.kind == Literal::Kind::eq) {
        body = l.vars[0] + " = " + l.vars[1];
    } else {
        body = l.symbol + "(";
        for (std::size_t i = 0; i < l.vars.size(); ++i) body += (i ? ", " : "") + l.vars[i];
        body += ")";
    }
    return l.positive ? body : "not " + body;
}

}  // namespace

Formula LiteralConjunction::to_formula() const {
    if (literals_.empty()) return Formula::truth();
    Formula f = literal_formula(literals_.front());
    for (std::size_t i = 1; i < literals_.size(); ++i) f = Formula::conjunction(f, literal_formula(literals_[i]));
    return f;
}

bool LiteralConjunction::holds(const Structure& a, const VarAssignment& assignment) const {
    auto value = [&assignment](const std::string& v) {
        auto it = assignment.find(v);
        if (it == assignment.end()) throw EvaluationError("unbound variable '" + v + "'");
        return it->second;
    };
    for (const auto& l : literals_) {
        bool truth;
        if (l.kind == Literal::Kind::eq) {
            truth = value(l.vars[0]) == value(l.vars[1]);
        } else {
            std::vector<std::size_t> t;
            t.reserve(l.vars.size());
            for (const auto& v : l.vars) t.push_back(value(v));
            truth = a.holds(l.symbol, t);
        }
        if (truth != l.positive) return false;
    }
    return true;
}

std::map<std::string, std::string> equality_classes(const LiteralConjunction& g) {
    std::map<std::string, std::string> parent;
    for (const auto& v : g.variables()) parent[v] = v;
    std::function<std::string(const std::string&)> find = [&](const std::string& v) -> std::string {
        std::string& p = parent[v];
        if (p != v) p = find(p);
        return p;
    };
    for (const auto& l : g.literals()) {
        if (l.kind != Literal::Kind::eq || !l.positive) continue;
        std::string a = find(l.vars[0]);
        std::string b = find(l.vars[1]);
        if (a == b) continue;
        // The least name becomes the representative.
        if (b < a) std::swap(a, b);
        parent[b] = a;
    }
    std::map<std::string, std::string> out;
    for (const auto& [v, p] : parent) out[v] = find(v);
    return out;
}

bool literal_sat(const LiteralConjunction& g) {
    auto rep = equality_classes(g);
    std::map<std::pair<std::string, std::vector<std::string>>, bool> atoms;
    for (const auto& l : g.literals()) {
        if (l.kind == Literal::Kind::eq) {
            if (!l.positive && rep[l.vars[0]] == rep[l.vars[1]]) return false;
            continue;
        }
        std::vector<std::string> collapsed;
        for (const auto& v : l.vars) collapsed.push_back(rep[v]);
        auto [it, inserted] = atoms.emplace(std::make_pair(l.symbol, std::move(collapsed)), l.positive);
        if (!inserted && it->second != l.positive) return false;
    }
    return true;
}

std::string render(const LiteralConjunction& g) {
    if (g.empty()) return "true";
    std::string out;
    for (std::size_t i = 0; i < g.literals().size(); ++i) {
        if (i) out += " and ";
        out += literal_text(g.literals()[i]);
    }
    return out;
}

namespace {

void check_xbar(std::span<const std::string> xbar) {
    std::set<std::string> seen;
    for (const auto& v : xbar) {
        if (v.empty()) throw Error("variable names must be nonempty");
        if (!seen.insert(v).second) throw Error("variable '" + v + "' repeated in the type variables");
    }
}

// Set partitions of [0, m) as restricted growth strings.
void partitions(std::size_t m, std::vector<std::size_t>& block, std::size_t i, std::size_t blocks,
                std::vector<std::vector<std::size_t>>& out) {
    if (i == m) {
        out.push_back(block);
        return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
        block[i] = b;
        partitions(m, block, i + 1, std::max(blocks, b + 1), out);
    }
}

// All tuples of the given arity over reps, in lexicographic order.
std::vector<std::vector<std::string>> tuples_over(const std::vector<std::string>& reps, std::size_t arity) {
    std::vector<std::vector<std::string>> out;
    if (reps.empty()) return out;
    std::vector<std::size_t> idx(arity, 0);
    while (true) {
        std::vector<std::string> t;
        for (std::size_t i : idx) t.push_back(reps[i]);
        out.push_back(std::move(t));
        std::size_t pos = arity;
        while (pos > 0 && ++idx[pos - 1] == reps.size()) idx[--pos] = 0;
        if (pos == 0) break;
    }
    return out;
}

}  // namespace

std::vector<LiteralConjunction> complete_types(std::span<const std::string> xbar, const Signature& signature,
                                               std::size_t cap) {
    check_xbar(xbar);
    if (xbar.size() > cap)
        throw Error("complete types over " + std::to_string(xbar.size()) + " variables exceed the cap of " +
                    std::to_string(cap));
    std::vector<std::vector<std::size_t>> parts;
    std::vector<std::size_t> block(xbar.size(), 0);
    partitions(xbar.size(), block, 0, 0, parts);

    std::vector<LiteralConjunction> out;
    for (const auto& part : parts) {
        std::size_t blocks = part.empty() ? 0 : *std::max_element(part.begin(), part.end()) + 1;
        std::vector<std::string> reps(blocks);
        for (std::size_t i = 0; i < xbar.size(); ++i)
            if (reps[part[i]].empty() || xbar[i] < reps[part[i]]) reps[part[i]] = xbar[i];
        std::vector<Literal> base;
        for (std::size_t i = 0; i < xbar.size(); ++i)
            if (xbar[i] != reps[part[i]]) base.push_back(Literal::equal(reps[part[i]], xbar[i]));
        for (std::size_t a = 0; a < blocks; ++a)
            for (std::size_t b = a + 1; b < blocks; ++b) base.push_back(Literal::equal(reps[a], reps[b], false));

        std::vector<Literal> atoms;
        for (const auto& [symbol, arity] : signature.symbols())
            for (auto& t : tuples_over(reps, arity)) atoms.push_back(Literal::atom(symbol, std::move(t)));
        if (atoms.size() > 20) throw Error("too many atoms over the type variables to enumerate complete types");

        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << atoms.size()); ++mask) {
            std::vector<Literal> lits = base;
            for (std::size_t i = 0; i < atoms.size(); ++i)
                lits.push_back((mask >> i) & 1U ? atoms[i].negated() : atoms[i]);
            out.emplace_back(std::move(lits));
        }
    }
    return out;
}

bool is_complete_type(const LiteralConjunction& theta, std::span<const std::string> xbar,
                      const Signature& signature) {
    std::set<std::string> allowed(xbar.begin(), xbar.end());
    for (const auto& v : theta.variables())
        if (!allowed.count(v)) return false;
    if (!literal_sat(theta)) return false;
    auto rep = equality_classes(theta);
    auto rep_of = [&rep](const std::string& v) {
        auto it = rep.find(v);
        return it == rep.end() ? v : it->second;
    };
    std::set<std::pair<std::string, std::string>> distinct;
    std::set<std::pair<std::string, std::vector<std::string>>> decided;
    for (const auto& l : theta.literals()) {
        if (l.kind == Literal::Kind::eq) {
            if (!l.positive) {
                auto a = rep_of(l.vars[0]), b = rep_of(l.vars[1]);
                distinct.emplace(std::min(a, b), std::max(a, b));
            }
            continue;
        }
        std::vector<std::string> collapsed;
        for (const auto& v : l.vars) collapsed.push_back(rep_of(v));
        decided.emplace(l.symbol, std::move(collapsed));
    }
    std::set<std::string> reps;
    for (const auto& v : xbar) reps.insert(rep_of(v));
    std::vector<std::string> rep_list(reps.begin(), reps.end());
    for (std::size_t a = 0; a < rep_list.size(); ++a)
        for (std::size_t b = a + 1; b < rep_list.size(); ++b)
            if (!distinct.count({rep_list[a], rep_list[b]})) return false;
    for (const auto& [symbol, arity] : signature.symbols())
        for (auto& t : tuples_over(rep_list, arity))
            if (!decided.count({symbol, t})) return false;
    return true;
}

}  // namespace pla
