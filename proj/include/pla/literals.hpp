#pragma once

// Conjunctions of first-order literals: (in)equalities between variables and
// signed relational atoms. These are the guards of L0-basic formulas.

#include <pla/logic.hpp>

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace pla {

struct Literal {
    enum class Kind { eq, atom };

    Kind kind = Kind::atom;
    bool positive = true;
    std::string symbol;             // empty for equalities
    std::vector<std::string> vars;  // two entries for equalities

    static Literal equal(std::string u, std::string v, bool positive = true);
    static Literal atom(std::string symbol, std::vector<std::string> vars, bool positive = true);

    Literal negated() const;
    /// Equalities are stored with their two variables in name order.
    Literal normalized() const;

    friend auto operator<=>(const Literal&, const Literal&) = default;
    friend bool operator==(const Literal&, const Literal&) = default;
};

/// A conjunction of literals; the empty conjunction is true. Literals are kept
/// normalized, sorted and without duplicates, so structural equality is
/// equality of literal sets. Satisfiability is not enforced: see literal_sat.
class LiteralConjunction {
public:
    LiteralConjunction() = default;
    explicit LiteralConjunction(std::vector<Literal> literals);

    const std::vector<Literal>& literals() const noexcept { return literals_; }
    bool empty() const noexcept { return literals_.empty(); }
    std::size_t size() const noexcept { return literals_.size(); }

    LiteralConjunction operator&(const LiteralConjunction& other) const;
    LiteralConjunction with(const Literal& literal) const;

    std::set<std::string> variables() const;

    /// Min-conjunction of the literals; true for the empty conjunction.
    Formula to_formula() const;

    /// Whether every literal holds in a under assignment.
    bool holds(const Structure& a, const VarAssignment& assignment) const;

    friend auto operator<=>(const LiteralConjunction&, const LiteralConjunction&) = default;
    friend bool operator==(const LiteralConjunction&, const LiteralConjunction&) = default;

private:
    std::vector<Literal> literals_;
};

/// Variable -> representative (the least name in its class) under the positive equalities.
std::map<std::string, std::string> equality_classes(const LiteralConjunction& g);

/// Satisfiable iff no inequality joins two variables of one equality class and
/// no atom occurs with both signs after replacing variables by representatives.
bool literal_sat(const LiteralConjunction& g);

/// All satisfiable conjunctions deciding every equality and every atom over
/// xbar (atoms modulo the equality pattern: only class representatives are
/// used). On every structure each tuple satisfies exactly one of them.
/// Throws pla::Error when |xbar| exceeds cap or xbar repeats a variable.
std::vector<LiteralConjunction> complete_types(std::span<const std::string> xbar, const Signature& signature,
                                               std::size_t cap = 3);

bool is_complete_type(const LiteralConjunction& theta, std::span<const std::string> xbar,
                      const Signature& signature);

/// Text in the formula grammar, e.g. "E(x, y) and not x = y"; "true" when empty.
std::string render(const LiteralConjunction& g);

}  // namespace pla
