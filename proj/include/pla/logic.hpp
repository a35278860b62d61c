#pragma once

// Signatures, finite structures, the formula AST and exact evaluation.
//
// A formula is one of
//   Const(c)                         c in [0,1]
//   Eq(u, v)                         1 iff u and v denote the same element
//   Atom(R, vars)                    1 iff the tuple is in R's table
//   Conn(C, children)                C applied to the children's values
//   Agg(F, inner, bound, conditions) F applied to, for each i, the values of
//                                    inner_i over all tuples of the bound
//                                    variables whose condition_i equals 1;
//                                    0 if any of those collections is empty.
// Formulas are immutable and cheap to copy (shared nodes).

#include <pla/catalog.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pla {

/// Finite relational signature: symbol name -> arity (>= 1).
class Signature {
public:
    Signature() = default;
    explicit Signature(std::map<std::string, std::size_t, std::less<>> arities);

    void add(const std::string& symbol, std::size_t arity);
    bool contains(std::string_view symbol) const;
    std::size_t arity(std::string_view symbol) const;
    /// Position of the symbol in name order.
    std::size_t index(std::string_view symbol) const;
    std::size_t size() const noexcept { return arities_.size(); }
    const std::map<std::string, std::size_t, std::less<>>& symbols() const noexcept { return arities_; }

    friend bool operator==(const Signature&, const Signature&) = default;

private:
    std::map<std::string, std::size_t, std::less<>> arities_;
};

using Tuple = std::vector<std::size_t>;

/// A finite structure with domain {0, ..., n-1}; one bit per possible tuple and symbol.
class Structure {
public:
    /// Throws pla::Error for n == 0.
    Structure(Signature signature, std::size_t domain_size);

    const Signature& signature() const noexcept { return signature_; }
    std::size_t domain_size() const noexcept { return n_; }

    void set(std::string_view symbol, std::span<const std::size_t> tuple, bool value = true);
    bool holds(std::string_view symbol, std::span<const std::size_t> tuple) const;

    /// Fast paths for evaluators: symbol by index, tuple by row-major code.
    std::size_t tuple_code(std::span<const std::size_t> tuple) const;
    bool holds_code(std::size_t symbol_index, std::size_t code) const {
        const auto& bits = tables_[symbol_index];
        return (bits[code >> 6] >> (code & 63)) & 1U;
    }
    void set_code(std::size_t symbol_index, std::size_t code, bool value);

    /// All tuples in the symbol's table, in lexicographic order.
    std::vector<Tuple> tuples(std::string_view symbol) const;
    std::size_t count(std::string_view symbol) const;

    friend bool operator==(const Structure&, const Structure&) = default;

private:
    void check_tuple(std::size_t symbol_index, std::span<const std::size_t> tuple) const;

    Signature signature_;
    std::size_t n_;
    std::vector<std::vector<std::uint64_t>> tables_;
};

class Formula;

struct ConstNode {
    double value;
};
struct EqNode {
    std::string left;
    std::string right;
};
struct AtomNode {
    std::string symbol;
    std::vector<std::string> vars;
};
struct ConnNode {
    ConnectivePtr connective;
    std::vector<Formula> children;
};
struct AggNode {
    AggregatorPtr aggregator;
    std::vector<Formula> inner;
    std::vector<std::string> bound;
    std::vector<Formula> conditions;
};

using FormulaNode = std::variant<ConstNode, EqNode, AtomNode, ConnNode, AggNode>;

class Formula {
public:
    /// Constant; throws pla::Error if c is outside [0,1] by more than 1e-12 (clamped otherwise).
    static Formula constant(double c);
    static Formula truth() { return constant(1.0); }
    static Formula falsity() { return constant(0.0); }
    static Formula eq(std::string left, std::string right);
    static Formula atom(std::string symbol, std::vector<std::string> vars);
    /// Throws pla::Error when the child count differs from the connective's arity.
    static Formula conn(ConnectivePtr connective, std::vector<Formula> children);
    /// Throws pla::Error on arity mismatch, empty or repeated bound variables,
    /// or when the number of conditions is neither 1 nor the arity. A single
    /// condition is copied to every argument, so the node always holds k.
    static Formula agg(AggregatorPtr aggregator, std::vector<Formula> inner, std::vector<std::string> bound,
                       std::vector<Formula> conditions);

    // Builders over the builtin catalog.
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);
    static Formula implication(Formula a, Formula b);
    static Formula product(Formula a, Formula b);
    /// max(f : bound : 1)
    static Formula exists(std::vector<std::string> bound, Formula f);
    /// min(f : bound : 1)
    static Formula forall(std::vector<std::string> bound, Formula f);

    const FormulaNode& node() const noexcept { return *node_; }
    template <typename T>
    const T* as() const noexcept {
        return std::get_if<T>(node_.get());
    }

    friend bool operator==(const Formula& a, const Formula& b);

private:
    explicit Formula(FormulaNode node) : node_(std::make_shared<const FormulaNode>(std::move(node))) {}
    std::shared_ptr<const FormulaNode> node_;
};

using VarAssignment = std::map<std::string, std::size_t, std::less<>>;

std::set<std::string> free_vars(const Formula& f);

/// Relation symbols with the arities they are used at; throws pla::Error when
/// one symbol occurs with two different arities.
std::map<std::string, std::size_t, std::less<>> used_symbols(const Formula& f);

/// True when no aggregation node occurs in f.
bool is_aggregation_free(const Formula& f);

/// A formula compiled against a signature: variables resolved to slots and
/// symbols to table indices. Reusable across structures over that signature.
class CompiledFormula {
public:
    /// free_order fixes the slot of each free variable; it must contain every free variable.
    CompiledFormula(const Formula& f, const Signature& signature, std::vector<std::string> free_order);
    ~CompiledFormula();
    CompiledFormula(CompiledFormula&&) noexcept;
    CompiledFormula& operator=(CompiledFormula&&) noexcept;

    const std::vector<std::string>& free_order() const noexcept;

    /// values[i] is the element assigned to free_order()[i].
    double evaluate(const Structure& a, std::span<const std::size_t> values) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Value of f in structure a under assignment; throws EvaluationError for
/// unbound variables, unknown symbols, arity mismatches and out-of-range values.
double evaluate(const Structure& a, const Formula& f, const VarAssignment& assignment = {});

/// The tuples b over ybars (in order) with value 1 under assignment + b.
std::vector<Tuple> defined_set(const Structure& a, const Formula& f, const VarAssignment& assignment,
                               std::span<const std::string> ybars);

bool satisfies(const Structure& a, const Formula& f, const VarAssignment& assignment = {});

}  // namespace pla
