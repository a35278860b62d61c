#pragma once

// Concrete syntax for formulas.
//
//   formula  := impl
//   impl     := disj ( "->" impl )?                 right associative
//   disj     := conj ( "or" conj )*                 left associative
//   conj     := unary ( "and" unary )*
//   unary    := "not" unary
//             | ("exists" | "forall") var+ "." unary
//             | ("exists" | "forall") var unary
//             | primary
//   primary  := number | "true" | "false"
//             | var "=" var
//             | NAME "(" formula ("," formula)* ")"   connective when NAME is one, else atom over vars
//             | NAME params? "{" formulas ":" vars ":" formulas "}"
//             | "(" formula ")"
//   params   := "[" key "=" number ("," key "=" number)* "]"
//
// Bound variables in an aggregation may be separated by spaces or commas.
// A single condition is shared by every aggregated formula. "exists" and
// "forall" expand to max and min with condition true.

#include <pla/catalog.hpp>
#include <pla/errors.hpp>
#include <pla/logic.hpp>

#include <string>
#include <string_view>

namespace pla {

/// Throws ParseError (with line and column) on syntax errors, unknown
/// aggregator names, arity mismatches and repeated bound variables.
Formula parse(std::string_view text, const Catalog& catalog = Catalog::builtin());

/// Canonical, fully parenthesized text; parse(pretty(f)) == f.
std::string pretty(const Formula& f);

}  // namespace pla
