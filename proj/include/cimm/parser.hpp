#pragma once

#include <string>
#include <string_view>

#include "cimm/formula.hpp"
#include "cimm/signature.hpp"

namespace cimm {

// Concrete syntax, loosest binding first:
//
//   formula  := lattice (("+" | "-") lattice)*
//   lattice  := unary (("/\" | "\/") unary)*
//   unary    := ("sup" | "int" | "inf") var "." formula
//             | ["-"] number ["*" unary] | "-" unary | primary
//   primary  := rel "(" term {"," term} ")" | "(" formula ")" | "|" formula "|"
//   term     := fun "(" term {"," term} ")" | const | var
//
// Quantifier bodies extend as far right as possible. A bare number other than
// 1 stands for number*1. The extended connectives -, \/, |.| and inf are
// rewritten into +, /\, scalar multiples and sup while parsing.
//
// Throws ParseError on malformed text and SignatureError on undeclared
// symbols or arity mismatches.
Formula parse_formula(std::string_view text, const Signature& sig);

// Same as parse_formula; named for call sites that rely on the rewrite of
// extended connectives.
Formula desugar(std::string_view text, const Signature& sig);

// Prints using primitive connectives only, with the minimum parentheses needed
// for parse_formula to rebuild a structurally equal formula.
std::string print_formula(const Formula& f);
std::string print_term(const Term& t);

// Shortest decimal form that reads back to the same double.
std::string format_real(double v);

}  // namespace cimm
