#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cimm/error.hpp"
#include "cimm/evaluator.hpp"
#include "cimm/statement.hpp"
#include "cimm/structure.hpp"

namespace cimm {

// ---------------------------------------------------------------------------
// Statements and theories

struct Verdict {
  bool holds = false;
  double left = 0.0;
  double right = 0.0;
  // |left - right| for equalities, left - right for inequalities.
  double gap = 0.0;
};

// Throws PreconditionError for an open statement or eps < 0.
Verdict check_statement(const Statement& st, const FiniteStructure& s, double eps);

struct StatementResult {
  std::string statement;  // printed form
  double eps = 0.0;
  Verdict verdict;
};

struct TheoryReport {
  std::vector<StatementResult> results;
  double worst_gap = 0.0;  // largest gap over all statements (0 when empty)
  bool holds = true;
};

TheoryReport check_theory(const Theory& t, const FiniteStructure& s);

// ---------------------------------------------------------------------------
// Fubini

struct FubiniResult {
  std::string x, y;  // integration variables
  // max over the remaining free variables of |int int phi dx dy - int int phi dy dx|
  double discrepancy = 0.0;
  // same, comparing each iterated order with the sum against the product measure on M^2
  double product_discrepancy = 0.0;
  double bound = 0.0;
};

// Integrates over the first two free variables unless `x`/`y` are given.
// Throws PreconditionError when phi has fewer than two free variables or a
// grid exceeds `cap`.
FubiniResult fubini_check(const Formula& phi, const FiniteStructure& s,
                          std::size_t cap = kDefaultPowerCap,
                          std::optional<std::string> x = std::nullopt,
                          std::optional<std::string> y = std::nullopt);

// ---------------------------------------------------------------------------
// Pseudometric quotient

struct QuotientResult {
  FiniteStructure structure;
  std::vector<std::size_t> projection;  // point -> class
  std::vector<double> class_weights;    // push-forward of the weights
};

class QuotientError : public Error {
 public:
  QuotientError(std::string symbol, std::vector<std::size_t> a, std::vector<std::size_t> b,
                const std::string& what)
      : Error(what), symbol_(std::move(symbol)), a_(std::move(a)), b_(std::move(b)) {}
  const std::string& symbol() const noexcept { return symbol_; }
  // The offending tuple and its class representative.
  const std::vector<std::size_t>& first() const noexcept { return a_; }
  const std::vector<std::size_t>& second() const noexcept { return b_; }

 private:
  std::string symbol_;
  std::vector<std::size_t> a_, b_;
};

// Identifies points at distance 0. Classes are numbered by their smallest
// member, which also serves as representative. Throws QuotientError when an
// interpretation separates two equivalent tuples.
QuotientResult quotient(const FiniteStructure& pseudo);

// ---------------------------------------------------------------------------
// Ultraproducts along a principal ultrafilter

// The ultrafilter on {0..size-1} of all sets containing `index`.
struct PrincipalUltrafilter {
  std::size_t size;
  std::size_t index;

  bool contains(std::span<const std::size_t> members) const;
  // D-limit of a family of reals indexed by {0..size-1}.
  double limit(std::span<const double> values) const { return values[index]; }
};

struct UltraproductResult {
  FiniteStructure structure;
  // isomorphism[p] is the ultraproduct element whose coordinate at the
  // principal index is point p of family[index].
  std::vector<std::size_t> isomorphism;
};

// Throws PreconditionError for an empty family, an index out of range or
// signatures that differ.
UltraproductResult principal_ultraproduct(std::span<const FiniteStructure> family,
                                          std::size_t index);

// Max over the formulas and all assignments of |phi^U(iso a) - phi^{M_j}(a)|.
double los_discrepancy(std::span<const FiniteStructure> family, std::size_t index,
                       const UltraproductResult& u, std::span<const Formula> formulas,
                       std::size_t cap = kDefaultPowerCap);

// ---------------------------------------------------------------------------
// Tarski-Vaught test

struct TarskiVaughtEntry {
  std::string formula;
  double sup_sub = 0.0;       // sup over the image of M
  double sup_full = 0.0;      // sup over N
  double measure_sub = 0.0;   // subspace measure of {phi > 0} on M
  double measure_full = 0.0;  // measure of {phi > 0} in N
  bool sup_condition = false;
  bool measure_condition = false;
};

struct TarskiVaughtReport {
  std::vector<TarskiVaughtEntry> entries;
  bool passed = true;
  // The test certifies only the formulas that were supplied.
  std::string scope = "certified for the supplied formula list only";
};

// `embedding[p]` is the point of N that p in `sub` maps to. Each formula has
// at most one free variable; a closed formula is read as constant in x. Throws PreconditionError when the embedding
// does not make `sub` a substructure of `full`.
TarskiVaughtReport tarski_vaught_check(const FiniteStructure& sub, const FiniteStructure& full,
                                       std::span<const std::size_t> embedding,
                                       std::span<const Formula> formulas, double eps);

}  // namespace cimm
