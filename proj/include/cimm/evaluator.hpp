#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cimm/formula.hpp"
#include "cimm/structure.hpp"

namespace cimm {

// Free variable -> point index.
using Assignment = std::map<std::string, std::size_t>;

// A formula compiled against one structure: variables are resolved to slots
// and symbols to table lookups. sup is an exhaustive max over the points and
// int x . phi is sum_a w(a) * phi[x := a]. Calls are const and may run
// concurrently; the structure must outlive the evaluator.
class Evaluator {
 public:
  Evaluator(const Formula& f, const FiniteStructure& s);

  // Free variables in Formula::free_vars() order.
  const std::vector<std::string>& variables() const { return variables_; }

  // `values[k]` is the point assigned to variables()[k].
  double operator()(std::span<const std::size_t> values) const;
  double operator()(const Assignment& a) const;

 private:
  struct TermOp {
    enum Kind { Slot, Constant, Apply } kind;
    std::size_t index;  // slot, constant or function
    std::vector<std::size_t> args;
  };
  struct FormulaOp {
    Formula::Kind kind;
    double scalar = 0.0;
    std::size_t relation = 0;
    std::vector<std::size_t> args;      // TermOp indices
    std::vector<std::size_t> children;  // FormulaOp indices
    std::size_t slot = 0;               // bound variable (quantifiers)
  };

  std::size_t compile(const Formula& f, std::vector<std::string>& scope);
  std::size_t compile(const Term& t, const std::vector<std::string>& scope);
  std::size_t term_value(std::size_t op, std::vector<std::size_t>& env) const;
  double eval(std::size_t op, std::vector<std::size_t>& env) const;

  const FiniteStructure& structure_;
  std::vector<std::string> variables_;
  std::vector<TermOp> terms_;
  std::vector<FormulaOp> ops_;
  std::size_t root_ = 0;
  std::size_t slots_ = 0;
};

// Throws PreconditionError when `a` misses a free variable or names a point
// outside the structure.
double evaluate(const Formula& f, const FiniteStructure& s, const Assignment& a);

// Values at every assignment of the free variables, row-major in
// free_vars() order (a closed formula yields one value). Parallel over the
// grid; evaluate_all_serial is the reference. Throws PreconditionError when
// the grid exceeds `cap`.
std::vector<double> evaluate_all(const Formula& f, const FiniteStructure& s,
                                 std::size_t cap = kDefaultPowerCap);
std::vector<double> evaluate_all_serial(const Formula& f, const FiniteStructure& s,
                                        std::size_t cap = kDefaultPowerCap);

}  // namespace cimm
