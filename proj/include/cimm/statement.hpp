#pragma once

#include <optional>
#include <vector>

#include "cimm/formula.hpp"

namespace cimm {

// A condition phi = psi or phi <= psi between formulas.
struct Statement {
  enum class Kind { Equal, LessEq };

  Kind kind = Kind::Equal;
  Formula left = Formula::one();
  Formula right = Formula::one();
  // Per-statement tolerance; falls back to the theory tolerance when empty.
  std::optional<double> eps;

  bool closed() const { return left.closed() && right.closed(); }
};

struct Theory {
  std::vector<Statement> statements;
  double eps = 0.0;
};

// "phi(x..) = 0 for all x..", encoded as sup_x.. |phi| = 0.
Statement universally_zero(const Formula& phi);

}  // namespace cimm
