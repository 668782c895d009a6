#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cimm {

// A modulus of uniform continuity, kept as an expression tree so that the
// inductive formula rules can be recorded without loss. Evaluation at eps > 0
// yields a value in [0, +inf]; +inf means the requirement is vacuous.
class Modulus {
 public:
  enum class Kind { Vacuous, Linear, ScaleInput, Min, Compose };

  // Default-constructed modulus is Vacuous.
  Modulus();

  static Modulus vacuous();
  // eps -> eps / slope. Requires a finite slope > 0.
  static Modulus linear(double slope);
  // eps -> inner(factor * eps). Requires a finite factor > 0.
  static Modulus scale_input(double factor, Modulus inner);
  static Modulus min(std::vector<Modulus> parts);
  // eps -> outer(inner(eps)).
  static Modulus compose(Modulus outer, Modulus inner);

  Kind kind() const;
  // Slope for Linear, factor for ScaleInput, 0 otherwise.
  double parameter() const;
  const std::vector<Modulus>& children() const;

  double operator()(double eps) const;

  // Lipschitz slope s* such that the tree evaluates identically to eps / s*
  // (s* = 0 meaning Vacuous). Empty when some leaf is not Linear or Vacuous.
  std::optional<double> slope() const;
  // Vacuous or Linear(s*) with identical evaluation; empty as for slope().
  std::optional<Modulus> normalized() const;

  std::string to_string() const;

  friend bool operator==(const Modulus& a, const Modulus& b);

 private:
  struct Node;
  explicit Modulus(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

// True when the continuity requirement "dist < modulus(eps) implies diff <= eps"
// fails for the pair, tested at eps = diff - 1e-12.
bool violates_modulus(const Modulus& modulus, double dist, double diff);

}  // namespace cimm
