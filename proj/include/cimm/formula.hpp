#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "cimm/modulus.hpp"
#include "cimm/signature.hpp"

namespace cimm {

// Variable | constant | function application. Immutable; copies share nodes.
class Term {
 public:
  enum class Kind { Variable, Constant, Apply };

  static Term variable(std::string name);
  static Term constant(const Signature& sig, const std::string& name);
  static Term apply(const Signature& sig, const std::string& function, std::vector<Term> args);

  Kind kind() const;
  // Variable name, or the constant / function symbol name.
  const std::string& name() const;
  // Index into the signature's constants or functions; 0 for variables.
  std::size_t symbol() const;
  const std::vector<Term>& args() const;

  // Variables get Linear(1), constants Vacuous, F(t..) min_k compose(mod t_k, mod F).
  const Modulus& modulus() const;
  const std::vector<std::string>& free_vars() const;

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

// Attributed formula AST over the primitive connectives. Attributes (bound,
// modulus, free variables) are computed once at construction.
class Formula {
 public:
  enum class Kind { One, Atomic, Scale, Sum, Meet, Sup, Integral };

  static Formula one();
  static Formula atomic(const Signature& sig, const std::string& relation, std::vector<Term> args);
  static Formula scale(double r, Formula f);
  static Formula sum(Formula a, Formula b);
  static Formula meet(Formula a, Formula b);
  static Formula sup(std::string var, Formula body);
  static Formula integral(std::string var, Formula body);

  Kind kind() const;
  // Scale factor; 0 for other kinds.
  double scalar() const;
  // Relation index into the signature (Atomic only).
  std::size_t relation() const;
  const std::string& relation_name() const;
  const std::vector<Term>& args() const;
  // Bound variable (Sup / Integral only).
  const std::string& variable() const;
  // Operand list: 1 for Scale/Sup/Integral, 2 for Sum/Meet, 0 otherwise.
  const std::vector<Formula>& children() const;

  double bound() const;
  const Modulus& modulus() const;
  const std::vector<std::string>& free_vars() const;
  bool closed() const { return free_vars().empty(); }
  // Number of nodes along the longest root-to-leaf path.
  std::size_t depth() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

double bound_of(const Formula& f);
Modulus modulus_of(const Formula& f);
std::vector<std::string> free_vars(const Formula& f);

// Extended connectives, expressed through the primitive ones.
Formula negate(Formula f);                   // (-1) f
Formula difference(Formula a, Formula b);    // a + (-1) b
Formula join(Formula a, Formula b);          // -((-a) /\ (-b))
Formula absolute(Formula f);                 // f \/ (-f)
Formula infimum(std::string var, Formula f); // -(sup var . -f)

}  // namespace cimm
