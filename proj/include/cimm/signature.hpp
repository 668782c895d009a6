#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cimm/modulus.hpp"

namespace cimm {

struct FunctionSymbol {
  std::string name;
  std::size_t arity = 1;
  Modulus modulus;
};

struct RelationSymbol {
  std::string name;
  std::size_t arity = 1;
  double bound = 0.0;
  Modulus modulus;
};

// A metric-measure language: constants, functions and relations. The metric
// symbol `rho` (binary, bound 1, modulus Linear(1)) is always relation 0 and
// cannot be redeclared.
class Signature {
 public:
  static constexpr std::string_view kMetricName = "rho";
  static constexpr std::size_t kMetric = 0;

  Signature();

  std::size_t add_constant(std::string name);
  std::size_t add_function(std::string name, std::size_t arity, Modulus modulus);
  std::size_t add_relation(std::string name, std::size_t arity, double bound, Modulus modulus);

  const std::vector<std::string>& constants() const { return constants_; }
  const std::vector<FunctionSymbol>& functions() const { return functions_; }
  // Includes `rho` at index kMetric.
  const std::vector<RelationSymbol>& relations() const { return relations_; }

  std::optional<std::size_t> find_constant(std::string_view name) const;
  std::optional<std::size_t> find_function(std::string_view name) const;
  std::optional<std::size_t> find_relation(std::string_view name) const;
  bool declares(std::string_view name) const;

  friend bool operator==(const Signature& a, const Signature& b);

 private:
  void check_new_name(const std::string& name) const;

  std::vector<std::string> constants_;
  std::vector<FunctionSymbol> functions_;
  std::vector<RelationSymbol> relations_;
};

bool operator==(const FunctionSymbol& a, const FunctionSymbol& b);
bool operator==(const RelationSymbol& a, const RelationSymbol& b);

// Identifier syntax shared by symbols and variables: [A-Za-z_][A-Za-z0-9_]*,
// excluding the keywords sup, inf and int.
bool is_identifier(std::string_view s);

}  // namespace cimm
