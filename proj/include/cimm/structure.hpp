#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cimm/error.hpp"
#include "cimm/signature.hpp"

namespace cimm {

inline constexpr std::size_t kDefaultPowerCap = 1'000'000;

// A finite metric-measure structure. Tuples of points are addressed in
// row-major order: (a_1, ..., a_n) -> sum_k a_k * N^(n-k).
//
// The fields are plain data so that ill-formed inputs can be loaded and then
// diagnosed by validate(); every other operation expects a structure that
// passed validation.
struct FiniteStructure {
  std::shared_ptr<const Signature> signature = std::make_shared<const Signature>();
  std::vector<std::string> labels;
  std::vector<double> dist;     // N*N, row-major
  std::vector<double> weights;  // N
  std::vector<std::size_t> constants;               // per constant symbol
  std::vector<std::vector<std::size_t>> functions;  // per function symbol, N^arity entries
  std::vector<std::vector<double>> relations;       // per relation symbol; [kMetric] unused

  std::size_t size() const { return labels.size(); }
  double distance(std::size_t a, std::size_t b) const { return dist[a * size() + b]; }
  double total_mass() const;

  std::size_t tuple_count(std::size_t arity) const;
  std::size_t encode(std::span<const std::size_t> tuple) const;
  void decode(std::size_t index, std::span<std::size_t> tuple) const;
  // Max metric on tuples of equal length.
  double tuple_distance(std::span<const std::size_t> a, std::span<const std::size_t> b) const;

  double relation_value(std::size_t relation, std::span<const std::size_t> tuple) const;
  std::size_t function_value(std::size_t function, std::span<const std::size_t> tuple) const;
};

// Empty structure over `sig` with N points labelled p0..p(N-1), zero
// distances and weights, and all tables sized and zero-filled.
FiniteStructure make_structure(std::shared_ptr<const Signature> sig, std::size_t points);

enum class MetricKind { Metric, Pseudo };

enum class Axiom { WellFormedness, Metric, Diameter, Mass, Bound, Modulus };
const char* axiom_name(Axiom a);

struct Violation {
  Axiom axiom;
  std::string symbol;                            // symbol involved, if any
  std::vector<std::vector<std::size_t>> witness;  // witnessing tuples
  double quantity = 0.0;                         // amount by which the axiom fails
  std::string detail;

  friend bool operator<(const Violation& a, const Violation& b);
  friend bool operator==(const Violation& a, const Violation& b);
};

struct ValidationReport {
  std::vector<Violation> violations;  // sorted canonically
  bool ok() const { return violations.empty(); }
  bool mentions(Axiom a) const;
};

inline constexpr double kValidationTolerance = 1e-9;

// Checks well-formedness, (pseudo)metric axioms, diameter <= 1, total mass
// <= 1, relation bounds and declared moduli over all tuple pairs. The
// modulus and triangle scans run in parallel; the result is identical to
// validate_serial.
ValidationReport validate(const FiniteStructure& s, MetricKind kind = MetricKind::Metric);
ValidationReport validate_serial(const FiniteStructure& s, MetricKind kind = MetricKind::Metric);

// M^n with the max metric and the product measure. Carries no symbol
// interpretations. Throws PreconditionError if N^n exceeds `cap` or the
// distance matrix would not fit in memory.
FiniteStructure product_power(const FiniteStructure& s, std::size_t n,
                              std::size_t cap = kDefaultPowerCap);
// Product weights of M^n without the distance matrix.
std::vector<double> power_weights(const FiniteStructure& s, std::size_t n,
                                  std::size_t cap = kDefaultPowerCap);

class ClosureError : public Error {
 public:
  ClosureError(const std::string& symbol, const std::string& what)
      : Error(what), symbol_(symbol) {}
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

struct SubspaceResult {
  FiniteStructure structure;
  std::vector<std::size_t> points;  // original index of each subspace point
  double mass = 0.0;
  bool full_outer_measure = false;  // complement carries no weight
};

// Restriction to `subset` with the subspace measure. Throws ClosureError when
// a constant or function value leaves the subset.
SubspaceResult subspace(const FiniteStructure& s, std::span<const std::size_t> subset);

}  // namespace cimm
