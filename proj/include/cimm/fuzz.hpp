#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cimm/approx.hpp"
#include "cimm/formula.hpp"
#include "cimm/structure.hpp"

namespace cimm::fuzz {

// Deterministic generator. Draws are derived from raw 64-bit output only, so
// streams are identical across standard library implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  double uniform();                          // [0, 1)
  double uniform(double lo, double hi);      // [lo, hi)
  std::size_t below(std::size_t n);          // [0, n)
  std::size_t between(std::size_t lo, std::size_t hi);  // [lo, hi]
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// The fixed fuzzing vocabulary: constant a, unary function f, relations P/1
// and R/2 with bounds 1. Moduli are Linear with slopes fitted to the tables.
struct SymbolSlopes {
  double f = 1.0;
  double P = 1.0;
  double R = 1.0;
};
std::shared_ptr<const Signature> fuzz_signature(const SymbolSlopes& slopes);

struct StructureOptions {
  std::size_t min_points = 1;
  std::size_t max_points = 8;
  // Number of distinct classes is drawn below the point count so that at
  // least one pair is at distance 0.
  bool pseudo = false;
};

// A random structure over fuzz_signature that satisfies every axiom (the
// pseudometric ones when `pseudo`).
FiniteStructure random_structure(Rng& rng, const StructureOptions& opts = {});

// Structures over one common signature, for ultraproduct families.
std::vector<FiniteStructure> random_family(Rng& rng, std::size_t count,
                                           const StructureOptions& opts = {});

// Refits the declared slopes of `family` to their tables and installs one
// common signature.
void fit_signature(std::span<FiniteStructure> family);

struct FormulaOptions {
  std::size_t max_depth = 6;
  std::size_t max_quantifier_depth = 3;
  std::vector<std::string> variables = {"x", "y", "z", "w"};
};

Formula random_formula(Rng& rng, const Signature& sig, const FormulaOptions& opts = {});

// A random formula with at least `min_free` free variables.
Formula random_open_formula(Rng& rng, const Signature& sig, std::size_t min_free,
                            const FormulaOptions& opts = {});

struct RieszCase {
  FiniteStructure structure;
  Functional functional;
  std::vector<std::vector<double>> functions;
  double eps = 0.1;
};
RieszCase random_riesz_case(Rng& rng);

// ---------------------------------------------------------------------------
// Property suites

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;         // largest observed violation quantity
  std::string first_failure;  // description of the lowest failing case
};

// Every suite runs `count` cases; case k draws from Rng(seed, k) salted by
// the suite, so results do not depend on thread count or schedule.
SuiteResult soundness_suite(std::uint64_t seed, std::size_t count);
SuiteResult fubini_suite(std::uint64_t seed, std::size_t count);
SuiteResult quotient_suite(std::uint64_t seed, std::size_t count);
SuiteResult los_suite(std::uint64_t seed, std::size_t count);
SuiteResult riesz_suite(std::uint64_t seed, std::size_t count);
SuiteResult roundtrip_suite(std::uint64_t seed, std::size_t count);

std::vector<SuiteResult> run_all(std::uint64_t seed, std::size_t count);

}  // namespace cimm::fuzz
