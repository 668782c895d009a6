#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cimm/structure.hpp"

namespace cimm {

// A positive normalised functional I(f) = sum_a w(a) f(a) on the points of a
// finite structure.
struct Functional {
  std::vector<double> weights;

  double operator()(std::span<const double> f) const;
};

// Throws PreconditionError unless weights are >= 0, sized N and sum to 1
// within 1e-12.
void check_functional(const Functional& I, std::size_t points);

// A discrete measure on a designated support with a certified error bound.
struct ApproxMeasure {
  std::vector<std::size_t> support;  // atom indices or point indices
  std::vector<double> weights;
  double eps_cert = 0.0;
  bool normalized = false;
};

// Checks performed by the verifiers. A report passes iff every check passes.
struct Check {
  std::string name;
  bool passed = true;
  double value = 0.0;  // worst offending quantity
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  bool passed() const;
  const Check* find(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Riesz discretisation

// Partition of the points into atoms of the algebra generated by the interval
// preimages f_i^{-1}[u_j, u_{j+1}), with u_j = j * width - shift.
struct AtomAlgebra {
  std::vector<std::vector<double>> functions;
  double shift = 0.0;  // added to every f_i to make it nonnegative
  double width = 0.0;  // interval length
  // u_0 .. u_s; empty when the atoms are a supplied partition rather than
  // generated from intervals.
  std::vector<double> endpoints;
  std::vector<std::vector<std::size_t>> atoms;
  // signatures[k][i]: interval index of f_i on atom k (generated algebras only)
  std::vector<std::vector<std::size_t>> signatures;
  // coefficients[i][k]: value of the simple function xi_i on atom k
  std::vector<std::vector<double>> coefficients;
};

struct RieszResult {
  AtomAlgebra algebra;
  std::vector<double> targets;  // I(f_i)
  ApproxMeasure raw;            // lambda(P_k) = I(indicator of P_k)
  ApproxMeasure measure;        // raw, normalised to total mass 1
  std::vector<double> raw_errors;  // |I(f_i) - int xi_i d lambda|
  std::vector<double> errors;      // same against the normalised measure
  double mass_defect = 0.0;        // |1 - lambda(M)|
};

// Interval index of value v: the j with u_j <= v < u_{j+1} and v - u_j < width.
std::size_t interval_index(double v, double shift, double width);
double interval_start(std::size_t j, double shift, double width);

// Throws PreconditionError for eps <= 0, an empty function list, tables not
// sized N or an invalid functional.
RieszResult riesz_discretize(const FiniteStructure& s, const Functional& I,
                             std::span<const std::vector<double>> fs, double eps);

// Recomputes every error and structural invariant of `result` from scratch.
VerifyReport verify_riesz(const FiniteStructure& s, const Functional& I,
                          std::span<const std::vector<double>> fs, const RieszResult& result,
                          double eps);

// ---------------------------------------------------------------------------
// Covers

// Exact minimum set cover of {0..universe-1} by `sets` (branch and bound with a
// greedy incumbent). Returns the chosen set indices in increasing order.
// Throws PreconditionError if the sets do not cover the universe.
std::vector<std::size_t> minimum_set_cover(std::size_t universe,
                                           std::span<const std::vector<std::size_t>> sets);

struct CoverResult {
  double delta = 0.0;
  std::vector<std::size_t> first_stage;  // b_1..b_n, greedy closed delta-balls covering M
  std::vector<std::size_t> centers;      // c_1..c_m, fewest balls containing every b_j
  std::vector<std::size_t> nearest;      // per point, a center within 2 delta
  std::vector<double> nearest_distance;
  bool certified = false;                // every point within 2 delta of a center
};

// Balls are closed: B(c, delta) = {x : d(c, x) <= delta}. Ties in the greedy
// stage go to the lowest point index.
CoverResult two_stage_cover(const FiniteStructure& s, double delta);

// ---------------------------------------------------------------------------
// Matching

struct BipartiteMatching {
  static constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);
  std::vector<std::size_t> left_to_right;
  std::vector<std::size_t> right_to_left;
  std::size_t size = 0;
};

// Maximum cardinality matching (Hopcroft-Karp). adjacency[l] lists the right
// vertices adjacent to left vertex l.
BipartiteMatching maximum_matching(std::size_t right_count,
                                   std::span<const std::vector<std::size_t>> adjacency);

// Left vertices Z with |N(Z)| < |Z|, read off the alternating forest of an
// unmatched left vertex; empty when the matching is perfect on the left.
std::vector<std::size_t> hall_witness(std::span<const std::vector<std::size_t>> adjacency,
                                      const BipartiteMatching& m);

// A point permutation of a structure; checked to preserve distances to 1e-12.
using Isometry = std::vector<std::size_t>;

// Throws PreconditionError if alpha is not a distance-preserving bijection.
void check_isometry(const FiniteStructure& s, std::span<const std::size_t> alpha);

struct MatchingResult {
  // permutation[i] = i' with d(alpha(c_i'), c_i) < 2 delta; empty if infeasible
  std::vector<std::size_t> permutation;
  std::vector<double> distances;         // d(alpha(c_i'), c_i) per i
  bool feasible = false;
  std::vector<std::size_t> hall_witness;  // center indices, when infeasible
  std::vector<std::size_t> hall_neighbors;
};

// Edges (i, i') with d(alpha(c_i'), c_i) <= 2 delta - 1e-12.
MatchingResult isometry_matching(const FiniteStructure& s, const CoverResult& cover,
                                 std::span<const std::size_t> alpha, double delta);

// ---------------------------------------------------------------------------
// Invariant measures

struct InvariantResult {
  double delta = 0.0;
  CoverResult cover;
  ApproxMeasure nu;  // uniform on the centers; support = point indices
  std::vector<MatchingResult> matchings;  // one per isometry, in input order
  std::size_t retries = 0;
  bool exact_regime = false;  // delta below the minimum pairwise distance
};

// Picks 2 delta < eps / lipschitz (and below the minimum distance between
// `constants`), covers, puts the uniform measure on the centers and matches
// every isometry, halving delta until all matchings are perfect. Throws
// PreconditionError for eps <= 0, lipschitz <= 0, an empty group or a
// non-isometry.
InvariantResult invariant_measure_approx(const FiniteStructure& s, std::span<const Isometry> group,
                                         double eps, double lipschitz,
                                         std::span<const std::size_t> constants = {});

struct TestFunction {
  std::vector<double> values;
  double lipschitz = 0.0;
};

struct InvarianceGap {
  std::size_t isometry = 0;
  std::size_t function = 0;
  double gap = 0.0;  // |int f d nu - int f o alpha d nu|
};

struct InvarianceReport {
  VerifyReport report;
  std::vector<InvarianceGap> gaps;
  // Total variation distance to the uniform measure on all points, reported
  // when the support is the whole space.
  std::optional<double> tv_to_uniform;
  bool passed() const { return report.passed(); }
};

// Recomputes the invariance gaps, normalisation, matching validity and the
// certificate eps_cert from `result` alone.
InvarianceReport verify_invariance(const FiniteStructure& s, const InvariantResult& result,
                                   std::span<const Isometry> group,
                                   std::span<const TestFunction> tests, double eps,
                                   double lipschitz);

}  // namespace cimm
