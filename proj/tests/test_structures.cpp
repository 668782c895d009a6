#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include <gtest/gtest.h>

#include "cimm/fuzz.hpp"
#include "cimm/structure.hpp"
#include "oracles.hpp"

using namespace cimm;

namespace {

FiniteStructure two_point(double d) {
  FiniteStructure s = make_structure(std::make_shared<Signature>(), 2);
  s.dist = {0.0, d, d, 0.0};
  s.weights = {0.5, 0.5};
  return s;
}

std::set<Axiom> axioms_of(const ValidationReport& r) {
  std::set<Axiom> out;
  for (const auto& v : r.violations) out.insert(v.axiom);
  return out;
}

// Copy of `sig` with every relation and function passed through the editors.
std::shared_ptr<Signature> rebuild(const Signature& sig, const std::function<void(RelationSymbol&)>& rel,
                                   const std::function<void(FunctionSymbol&)>& fun = [](FunctionSymbol&) {}) {
  auto out = std::make_shared<Signature>();
  for (const auto& c : sig.constants()) out->add_constant(c);
  for (FunctionSymbol f : sig.functions()) {
    fun(f);
    out->add_function(f.name, f.arity, f.modulus);
  }
  for (std::size_t r = 1; r < sig.relations().size(); ++r) {
    RelationSymbol copy = sig.relations()[r];
    rel(copy);
    out->add_relation(copy.name, copy.arity, copy.bound, copy.modulus);
  }
  return out;
}

double diameter(const FiniteStructure& s) { return *std::max_element(s.dist.begin(), s.dist.end()); }

}  // namespace

TEST(Validate, TwoPointStructureIsValid) { EXPECT_TRUE(validate(two_point(1.0)).ok()); }

TEST(Validate, DiameterViolation) {
  const auto r = validate(two_point(1.2));
  EXPECT_EQ(axioms_of(r), std::set<Axiom>{Axiom::Diameter});
  EXPECT_NEAR(r.violations[0].quantity, 0.2, 1e-12);
}

TEST(Validate, ModulusViolation) {
  auto sig = std::make_shared<Signature>();
  sig->add_relation("R", 1, 1.0, Modulus::linear(1.0));
  FiniteStructure s = make_structure(sig, 2);
  s.dist = {0.0, 0.5, 0.5, 0.0};
  s.weights = {0.5, 0.5};
  s.relations[1] = {0.0, 0.9};
  const auto r = validate(s);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].axiom, Axiom::Modulus);
  EXPECT_EQ(r.violations[0].symbol, "R");
  EXPECT_NEAR(r.violations[0].quantity, 0.4, 1e-12);
  EXPECT_EQ(r.violations[0].witness, (std::vector<std::vector<std::size_t>>{{0}, {1}}));
}

TEST(Validate, GeneralTreeUsesTheImplication) {
  auto sig = std::make_shared<Signature>();
  // No slope for this tree, so the implication is checked directly.
  sig->add_relation("R", 1, 1.0, Modulus::compose(Modulus::vacuous(), Modulus::linear(1.0)));
  FiniteStructure s = make_structure(sig, 2);
  s.dist = {0.0, 0.5, 0.5, 0.0};
  s.weights = {0.5, 0.5};
  s.relations[1] = {0.3, 0.3};
  EXPECT_TRUE(validate(s).ok());
  s.relations[1] = {0.3, 0.4};
  EXPECT_EQ(axioms_of(validate(s)), std::set<Axiom>{Axiom::Modulus});
}

TEST(Validate, PseudometricNeedsTheFlag) {
  const auto s = two_point(0.0);
  EXPECT_EQ(axioms_of(validate(s)), std::set<Axiom>{Axiom::Metric});
  EXPECT_TRUE(validate(s, MetricKind::Pseudo).ok());
}

TEST(Validate, ShapeErrorsAreReportedNotThrown) {
  auto sig = std::make_shared<Signature>();
  sig->add_relation("R", 2, 1.0, Modulus::linear(1.0));
  FiniteStructure s = make_structure(sig, 3);
  s.relations[1].resize(4);
  ValidationReport r;
  EXPECT_NO_THROW(r = validate(s));
  EXPECT_EQ(axioms_of(r), std::set<Axiom>{Axiom::WellFormedness});
  EXPECT_EQ(r.violations[0].symbol, "R");
}

TEST(Validate, TriangleAndMassWithinTolerance) {
  FiniteStructure s = make_structure(std::make_shared<Signature>(), 3);
  s.dist = {0, 0.5, 1.0 + 5e-10, 0.5, 0, 0.5, 1.0 + 5e-10, 0.5, 0};
  s.weights = {0.5, 0.5, 5e-10};
  EXPECT_TRUE(validate(s).ok());
  s.weights[2] = 1e-6;
  EXPECT_EQ(axioms_of(validate(s)), std::set<Axiom>{Axiom::Mass});
}

TEST(Validate, MutationNamesExactlyOneAxiom) {
  std::size_t applied[5] = {};
  for (std::size_t k = 0; k < 400; ++k) {
    fuzz::Rng rng(41, k);
    FiniteStructure s = fuzz::random_structure(rng, {2, 7, false});
    ASSERT_TRUE(validate(s).ok());
    const auto& sig = *s.signature;
    const std::size_t P = *sig.find_relation("P");
    const std::size_t kind = k % 5;
    Axiom expected{};
    switch (kind) {
      case 0: {  // diameter: stretch every distance
        const double c = 1.5 / diameter(s);
        for (double& d : s.dist) d *= c;
        expected = Axiom::Diameter;
        break;
      }
      case 1: {  // metric: raise one entry above its mirror
        const std::size_t n = s.size();
        const std::size_t i = rng.below(n), j = (i + 1 + rng.below(n - 1)) % n;
        double& d = s.dist[i * n + j];
        d = std::min(1.0, d + 0.05 + 0.1 * rng.uniform());
        if (d == s.dist[j * n + i]) d -= 0.05;
        std::span<FiniteStructure> one(&s, 1);
        fuzz::fit_signature(one);
        expected = Axiom::Metric;
        break;
      }
      case 2: {  // mass
        const double total = s.total_mass();
        for (double& w : s.weights) w *= 1.3 / total;
        expected = Axiom::Mass;
        break;
      }
      case 3: {  // bound: shrink the declared bound of P below its largest value
        double top = 0.0;
        for (double v : s.relations[P]) top = std::max(top, std::fabs(v));
        if (top < 1e-6) continue;
        s.signature = rebuild(sig, [&](RelationSymbol& r) {
          if (r.name == "P") r.bound = top / 2;
        });
        expected = Axiom::Bound;
        break;
      }
      default: {  // modulus: declare P ten times steeper than allowed
        const auto slope = sig.relations()[P].modulus.slope();
        double largest = 0.0;
        for (double v : s.relations[P]) largest = std::max(largest, v);
        double smallest = largest;
        for (double v : s.relations[P]) smallest = std::min(smallest, v);
        if (largest - smallest < 1e-3) continue;
        s.signature = rebuild(sig, [&](RelationSymbol& r) {
          if (r.name == "P") r.modulus = Modulus::linear(*slope / 10);
        });
        expected = Axiom::Modulus;
        break;
      }
    }
    const auto report = validate(s);
    EXPECT_EQ(axioms_of(report), std::set<Axiom>{expected}) << "case " << k;
    EXPECT_EQ(report.violations, validate_serial(s).violations);
    ++applied[kind];
  }
  for (std::size_t c : applied) EXPECT_GE(c, 40u);
}

TEST(Validate, SerialAndParallelAgree) {
  for (std::size_t k = 0; k < 100; ++k) {
    fuzz::Rng rng(43, k);
    FiniteStructure s = fuzz::random_structure(rng, {1, 8, false});
    // Damage a few random entries so that reports are non-trivial.
    for (int m = 0; m < 3; ++m) {
      s.dist[rng.below(s.dist.size())] = rng.uniform(-0.2, 1.4);
      auto& table = s.relations[rng.between(1, 2)];
      table[rng.below(table.size())] = rng.uniform(-2.0, 2.0);
    }
    const auto a = validate(s), b = validate_serial(s);
    EXPECT_EQ(a.violations, b.violations);
    EXPECT_TRUE(std::is_sorted(a.violations.begin(), a.violations.end()));
  }
}

TEST(Structure, TupleEncodingIsRowMajor) {
  const FiniteStructure s = make_structure(std::make_shared<Signature>(), 3);
  const std::vector<std::size_t> t{2, 0, 1};
  EXPECT_EQ(s.encode(t), 2u * 9 + 0 * 3 + 1);
  std::vector<std::size_t> back(3);
  s.decode(19, back);
  EXPECT_EQ(back, t);
  EXPECT_EQ(s.tuple_count(3), 27u);
}

TEST(ProductPower, SquareOfTwoPoints) {
  const auto s = two_point(1.0);
  const auto p = product_power(s, 2);
  ASSERT_EQ(p.size(), 4u);
  for (double w : p.weights) EXPECT_DOUBLE_EQ(w, 0.25);
  // (a,a) = 0, (a,b) = 1
  EXPECT_EQ(p.distance(0, 1), s.distance(0, 1));
  EXPECT_EQ(p.distance(0, 3), 1.0);
  EXPECT_TRUE(validate(p).ok());
}

TEST(ProductPower, TotalMassIsPowerOfMass) {
  for (std::size_t k = 0; k < 50; ++k) {
    fuzz::Rng rng(47, k);
    const auto s = fuzz::random_structure(rng, {1, 5, false});
    const double w = s.total_mass();
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto p = product_power(s, n);
      EXPECT_NEAR(p.total_mass(), std::pow(w, static_cast<double>(n)), 1e-12);
    }
  }
}

TEST(ProductPower, WeightsSplitAndPermutationInvariance) {
  fuzz::Rng rng(53, 0);
  const auto s = fuzz::random_structure(rng, {4, 4, false});
  const auto p2 = product_power(s, 2), p1 = product_power(s, 1), p3 = product_power(s, 3);
  const std::size_t n = s.size();
  oracle::for_each_assignment(3, n, [&](const std::vector<std::size_t>& t) {
    const double w3 = p3.weights[s.encode(t)];
    const std::vector<std::size_t> head{t[0], t[1]}, tail{t[2]};
    EXPECT_NEAR(w3, p2.weights[s.encode(head)] * p1.weights[t[2]], 1e-15);
    std::vector<std::size_t> perm{t[2], t[0], t[1]};
    EXPECT_NEAR(w3, p3.weights[s.encode(perm)], 1e-15);
    oracle::for_each_assignment(3, n, [&](const std::vector<std::size_t>& u) {
      std::vector<std::size_t> uperm{u[2], u[0], u[1]};
      EXPECT_EQ(p3.distance(s.encode(t), s.encode(u)), p3.distance(s.encode(perm), s.encode(uperm)));
    });
  });
  EXPECT_EQ(power_weights(s, 3), p3.weights);
}

TEST(ProductPower, CapIsEnforced) {
  const auto s = two_point(1.0);
  EXPECT_THROW(product_power(s, 5, 16), PreconditionError);
  EXPECT_NO_THROW(product_power(s, 4, 16));
  EXPECT_THROW(product_power(s, 0), PreconditionError);
}

TEST(Subspace, WholeSpace) {
  fuzz::Rng rng(59, 0);
  const auto s = fuzz::random_structure(rng, {3, 6, false});
  std::vector<std::size_t> all(s.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  // A fuzz structure may not be closed under f, so use one without functions.
  FiniteStructure plain = make_structure(std::make_shared<Signature>(), s.size());
  plain.dist = s.dist;
  plain.weights = s.weights;
  const auto r = subspace(plain, all);
  EXPECT_TRUE(r.full_outer_measure);
  EXPECT_EQ(r.structure.dist, plain.dist);
  EXPECT_EQ(r.structure.weights, plain.weights);
  EXPECT_DOUBLE_EQ(r.mass, plain.total_mass());
}

TEST(Subspace, OuterMeasure) {
  FiniteStructure s = make_structure(std::make_shared<Signature>(), 3);
  s.dist = {0, 0.5, 0.5, 0.5, 0, 0.5, 0.5, 0.5, 0};
  s.weights = {0.5, 0.5, 0.0};
  const std::vector<std::size_t> sub{0, 1};
  EXPECT_TRUE(subspace(s, sub).full_outer_measure);
  s.weights = {0.4, 0.4, 0.2};
  const auto r = subspace(s, sub);
  EXPECT_FALSE(r.full_outer_measure);
  EXPECT_DOUBLE_EQ(r.mass, 0.8);
  EXPECT_EQ(r.structure.weights, (std::vector<double>{0.4, 0.4}));
  EXPECT_EQ(r.points, sub);
}

TEST(Subspace, ClosureError) {
  auto sig = std::make_shared<Signature>();
  sig->add_constant("c");
  FiniteStructure s = make_structure(sig, 3);
  s.dist = {0, 0.5, 0.5, 0.5, 0, 0.5, 0.5, 0.5, 0};
  s.weights = {0.3, 0.3, 0.3};
  s.constants = {2};
  const std::vector<std::size_t> sub{0, 1};
  try {
    subspace(s, sub);
    FAIL();
  } catch (const ClosureError& e) {
    EXPECT_EQ(e.symbol(), "c");
  }
  const std::vector<std::size_t> empty;
  EXPECT_THROW(subspace(s, empty), PreconditionError);
}
