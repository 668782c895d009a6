#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>
#include <omp.h>

#include "cimm/evaluator.hpp"
#include "cimm/fuzz.hpp"
#include "cimm/parser.hpp"
#include "oracles.hpp"

using namespace cimm;

namespace {

bool same(const fuzz::SuiteResult& a, const fuzz::SuiteResult& b) {
  return a.name == b.name && a.cases == b.cases && a.failures == b.failures && a.worst == b.worst &&
         a.first_failure == b.first_failure;
}

}  // namespace

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  fuzz::Rng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    EXPECT_NE(x, d.next());
  }
}

TEST(Rng, Ranges) {
  fuzz::Rng r(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double v = r.uniform(-2.0, 3.0);
    EXPECT_GE(v, -2.0);
    EXPECT_LT(v, 3.0);
    EXPECT_LT(r.below(7), 7u);
    const auto k = r.between(3, 5);
    EXPECT_GE(k, 3u);
    EXPECT_LE(k, 5u);
  }
}

TEST(Generators, StructuresAreValid) {
  for (std::size_t k = 0; k < 300; ++k) {
    fuzz::Rng rng(173, k);
    const auto s = fuzz::random_structure(rng);
    EXPECT_GE(s.size(), 1u);
    EXPECT_LE(s.size(), 8u);
    EXPECT_TRUE(validate(s).ok()) << "case " << k;
  }
}

TEST(Generators, PseudostructuresCollapseAPair) {
  for (std::size_t k = 0; k < 300; ++k) {
    fuzz::Rng rng(179, k);
    const auto p = fuzz::random_structure(rng, {2, 6, true});
    EXPECT_TRUE(validate(p, MetricKind::Pseudo).ok());
    bool collapsed = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i + 1; j < p.size(); ++j) collapsed = collapsed || p.distance(i, j) == 0.0;
    }
    EXPECT_TRUE(collapsed);
  }
}

TEST(Generators, FamiliesShareOneSignature) {
  fuzz::Rng rng(181, 0);
  const auto family = fuzz::random_family(rng, 5);
  for (const auto& s : family) {
    EXPECT_EQ(s.signature, family[0].signature);
    EXPECT_TRUE(validate(s).ok());
  }
}

TEST(Generators, FormulaShape) {
  const auto sig = fuzz::fuzz_signature({});
  for (std::size_t k = 0; k < 500; ++k) {
    fuzz::Rng rng(191, k);
    const Formula f = fuzz::random_formula(rng, *sig, {6, 3, {"x", "y"}});
    EXPECT_LE(f.depth(), 6u);
    for (const auto& v : f.free_vars()) EXPECT_TRUE(v == "x" || v == "y");
    const Formula g = fuzz::random_open_formula(rng, *sig, 2, {5, 2, {"x", "y", "z"}});
    EXPECT_GE(g.free_vars().size(), 2u);
  }
}

TEST(Soundness, ValuesStayWithinBounds) {
  for (std::size_t k = 0; k < 1000; ++k) {
    fuzz::Rng rng(193, k);
    const auto s = fuzz::random_structure(rng);
    const Formula f = fuzz::random_formula(rng, *s.signature);
    for (double v : evaluate_all(f, s)) EXPECT_LE(std::fabs(v), f.bound() + 1e-9) << print_formula(f);
  }
}

TEST(Soundness, MetricAtomIsTwoLipschitzUnderTheMaxMetric) {
  // Points 0, 0.5, 1 on a line; (x, y) = (0.5, 0.5) against (0, 1).
  FiniteStructure s = make_structure(std::make_shared<Signature>(), 3);
  s.dist = {0, 0.5, 1, 0.5, 0, 0.5, 1, 0.5, 0};
  s.weights = {0.5, 0.0, 0.5};
  const Formula rho = parse_formula("rho(x, y)", *s.signature);
  EXPECT_EQ(rho.modulus().slope(), 1.0);
  const std::vector<std::size_t> u{1, 1}, v{0, 2};
  const double diff = std::fabs(evaluate(rho, s, {{"x", 1}, {"y", 1}}) - evaluate(rho, s, {{"x", 0}, {"y", 2}}));
  EXPECT_EQ(diff / s.tuple_distance(u, v), 2.0);
}

TEST(Soundness, SlopesHoldWithTheMetricCountedTwice) {
  for (std::size_t k = 0; k < 1000; ++k) {
    fuzz::Rng rng(197, k);
    const auto s = fuzz::random_structure(rng);
    const Formula f = fuzz::random_formula(rng, *s.signature);
    const double slope = oracle::max_metric_slope(f, *s.signature);
    const auto& vars = f.free_vars();
    const auto values = evaluate_all(f, s);
    if (values.size() > 512) continue;
    for (std::size_t a = 0; a < values.size(); ++a) {
      for (std::size_t b = a + 1; b < values.size(); ++b) {
        std::vector<std::size_t> u(vars.size()), v(vars.size());
        s.decode(a, u);
        s.decode(b, v);
        EXPECT_LE(std::fabs(values[a] - values[b]), slope * s.tuple_distance(u, v) + 1e-9) << print_formula(f);
      }
    }
  }
}

TEST(Suites, PassAtModerateCounts) {
  for (const auto& r : {fuzz::fubini_suite(5, 200), fuzz::quotient_suite(5, 200), fuzz::los_suite(5, 100),
                        fuzz::riesz_suite(5, 200), fuzz::roundtrip_suite(5, 500)}) {
    EXPECT_EQ(r.failures, 0u) << r.name << ": " << r.first_failure;
    EXPECT_GT(r.cases, 0u);
  }
}

TEST(Suites, IndependentOfThreadCount) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = fuzz::run_all(9, 60);
  omp_set_num_threads(4);
  const auto four = fuzz::run_all(9, 60);
  omp_set_num_threads(saved);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_TRUE(same(one[i], four[i])) << one[i].name;
}
