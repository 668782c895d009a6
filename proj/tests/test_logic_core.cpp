#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "cimm/formula.hpp"
#include "cimm/fuzz.hpp"
#include "cimm/parser.hpp"
#include "oracles.hpp"

using namespace cimm;

namespace {

Signature basic_signature() {
  Signature sig;
  sig.add_constant("a");
  sig.add_function("f", 1, Modulus::linear(2.0));
  sig.add_relation("R", 1, 3.0, Modulus::linear(1.0));
  sig.add_relation("S", 2, 1.0, Modulus::linear(0.5));
  return sig;
}

Formula rho(const Signature& sig, const std::string& x, const std::string& y) {
  return Formula::atomic(sig, "rho", {Term::variable(x), Term::variable(y)});
}

Formula R(const Signature& sig, const std::string& x) { return Formula::atomic(sig, "R", {Term::variable(x)}); }

}  // namespace

// ---------------------------------------------------------------------------
// Modulus

TEST(Modulus, VacuousIsInfinite) {
  EXPECT_TRUE(std::isinf(Modulus::vacuous()(0.3)));
  EXPECT_TRUE(std::isinf(Modulus()(1.0)));
}

TEST(Modulus, Constructors) {
  EXPECT_DOUBLE_EQ(Modulus::linear(4.0)(1.0), 0.25);
  EXPECT_DOUBLE_EQ(Modulus::scale_input(0.5, Modulus::linear(1.0))(0.4), 0.2);
  EXPECT_DOUBLE_EQ(Modulus::min({Modulus::linear(1.0), Modulus::linear(2.0)})(1.0), 0.5);
  EXPECT_DOUBLE_EQ(Modulus::compose(Modulus::linear(2.0), Modulus::linear(5.0))(1.0), 0.1);
  EXPECT_THROW(Modulus::linear(0.0), PreconditionError);
  EXPECT_THROW(Modulus::linear(-1.0), PreconditionError);
  EXPECT_THROW(Modulus::scale_input(0.0, Modulus::linear(1.0)), PreconditionError);
}

TEST(Modulus, NormalFormMatchesTreeOnLogGrid) {
  fuzz::Rng rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    // Random Linear-leaf tree.
    std::function<Modulus(int)> gen = [&](int depth) -> Modulus {
      const auto pick = depth == 0 ? rng.below(2) : rng.below(5);
      switch (pick) {
        case 0: return Modulus::vacuous();
        case 1: return Modulus::linear(rng.uniform(0.1, 5.0));
        case 2: return Modulus::scale_input(rng.uniform(0.1, 3.0), gen(depth - 1));
        case 3: return Modulus::min({gen(depth - 1), gen(depth - 1), gen(depth - 1)});
        default: return Modulus::compose(gen(depth - 1), gen(depth - 1));
      }
    };
    const Modulus m = gen(4);
    const auto n = m.normalized();
    ASSERT_TRUE(n.has_value());
    EXPECT_EQ(n->normalized(), n);
    for (int k = 0; k < 64; ++k) {
      const double eps = std::pow(10.0, -6.0 + 8.0 * k / 63.0);
      const double a = m(eps), b = (*n)(eps);
      if (std::isinf(a) || std::isinf(b)) {
        EXPECT_EQ(std::isinf(a), std::isinf(b));
      } else {
        EXPECT_NEAR(a, b, 1e-12 * std::fabs(a));
      }
    }
  }
}

TEST(Modulus, MonotoneInEps) {
  const Modulus m = Modulus::min({Modulus::linear(3.0), Modulus::compose(Modulus::linear(2.0), Modulus::linear(0.5))});
  double last = 0.0;
  for (double eps = 0.01; eps < 10.0; eps *= 1.3) {
    EXPECT_GE(m(eps), last);
    last = m(eps);
  }
}

TEST(Modulus, ViolationTest) {
  EXPECT_TRUE(violates_modulus(Modulus::linear(1.0), 0.5, 0.9));
  EXPECT_FALSE(violates_modulus(Modulus::linear(1.0), 0.5, 0.4));
  // Vacuous admits only constant maps.
  EXPECT_TRUE(violates_modulus(Modulus::vacuous(), 0.5, 0.9));
  EXPECT_FALSE(violates_modulus(Modulus::vacuous(), 0.5, 0.0));
}

// ---------------------------------------------------------------------------
// Signature

TEST(Signature, MetricSymbolIsBuiltIn) {
  Signature sig;
  ASSERT_EQ(sig.relations().size(), 1u);
  const auto& rho = sig.relations()[Signature::kMetric];
  EXPECT_EQ(rho.name, "rho");
  EXPECT_EQ(rho.arity, 2u);
  EXPECT_EQ(rho.bound, 1.0);
  EXPECT_EQ(rho.modulus, Modulus::linear(1.0));
  EXPECT_THROW(sig.add_relation("rho", 2, 1.0, Modulus::linear(1.0)), SignatureError);
}

TEST(Signature, RejectsBadDeclarations) {
  Signature sig = basic_signature();
  EXPECT_THROW(sig.add_constant("R"), SignatureError);
  EXPECT_THROW(sig.add_function("g", 0, Modulus::linear(1.0)), SignatureError);
  EXPECT_THROW(sig.add_relation("T", 1, -1.0, Modulus::linear(1.0)), SignatureError);
  EXPECT_THROW(sig.add_constant("sup"), SignatureError);
  EXPECT_THROW(sig.add_constant("9x"), SignatureError);
  EXPECT_TRUE(sig.declares("f"));
  EXPECT_FALSE(sig.declares("g"));
}

// ---------------------------------------------------------------------------
// Parsing

TEST(Parse, OneHasBoundOne) {
  const Signature sig;
  const Formula f = parse_formula("1", sig);
  EXPECT_EQ(f.kind(), Formula::Kind::One);
  EXPECT_EQ(f.bound(), 1.0);
}

TEST(Parse, SupBindsItsVariable) {
  const Signature sig;
  const Formula f = parse_formula("sup x . rho(x,y)", sig);
  EXPECT_EQ(f, Formula::sup("x", rho(sig, "x", "y")));
  EXPECT_EQ(f.free_vars(), std::vector<std::string>{"y"});
}

TEST(Parse, IntegralBound) {
  const Signature sig = basic_signature();
  const Formula f = parse_formula("int x . (2*rho(x,y) + R(x))", sig);
  EXPECT_EQ(f.kind(), Formula::Kind::Integral);
  EXPECT_DOUBLE_EQ(f.bound(), 5.0);
}

TEST(Parse, InfDesugarsToNegatedSup) {
  const Signature sig = basic_signature();
  const Formula f = desugar("inf x . R(x)", sig);
  EXPECT_EQ(f, Formula::scale(-1.0, Formula::sup("x", Formula::scale(-1.0, R(sig, "x")))));
}

TEST(Parse, AbsoluteValueFollowsTheJoinRule) {
  const Signature sig = basic_signature();
  const Formula r = R(sig, "x");
  const Formula expected = Formula::scale(
      -1.0, Formula::meet(Formula::scale(-1.0, r), Formula::scale(-1.0, Formula::scale(-1.0, r))));
  EXPECT_EQ(desugar("|R(x)|", sig), expected);
}

TEST(Parse, ExtendedConnectives) {
  const Signature sig = basic_signature();
  const Formula a = R(sig, "x"), b = rho(sig, "x", "y");
  EXPECT_EQ(desugar("R(x) - rho(x,y)", sig), Formula::sum(a, Formula::scale(-1.0, b)));
  EXPECT_EQ(desugar("R(x) \\/ rho(x,y)", sig),
            Formula::scale(-1.0, Formula::meet(Formula::scale(-1.0, a), Formula::scale(-1.0, b))));
}

TEST(Parse, PrecedenceAndAssociativity) {
  const Signature sig = basic_signature();
  const Formula a = R(sig, "x"), b = R(sig, "y"), c = R(sig, "z");
  EXPECT_EQ(parse_formula("R(x) + R(y) /\\ R(z)", sig), Formula::sum(a, Formula::meet(b, c)));
  EXPECT_EQ(parse_formula("R(x) + R(y) + R(z)", sig), Formula::sum(Formula::sum(a, b), c));
  EXPECT_EQ(parse_formula("sup x . R(x) + R(y)", sig), Formula::sup("x", Formula::sum(a, b)));
  EXPECT_EQ(parse_formula("2 * R(x) + R(y)", sig), Formula::sum(Formula::scale(2.0, a), b));
  EXPECT_EQ(parse_formula("-0.5 * R(x)", sig), Formula::scale(-0.5, a));
  EXPECT_EQ(parse_formula("3", sig), Formula::scale(3.0, Formula::one()));
  EXPECT_EQ(parse_formula("1e-3*R(x)", sig), Formula::scale(1e-3, a));
}

TEST(Parse, TermsResolveConstantsAndFunctions) {
  const Signature sig = basic_signature();
  const Formula f = parse_formula("S(f(a), x)", sig);
  ASSERT_EQ(f.args().size(), 2u);
  EXPECT_EQ(f.args()[0].kind(), Term::Kind::Apply);
  EXPECT_EQ(f.args()[0].args()[0].kind(), Term::Kind::Constant);
  EXPECT_EQ(f.args()[1].kind(), Term::Kind::Variable);
  EXPECT_EQ(f.free_vars(), std::vector<std::string>{"x"});
}

TEST(Parse, Errors) {
  const Signature sig = basic_signature();
  EXPECT_THROW(parse_formula("Q(x)", sig), SignatureError);
  EXPECT_THROW(parse_formula("R(x, y)", sig), SignatureError);
  EXPECT_THROW(parse_formula("f(x)", sig), SignatureError);
  EXPECT_THROW(parse_formula("sup a . R(a)", sig), ParseError);
  EXPECT_THROW(parse_formula("R(x", sig), ParseError);
  EXPECT_THROW(parse_formula("R(x) +", sig), ParseError);
  EXPECT_THROW(parse_formula("sup . R(x)", sig), ParseError);
  EXPECT_THROW(parse_formula("R(x) $ R(y)", sig), ParseError);
  try {
    parse_formula("R(x) + )", sig);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 7u);
  }
}

TEST(Parse, PrinterRoundTripFixedCases) {
  const Signature sig = basic_signature();
  for (const char* text : {"1", "sup x . rho(x, y)", "(sup x . R(x)) + R(y)", "-1*(sup x . R(x)) /\\ R(y)",
                           "R(x) + (R(y) + R(z))", "0.1*(R(x) + R(y))", "int x . sup y . S(f(x), y)",
                           "-2*-3*R(a)", "(int x . R(x)) /\\ (sup y . R(y))"}) {
    const Formula f = parse_formula(text, sig);
    EXPECT_EQ(parse_formula(print_formula(f), sig), f) << text << " -> " << print_formula(f);
  }
}

TEST(Parse, DifferenceOfEqualFormulasIsZero) {
  const Signature sig = basic_signature();
  FiniteStructure s = make_structure(std::make_shared<Signature>(sig), 3);
  const Formula f = parse_formula("R(x) - R(x)", sig);
  fuzz::Rng rng(5, 0);
  for (auto& v : s.relations[*sig.find_relation("R")]) v = rng.uniform(-3.0, 3.0);
  for (std::size_t p = 0; p < 3; ++p) EXPECT_EQ(oracle::evaluate(f, s, {{"x", p}}), 0.0);
}

// ---------------------------------------------------------------------------
// Attributes

TEST(Attributes, Bounds) {
  const Signature sig;
  EXPECT_EQ(bound_of(rho(sig, "x", "y")), 1.0);
  EXPECT_EQ(bound_of(Formula::scale(-3.0, rho(sig, "x", "y"))), 3.0);
  EXPECT_EQ(bound_of(Formula::integral("y", Formula::sum(rho(sig, "x", "y"), rho(sig, "x", "y")))), 2.0);
}

TEST(Attributes, Moduli) {
  const Signature sig;
  EXPECT_DOUBLE_EQ(modulus_of(rho(sig, "x", "y"))(0.4), 0.4);
  EXPECT_DOUBLE_EQ(modulus_of(Formula::scale(2.0, rho(sig, "x", "y")))(0.4), 0.2);
  EXPECT_DOUBLE_EQ(modulus_of(Formula::sum(rho(sig, "x", "y"), rho(sig, "x", "z")))(0.4), 0.2);
  EXPECT_TRUE(std::isinf(modulus_of(Formula::one())(0.4)));
  EXPECT_TRUE(std::isinf(modulus_of(Formula::scale(0.0, rho(sig, "x", "y")))(0.4)));
}

TEST(Attributes, TermModuli) {
  const Signature sig = basic_signature();
  EXPECT_EQ(Term::variable("x").modulus(), Modulus::linear(1.0));
  EXPECT_TRUE(std::isinf(Term::constant(sig, "a").modulus()(0.1)));
  EXPECT_DOUBLE_EQ(Term::apply(sig, "f", {Term::variable("x")}).modulus()(1.0), 0.5);
}

TEST(Attributes, FreeVariables) {
  const Signature sig;
  EXPECT_EQ(free_vars(rho(sig, "x", "y")), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(free_vars(Formula::integral("y", rho(sig, "x", "y"))), std::vector<std::string>{"x"});
  EXPECT_TRUE(free_vars(Formula::one()).empty());
}

TEST(Attributes, QuantifiersPreserveAttributes) {
  const Signature sig = basic_signature();
  const Formula f = parse_formula("2*S(x, y) + R(f(x))", sig);
  for (const Formula& q : {Formula::sup("x", f), Formula::integral("x", f)}) {
    EXPECT_EQ(q.bound(), f.bound());
    for (double eps : {1e-3, 0.1, 0.7, 4.0}) EXPECT_EQ(q.modulus()(eps), f.modulus()(eps));
  }
}

TEST(Attributes, AgreeWithNaiveRecomputation) {
  const auto sig = fuzz::fuzz_signature({3.0, 0.7, 2.5});
  for (std::size_t k = 0; k < 500; ++k) {
    fuzz::Rng rng(21, k);
    const Formula f = fuzz::random_formula(rng, *sig, {8, 4, {"x", "y", "z", "w"}});
    EXPECT_DOUBLE_EQ(f.bound(), oracle::bound(f, *sig));
    for (int e = 0; e < 8; ++e) {
      const double eps = std::pow(10.0, -4.0 + e);
      const double lib = f.modulus()(eps), ref = oracle::modulus(f, *sig, eps);
      if (std::isinf(ref)) {
        EXPECT_TRUE(std::isinf(lib));
      } else {
        EXPECT_NEAR(lib, ref, 1e-12 * ref) << print_formula(f);
      }
    }
  }
}

TEST(RoundTrip, FuzzedFormulas) {
  const auto sig = fuzz::fuzz_signature({});
  for (std::size_t k = 0; k < 1000; ++k) {
    fuzz::Rng rng(3, k);
    const Formula f = fuzz::random_formula(rng, *sig);
    const std::string text = print_formula(f);
    EXPECT_EQ(parse_formula(text, *sig), f) << text;
  }
}
