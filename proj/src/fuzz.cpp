#include "cimm/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <sstream>

#include "cimm/evaluator.hpp"
#include "cimm/parser.hpp"
#include "cimm/semantics.hpp"

namespace cimm::fuzz {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix(splitmix(seed) ^ splitmix(stream + 0x632be59bd9b4e019ULL))) {}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t Rng::below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }

std::size_t Rng::between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }

std::shared_ptr<const Signature> fuzz_signature(const SymbolSlopes& slopes) {
  auto sig = std::make_shared<Signature>();
  sig->add_constant("a");
  sig->add_function("f", 1, Modulus::linear(slopes.f));
  sig->add_relation("P", 1, 1.0, Modulus::linear(slopes.P));
  sig->add_relation("R", 2, 1.0, Modulus::linear(slopes.R));
  return sig;
}

namespace {

// Distance matrix on k distinct points with diameter <= 1.
std::vector<double> random_metric(Rng& rng, std::size_t k) {
  std::vector<double> d(k * k, 0.0);
  const std::size_t mode = rng.below(3);
  for (;;) {
    if (mode == 0) {
      std::vector<double> px(k), py(k);
      for (std::size_t i = 0; i < k; ++i) {
        px[i] = rng.uniform();
        py[i] = rng.uniform();
      }
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) d[i * k + j] = std::hypot(px[i] - px[j], py[i] - py[j]);
      }
    } else if (mode == 1) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) d[i * k + j] = d[j * k + i] = rng.uniform(0.05, 1.0);
      }
      for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = 0; j < k; ++j) d[i * k + j] = std::min(d[i * k + j], d[i * k + m] + d[m * k + j]);
        }
      }
    } else {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) d[i * k + j] = d[j * k + i] = rng.uniform(0.5, 1.0);
      }
    }
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        lo = std::min(lo, d[i * k + j]);
        hi = std::max(hi, d[i * k + j]);
      }
    }
    if (hi > 1.0) {
      for (double& v : d) v /= hi;
      lo /= hi;
    }
    if (lo >= 0.02) return d;
  }
}

double empirical_slope(const FiniteStructure& s, std::size_t arity,
                       const std::function<double(std::span<const std::size_t>, std::span<const std::size_t>)>& diff) {
  const std::size_t count = s.tuple_count(arity);
  std::vector<std::size_t> a(arity), b(arity);
  double slope = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    s.decode(i, a);
    for (std::size_t j = i + 1; j < count; ++j) {
      s.decode(j, b);
      const double d = s.tuple_distance(a, b);
      if (d > 0.0) slope = std::max(slope, diff(a, b) / d);
    }
  }
  return slope;
}

double declared(double slope) { return slope > 0.0 ? slope * (1.0 + 1e-9) + 1e-12 : 1.0; }

}  // namespace

void fit_signature(std::span<FiniteStructure> family) {
  SymbolSlopes fitted{0.0, 0.0, 0.0};
  for (const auto& s : family) {
    const auto& sig = *s.signature;
    const std::size_t f = *sig.find_function("f");
    const std::size_t P = *sig.find_relation("P");
    const std::size_t R = *sig.find_relation("R");
    fitted.f = std::max(fitted.f, empirical_slope(s, 1, [&](auto x, auto y) {
      return s.distance(s.function_value(f, x), s.function_value(f, y));
    }));
    fitted.P = std::max(fitted.P, empirical_slope(s, 1, [&](auto x, auto y) {
      return std::fabs(s.relation_value(P, x) - s.relation_value(P, y));
    }));
    fitted.R = std::max(fitted.R, empirical_slope(s, 2, [&](auto x, auto y) {
      return std::fabs(s.relation_value(R, x) - s.relation_value(R, y));
    }));
  }
  auto sig = fuzz_signature({declared(fitted.f), declared(fitted.P), declared(fitted.R)});
  for (auto& s : family) s.signature = sig;
}

FiniteStructure random_structure(Rng& rng, const StructureOptions& opts) {
  const std::size_t lo = std::max<std::size_t>(opts.pseudo ? 2 : 1, opts.min_points);
  const std::size_t n = rng.between(lo, std::max(lo, opts.max_points));
  const std::size_t k = opts.pseudo ? rng.between(1, n - 1) : n;

  // Class of every point; each class is nonempty.
  std::vector<std::size_t> cls(n);
  for (std::size_t p = 0; p < n; ++p) cls[p] = p < k ? p : rng.below(k);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t p = 0; p < n; ++p) members[cls[p]].push_back(p);

  const auto cd = random_metric(rng, k);
  FiniteStructure s = make_structure(fuzz_signature({}), n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) s.dist[p * n + q] = cd[cls[p] * k + cls[q]];
  }

  double total = 0.0;
  for (double& w : s.weights) {
    w = rng.chance(0.15) ? 0.0 : rng.uniform();
    total += w;
  }
  if (total == 0.0) {
    s.weights[0] = 1.0;
    total = 1.0;
  }
  const double mass = rng.chance(0.5) ? 1.0 : rng.uniform(0.5, 1.0);
  for (double& w : s.weights) w = w / total * mass;

  s.constants[0] = rng.below(n);
  std::vector<std::size_t> image(k);
  for (auto& c : image) c = rng.below(k);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& target = members[image[cls[p]]];
    s.functions[0][p] = target[rng.below(target.size())];
  }

  const auto& sig = *s.signature;
  const std::size_t P = *sig.find_relation("P");
  const std::size_t R = *sig.find_relation("R");
  std::vector<double> pc(k);
  for (double& v : pc) v = rng.uniform();
  for (std::size_t p = 0; p < n; ++p) s.relations[P][p] = pc[cls[p]];
  std::vector<double> rc(k * k);
  const bool metric_like = rng.chance(0.3);
  for (std::size_t i = 0; i < k * k; ++i) rc[i] = metric_like ? cd[i] : rng.uniform();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) s.relations[R][p * n + q] = rc[cls[p] * k + cls[q]];
  }

  fit_signature(std::span<FiniteStructure>(&s, 1));
  return s;
}

std::vector<FiniteStructure> random_family(Rng& rng, std::size_t count, const StructureOptions& opts) {
  std::vector<FiniteStructure> family;
  for (std::size_t i = 0; i < count; ++i) family.push_back(random_structure(rng, opts));
  fit_signature(family);
  return family;
}

namespace {

class FormulaGen {
 public:
  FormulaGen(Rng& rng, const Signature& sig, const FormulaOptions& opts)
      : rng_(rng), sig_(sig), opts_(opts) {}

  Formula formula(std::size_t depth, std::size_t quantifiers) {
    if (depth <= 1 || rng_.chance(0.2)) return atom();
    const std::size_t pick = rng_.below(quantifiers > 0 ? 6 : 4);
    switch (pick) {
      case 0: {
        const double r = scalar();
        return Formula::scale(r, formula(depth - 1, quantifiers));
      }
      case 1:
      case 2: {
        // Sequenced explicitly so the draw order does not depend on the compiler.
        Formula left = formula(depth - 1, quantifiers);
        Formula right = formula(depth - 1, quantifiers);
        return pick == 1 ? Formula::sum(left, right) : Formula::meet(left, right);
      }
      case 3: return atom();
      default: {
        std::string var = variable();
        Formula body = formula(depth - 1, quantifiers - 1);
        return pick == 4 ? Formula::sup(var, body) : Formula::integral(var, body);
      }
    }
  }

  Formula atom() {
    switch (rng_.below(7)) {
      case 0: return Formula::one();
      case 1:
      case 2: return Formula::atomic(sig_, "rho", {term(2), term(2)});
      case 3:
      case 4: return Formula::atomic(sig_, "P", {term(2)});
      default: return Formula::atomic(sig_, "R", {term(2), term(2)});
    }
  }

  Term term(std::size_t depth) {
    const double u = rng_.uniform();
    if (u < 0.7 || depth == 0) return Term::variable(variable());
    if (u < 0.85) return Term::constant(sig_, "a");
    return Term::apply(sig_, "f", {term(depth - 1)});
  }

  std::string variable() { return opts_.variables[rng_.below(opts_.variables.size())]; }

  double scalar() {
    static constexpr double kFixed[] = {-1.0, 0.5, 2.0, -0.5, 0.25, 3.0, 0.0, 1.0, -2.0};
    if (rng_.chance(0.7)) return kFixed[rng_.below(std::size(kFixed))];
    return rng_.uniform(-3.0, 3.0);
  }

 private:
  Rng& rng_;
  const Signature& sig_;
  const FormulaOptions& opts_;
};

}  // namespace

Formula random_formula(Rng& rng, const Signature& sig, const FormulaOptions& opts) {
  return FormulaGen(rng, sig, opts).formula(opts.max_depth, opts.max_quantifier_depth);
}

Formula random_open_formula(Rng& rng, const Signature& sig, std::size_t min_free,
                            const FormulaOptions& opts) {
  if (min_free > opts.variables.size()) throw PreconditionError("not enough variables in the pool");
  FormulaOptions inner = opts;
  inner.max_depth = std::max<std::size_t>(opts.max_depth, 2) - 1;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Formula f = random_formula(rng, sig, opts);
    if (f.free_vars().size() >= min_free) return f;
  }
  Formula f = random_formula(rng, sig, inner);
  // Join in atoms that mention enough pool variables.
  Formula extra = Formula::one();
  bool first = true;
  for (std::size_t i = 0; i < min_free; i += 2) {
    const std::string& u = opts.variables[i];
    const std::string& v = opts.variables[std::min(i + 1, min_free - 1)];
    Formula a = Formula::atomic(sig, "R", {Term::variable(u), Term::variable(v)});
    extra = first ? a : Formula::meet(extra, a);
    first = false;
  }
  return rng.chance(0.5) ? Formula::sum(f, extra) : Formula::meet(extra, f);
}

RieszCase random_riesz_case(Rng& rng) {
  static constexpr double kEps[] = {0.05, 0.1, 0.3};
  RieszCase c;
  c.structure = random_structure(rng, {1, 10, false});
  const std::size_t n = c.structure.size();
  c.eps = kEps[rng.below(3)];
  c.functional.weights.resize(n);
  double total = 0.0;
  for (double& w : c.functional.weights) {
    w = rng.chance(0.2) ? 0.0 : rng.uniform();
    total += w;
  }
  if (total == 0.0) {
    c.functional.weights[0] = 1.0;
    total = 1.0;
  }
  for (double& w : c.functional.weights) w /= total;
  const std::size_t t = rng.between(1, 4);
  for (std::size_t i = 0; i < t; ++i) {
    std::vector<double> f(n);
    const std::size_t mode = rng.below(3);
    const double offset = rng.uniform(-1.0, 1.0);
    for (std::size_t a = 0; a < n; ++a) {
      if (mode == 0) {
        f[a] = rng.uniform(-1.0, 2.0);
      } else if (mode == 1) {
        // Values on interval boundaries.
        f[a] = static_cast<double>(rng.below(20)) * 0.05;
      } else {
        f[a] = offset + c.structure.distance(a, c.structure.constants[0]);
      }
    }
    c.functions.push_back(std::move(f));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Suites

namespace {

struct Outcome {
  bool ok = true;
  double worst = 0.0;
  std::string what;
};

enum SuiteId : std::uint64_t { kSoundness = 1, kFubini, kQuotient, kLos, kRiesz, kRoundtrip };

Rng case_rng(std::uint64_t seed, SuiteId suite, std::size_t k) {
  return Rng(seed, (static_cast<std::uint64_t>(suite) << 40) | k);
}

SuiteResult run_suite(std::string name, std::size_t count, const std::function<Outcome(std::size_t)>& body) {
  std::vector<Outcome> out(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = body(static_cast<std::size_t>(k));
    } catch (const std::exception& e) {
      out[static_cast<std::size_t>(k)] = {false, 0.0, std::string("exception: ") + e.what()};
    }
  }
  SuiteResult res;
  res.name = std::move(name);
  res.cases = count;
  for (std::size_t k = 0; k < count; ++k) {
    res.worst = std::max(res.worst, out[k].worst);
    if (!out[k].ok) {
      if (res.failures == 0) res.first_failure = "case " + std::to_string(k) + ": " + out[k].what;
      ++res.failures;
    }
  }
  return res;
}

std::vector<std::size_t> random_assignment(Rng& rng, std::size_t vars, std::size_t n) {
  std::vector<std::size_t> v(vars);
  for (auto& p : v) p = rng.below(n);
  return v;
}

}  // namespace

SuiteResult soundness_suite(std::uint64_t seed, std::size_t count) {
  return run_suite("soundness", count, [&](std::size_t k) {
    Rng rng = case_rng(seed, kSoundness, k);
    const FiniteStructure s = random_structure(rng);
    const Formula phi = random_formula(rng, *s.signature);
    const Evaluator ev(phi, s);
    const double b = phi.bound();
    const auto slope = phi.modulus().slope();
    Outcome o;
    if (!slope) return Outcome{false, 0.0, "modulus has no Lipschitz normal form: " + print_formula(phi)};
    for (int trial = 0; trial < 4; ++trial) {
      const auto u = random_assignment(rng, ev.variables().size(), s.size());
      const auto v = random_assignment(rng, ev.variables().size(), s.size());
      const double fu = ev(u), fv = ev(v);
      const double d = s.tuple_distance(u, v);
      const double excess = std::max({std::fabs(fu) - b, std::fabs(fv) - b, std::fabs(fu - fv) - *slope * d});
      o.worst = std::max(o.worst, std::max(excess, 0.0));
      if (excess > 1e-9 && o.ok) {
        o.ok = false;
        o.what = print_formula(phi);
      }
    }
    return o;
  });
}

SuiteResult fubini_suite(std::uint64_t seed, std::size_t count) {
  return run_suite("fubini", count, [&](std::size_t k) {
    Rng rng = case_rng(seed, kFubini, k);
    const FiniteStructure s = random_structure(rng, {1, 6, false});
    const Formula phi = random_open_formula(rng, *s.signature, 2, {5, 2, {"x", "y", "z"}});
    const FubiniResult r = fubini_check(phi, s);
    const double worst = std::max(r.discrepancy, r.product_discrepancy);
    const bool ok = worst <= 1e-12 * r.bound;
    return Outcome{ok, worst, ok ? "" : print_formula(phi)};
  });
}

SuiteResult quotient_suite(std::uint64_t seed, std::size_t count) {
  return run_suite("quotient", count, [&](std::size_t k) {
    Rng rng = case_rng(seed, kQuotient, k);
    const FiniteStructure p = random_structure(rng, {2, 6, true});
    const QuotientResult q = quotient(p);
    Outcome o;
    if (!validate(p, MetricKind::Pseudo).ok() || !validate(q.structure).ok()) {
      return Outcome{false, 0.0, "generated pseudostructure or its quotient fails validation"};
    }
    for (int i = 0; i < 3; ++i) {
      const Formula phi = random_formula(rng, *p.signature, {5, 2, {"x", "y", "z"}});
      const auto vp = evaluate_all(phi, p);
      const auto vq = evaluate_all(phi, q.structure);
      const std::size_t vars = phi.free_vars().size();
      std::vector<std::size_t> tuple(vars), image(vars);
      for (std::size_t t = 0; t < vp.size(); ++t) {
        p.decode(t, tuple);
        for (std::size_t j = 0; j < vars; ++j) image[j] = q.projection[tuple[j]];
        const double gap = std::fabs(vp[t] - vq[q.structure.encode(image)]);
        o.worst = std::max(o.worst, gap);
        if (gap > 1e-9 && o.ok) {
          o.ok = false;
          o.what = print_formula(phi);
        }
      }
    }
    return o;
  });
}

SuiteResult los_suite(std::uint64_t seed, std::size_t count) {
  return run_suite("los", count, [&](std::size_t k) {
    Rng rng = case_rng(seed, kLos, k);
    auto family = random_family(rng, rng.between(1, 5), {1, 5, false});
    const std::size_t index = rng.below(family.size());
    const auto u = principal_ultraproduct(family, index);
    std::vector<Formula> formulas;
    for (int i = 0; i < 10; ++i) formulas.push_back(random_formula(rng, *family[0].signature, {5, 2, {"x", "y", "z"}}));
    const double gap = los_discrepancy(family, index, u, formulas);
    return Outcome{gap == 0.0, gap, gap == 0.0 ? "" : "nonzero discrepancy"};
  });
}

SuiteResult riesz_suite(std::uint64_t seed, std::size_t count) {
  return run_suite("riesz", count, [&](std::size_t k) {
    Rng rng = case_rng(seed, kRiesz, k);
    const RieszCase c = random_riesz_case(rng);
    const RieszResult r = riesz_discretize(c.structure, c.functional, c.functions, c.eps);
    const VerifyReport rep = verify_riesz(c.structure, c.functional, c.functions, r, c.eps);
    double worst = 0.0;
    for (double e : r.raw_errors) worst = std::max(worst, e - c.eps);
    for (const auto& chk : rep.checks) {
      if (!chk.passed) return Outcome{false, worst, "check " + chk.name + " failed"};
    }
    return Outcome{true, worst, ""};
  });
}

SuiteResult roundtrip_suite(std::uint64_t seed, std::size_t count) {
  const auto sig = fuzz_signature({});
  return run_suite("roundtrip", count, [&](std::size_t k) {
    Rng rng = case_rng(seed, kRoundtrip, k);
    const Formula phi = random_formula(rng, *sig);
    const std::string text = print_formula(phi);
    const Formula back = parse_formula(text, *sig);
    const bool ok = back == phi && print_formula(back) == text;
    return Outcome{ok, ok ? 0.0 : 1.0, ok ? "" : text};
  });
}

std::vector<SuiteResult> run_all(std::uint64_t seed, std::size_t count) {
  return {soundness_suite(seed, count), fubini_suite(seed, count), quotient_suite(seed, count),
          los_suite(seed, count),       riesz_suite(seed, count),  roundtrip_suite(seed, count)};
}

}  // namespace cimm::fuzz
