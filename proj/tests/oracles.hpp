#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "cimm/approx.hpp"
#include "cimm/formula.hpp"
#include "cimm/structure.hpp"

namespace oracle {

using Env = std::map<std::string, std::size_t>;

inline std::size_t term_value(const cimm::Term& t, const cimm::FiniteStructure& s, const Env& env) {
  switch (t.kind()) {
    case cimm::Term::Kind::Variable: return env.at(t.name());
    case cimm::Term::Kind::Constant: return s.constants[t.symbol()];
    case cimm::Term::Kind::Apply: {
      std::vector<std::size_t> args;
      for (const auto& a : t.args()) args.push_back(term_value(a, s, env));
      std::size_t index = 0;
      for (std::size_t a : args) index = index * s.size() + a;
      return s.functions[t.symbol()][index];
    }
  }
  return 0;
}

// Direct recursive evaluation with a variable map.
inline double evaluate(const cimm::Formula& f, const cimm::FiniteStructure& s, Env env) {
  using K = cimm::Formula::Kind;
  switch (f.kind()) {
    case K::One: return 1.0;
    case K::Atomic: {
      std::vector<std::size_t> args;
      for (const auto& t : f.args()) args.push_back(term_value(t, s, env));
      if (f.relation() == 0) return s.dist[args[0] * s.size() + args[1]];
      std::size_t index = 0;
      for (std::size_t a : args) index = index * s.size() + a;
      return s.relations[f.relation()][index];
    }
    case K::Scale: return f.scalar() * oracle::evaluate(f.children()[0], s, env);
    case K::Sum: return oracle::evaluate(f.children()[0], s, env) + oracle::evaluate(f.children()[1], s, env);
    case K::Meet: return std::min(oracle::evaluate(f.children()[0], s, env), oracle::evaluate(f.children()[1], s, env));
    case K::Sup: {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < s.size(); ++a) {
        env[f.variable()] = a;
        best = std::max(best, oracle::evaluate(f.children()[0], s, env));
      }
      return best;
    }
    case K::Integral: {
      double total = 0.0;
      for (std::size_t a = 0; a < s.size(); ++a) {
        env[f.variable()] = a;
        total += s.weights[a] * oracle::evaluate(f.children()[0], s, env);
      }
      return total;
    }
  }
  return 0.0;
}

inline double bound(const cimm::Formula& f, const cimm::Signature& sig) {
  using K = cimm::Formula::Kind;
  switch (f.kind()) {
    case K::One: return 1.0;
    case K::Atomic: return sig.relations()[f.relation()].bound;
    case K::Scale: return std::fabs(f.scalar()) * oracle::bound(f.children()[0], sig);
    case K::Sum:
    case K::Meet: return oracle::bound(f.children()[0], sig) + oracle::bound(f.children()[1], sig);
    default: return oracle::bound(f.children()[0], sig);
  }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double term_modulus(const cimm::Term& t, const cimm::Signature& sig, double eps) {
  switch (t.kind()) {
    case cimm::Term::Kind::Variable: return eps;
    case cimm::Term::Kind::Constant: return kInf;
    case cimm::Term::Kind::Apply: {
      const double inner = sig.functions()[t.symbol()].modulus(eps);
      double best = kInf;
      for (const auto& a : t.args()) best = std::min(best, term_modulus(a, sig, inner));
      return best;
    }
  }
  return kInf;
}

// Numeric value of the modulus at eps, straight from the formation rules.
inline double modulus(const cimm::Formula& f, const cimm::Signature& sig, double eps) {
  using K = cimm::Formula::Kind;
  if (std::isinf(eps)) return kInf;
  switch (f.kind()) {
    case K::One: return kInf;
    case K::Atomic: {
      const double inner = sig.relations()[f.relation()].modulus(eps);
      double best = kInf;
      for (const auto& t : f.args()) best = std::min(best, term_modulus(t, sig, inner));
      return best;
    }
    case K::Scale:
      return f.scalar() == 0.0 ? kInf : oracle::modulus(f.children()[0], sig, eps / std::fabs(f.scalar()));
    case K::Sum:
    case K::Meet:
      return std::min(oracle::modulus(f.children()[0], sig, eps / 2), oracle::modulus(f.children()[1], sig, eps / 2));
    default: return oracle::modulus(f.children()[0], sig, eps);
  }
}

inline double term_slope(const cimm::Term& t, const cimm::Signature& sig) {
  switch (t.kind()) {
    case cimm::Term::Kind::Variable: return 1.0;
    case cimm::Term::Kind::Constant: return 0.0;
    case cimm::Term::Kind::Apply: {
      double inner = 0.0;
      for (const auto& a : t.args()) inner = std::max(inner, term_slope(a, sig));
      return *sig.functions()[t.symbol()].modulus.slope() * inner;
    }
  }
  return 0.0;
}

// Lipschitz slope under the max metric on tuples with rho counted at its
// true slope 2. Symbols must carry Linear or Vacuous moduli.
inline double max_metric_slope(const cimm::Formula& f, const cimm::Signature& sig) {
  using K = cimm::Formula::Kind;
  switch (f.kind()) {
    case K::One: return 0.0;
    case K::Atomic: {
      double inner = 0.0;
      for (const auto& t : f.args()) inner = std::max(inner, term_slope(t, sig));
      const double own = f.relation() == 0 ? 2.0 : *sig.relations()[f.relation()].modulus.slope();
      return own * inner;
    }
    case K::Scale: return std::fabs(f.scalar()) * oracle::max_metric_slope(f.children()[0], sig);
    case K::Sum:
    case K::Meet:
      return 2.0 * std::max(oracle::max_metric_slope(f.children()[0], sig),
                            oracle::max_metric_slope(f.children()[1], sig));
    default: return oracle::max_metric_slope(f.children()[0], sig);
  }
}

// Smallest number of sets covering {0..universe-1}, by enumeration of
// subsets in order of size.
inline std::size_t min_cover_size(std::size_t universe, const std::vector<std::vector<std::size_t>>& sets) {
  const std::size_t k = sets.size();
  std::vector<unsigned long long> masks(k, 0);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t e : sets[s]) masks[s] |= 1ULL << e;
  }
  const unsigned long long full = universe == 64 ? ~0ULL : (1ULL << universe) - 1;
  std::size_t best = k + 1;
  for (unsigned long long choice = 0; choice < (1ULL << k); ++choice) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(choice));
    if (size >= best) continue;
    unsigned long long covered = 0;
    for (std::size_t s = 0; s < k; ++s) {
      if (choice >> s & 1ULL) covered |= masks[s];
    }
    if ((covered & full) == full) best = size;
  }
  return best;
}

// Exhaustive search for a permutation p of the centers with
// d(alpha(c_p(i)), c_i) <= 2 delta - 1e-12 for all i.
inline bool permutation_exists(const cimm::FiniteStructure& s, const std::vector<std::size_t>& centers,
                               const std::vector<std::size_t>& alpha, double delta) {
  std::vector<std::size_t> p(centers.size());
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < p.size() && ok; ++i) {
      ok = s.distance(alpha[centers[p[i]]], centers[i]) <= 2 * delta - 1e-12;
    }
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

// Atoms by linear scan for the interval index of every value.
inline std::set<std::set<std::size_t>> atoms(const std::vector<std::vector<double>>& fs, double shift,
                                             double width) {
  std::map<std::vector<std::size_t>, std::set<std::size_t>> classes;
  const std::size_t n = fs.front().size();
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::size_t> sig;
    for (const auto& f : fs) {
      std::size_t j = 0;
      while (!(cimm::interval_start(j, shift, width) <= f[a] && f[a] < cimm::interval_start(j + 1, shift, width))) ++j;
      sig.push_back(j);
    }
    classes[sig].insert(a);
  }
  std::set<std::set<std::size_t>> out;
  for (auto& [sig, members] : classes) out.insert(members);
  return out;
}

inline std::set<std::set<std::size_t>> as_sets(const std::vector<std::vector<std::size_t>>& parts) {
  std::set<std::set<std::size_t>> out;
  for (const auto& p : parts) out.insert(std::set<std::size_t>(p.begin(), p.end()));
  return out;
}

// All assignments of `vars` variables over n points, row-major.
template <class F>
void for_each_assignment(std::size_t vars, std::size_t n, F&& body) {
  std::vector<std::size_t> t(vars, 0);
  for (;;) {
    body(t);
    std::size_t k = vars;
    while (k > 0) {
      if (++t[k - 1] < n) break;
      t[k - 1] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

inline Env env_of(const std::vector<std::string>& vars, const std::vector<std::size_t>& values) {
  Env env;
  for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = values[i];
  return env;
}

}  // namespace oracle
