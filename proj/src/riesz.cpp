#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "cimm/approx.hpp"

namespace cimm {

double Functional::operator()(std::span<const double> f) const {
  double total = 0.0;
  for (std::size_t a = 0; a < weights.size(); ++a) total += weights[a] * f[a];
  return total;
}

void check_functional(const Functional& I, std::size_t points) {
  if (I.weights.size() != points) throw PreconditionError("functional weight vector has the wrong length");
  double total = 0.0;
  for (double w : I.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("functional weights must be >= 0");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw PreconditionError("functional must satisfy I(1) = 1");
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* VerifyReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

double interval_start(std::size_t j, double shift, double width) {
  return static_cast<double>(j) * width - shift;
}

std::size_t interval_index(double v, double shift, double width) {
  const double guess = std::floor((v + shift) / width);
  std::size_t j = guess > 0.0 ? static_cast<std::size_t>(guess) : 0;
  while (j > 0 && interval_start(j, shift, width) > v) --j;
  while (v >= interval_start(j + 1, shift, width) || v - interval_start(j, shift, width) >= width) ++j;
  return j;
}

namespace {

std::vector<double> errors_against(const AtomAlgebra& alg, std::span<const double> targets,
                                   std::span<const double> lambda) {
  std::vector<double> out;
  for (std::size_t i = 0; i < alg.coefficients.size(); ++i) {
    double integral = 0.0;
    for (std::size_t k = 0; k < lambda.size(); ++k) integral += lambda[k] * alg.coefficients[i][k];
    out.push_back(std::fabs(targets[i] - integral));
  }
  return out;
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

RieszResult riesz_discretize(const FiniteStructure& s, const Functional& I,
                             std::span<const std::vector<double>> fs, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("eps must be > 0");
  if (fs.empty()) throw PreconditionError("riesz_discretize needs at least one function");
  const std::size_t n = s.size();
  check_functional(I, n);
  double lowest = 0.0;
  for (const auto& f : fs) {
    if (f.size() != n) throw PreconditionError("function table has the wrong length");
    for (double v : f) {
      if (!std::isfinite(v)) throw PreconditionError("function values must be finite");
      lowest = std::min(lowest, v);
    }
  }

  RieszResult res;
  AtomAlgebra& alg = res.algebra;
  alg.functions.assign(fs.begin(), fs.end());
  alg.shift = -lowest;
  alg.width = eps;

  // Interval signature of every point; atoms are the signature classes,
  // numbered by first occurrence.
  std::size_t top = 0;
  std::vector<std::vector<std::size_t>> sig_of(n, std::vector<std::size_t>(fs.size()));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
      sig_of[a][i] = interval_index(fs[i][a], alg.shift, eps);
      top = std::max(top, sig_of[a][i]);
    }
  }
  for (std::size_t j = 0; j <= top + 1; ++j) alg.endpoints.push_back(interval_start(j, alg.shift, eps));

  std::map<std::vector<std::size_t>, std::size_t> atom_of;
  for (std::size_t a = 0; a < n; ++a) {
    auto [it, fresh] = atom_of.try_emplace(sig_of[a], alg.atoms.size());
    if (fresh) {
      alg.atoms.emplace_back();
      alg.signatures.push_back(sig_of[a]);
    }
    alg.atoms[it->second].push_back(a);
  }

  const std::size_t atoms = alg.atoms.size();
  alg.coefficients.assign(fs.size(), std::vector<double>(atoms));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t k = 0; k < atoms; ++k) {
      alg.coefficients[i][k] = alg.endpoints[alg.signatures[k][i]];
    }
  }

  for (const auto& f : fs) res.targets.push_back(I(f));

  // On a finite space the indicator of an atom is continuous, so
  // lambda(P_k) = I(indicator of P_k).
  res.raw.support.resize(atoms);
  std::iota(res.raw.support.begin(), res.raw.support.end(), 0);
  res.raw.weights.assign(atoms, 0.0);
  for (std::size_t k = 0; k < atoms; ++k) {
    for (std::size_t a : alg.atoms[k]) res.raw.weights[k] += I.weights[a];
  }
  const double mass = std::accumulate(res.raw.weights.begin(), res.raw.weights.end(), 0.0);
  res.mass_defect = std::fabs(1.0 - mass);
  res.raw_errors = errors_against(alg, res.targets, res.raw.weights);
  res.raw.eps_cert = max_of(res.raw_errors);
  res.raw.normalized = false;

  res.measure = res.raw;
  for (double& w : res.measure.weights) w /= mass;
  res.measure.normalized = true;
  res.errors = errors_against(alg, res.targets, res.measure.weights);
  res.measure.eps_cert = max_of(res.errors);
  return res;
}

VerifyReport verify_riesz(const FiniteStructure& s, const Functional& I,
                          std::span<const std::vector<double>> fs, const RieszResult& result,
                          double eps) {
  VerifyReport rep;
  const std::size_t n = s.size();
  const AtomAlgebra& alg = result.algebra;
  auto add = [&](std::string name, bool ok, double value, std::string detail = {}) {
    rep.checks.push_back({std::move(name), ok, value, std::move(detail)});
  };

  bool functional_ok = I.weights.size() == n;
  double total = 0.0;
  for (double w : I.weights) {
    functional_ok = functional_ok && w >= 0.0;
    total += w;
  }
  functional_ok = functional_ok && std::fabs(total - 1.0) <= 1e-12;
  add("functional", functional_ok, total, "positive with I(1) = 1");

  bool shapes_ok = fs.size() == alg.coefficients.size();
  for (const auto& f : fs) shapes_ok = shapes_ok && f.size() == n;
  for (const auto& c : alg.coefficients) shapes_ok = shapes_ok && c.size() == alg.atoms.size();
  shapes_ok = shapes_ok && result.measure.weights.size() == alg.atoms.size() &&
              result.raw.weights.size() == alg.atoms.size() && functional_ok;
  add("shape", shapes_ok, 0.0, "table, atom and weight counts agree");
  if (!shapes_ok) return rep;

  std::vector<std::size_t> owner(n, alg.atoms.size());
  bool partition_ok = true;
  for (std::size_t k = 0; k < alg.atoms.size(); ++k) {
    partition_ok = partition_ok && !alg.atoms[k].empty();
    for (std::size_t a : alg.atoms[k]) {
      if (a >= n || owner[a] != alg.atoms.size()) {
        partition_ok = false;
      } else {
        owner[a] = k;
      }
    }
  }
  partition_ok = partition_ok && std::find(owner.begin(), owner.end(), alg.atoms.size()) == owner.end();
  add("partition", partition_ok, 0.0, "atoms are disjoint, nonempty and cover every point");
  if (!partition_ok) return rep;

  if (!alg.endpoints.empty()) {
    // Atoms must be exactly the classes of equal interval signatures.
    std::map<std::vector<std::size_t>, std::size_t> class_atom;
    bool atoms_ok = true;
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<std::size_t> sig(fs.size());
      for (std::size_t i = 0; i < fs.size(); ++i) sig[i] = interval_index(fs[i][a], alg.shift, alg.width);
      auto [it, fresh] = class_atom.try_emplace(sig, owner[a]);
      atoms_ok = atoms_ok && it->second == owner[a];
    }
    atoms_ok = atoms_ok && class_atom.size() == alg.atoms.size();
    add("atoms", atoms_ok, 0.0, "atoms are the interval signature classes");
  }

  double worst_pointwise = 0.0;
  bool pointwise_ok = true;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      const double diff = fs[i][a] - alg.coefficients[i][owner[a]];
      if (!(diff >= 0.0 && diff < eps)) pointwise_ok = false;
      worst_pointwise = std::max(worst_pointwise, std::fabs(diff));
    }
  }
  add("pointwise", pointwise_ok, worst_pointwise, "0 <= f_i - xi_i < eps");

  auto measure_checks = [&](const ApproxMeasure& m, const std::string& tag) {
    bool positive = std::all_of(m.weights.begin(), m.weights.end(), [](double w) { return w >= 0.0; });
    add("positivity" + tag, positive, 0.0, "weights >= 0");
    std::vector<double> targets;
    for (const auto& f : fs) targets.push_back(I(f));
    const auto errs = errors_against(alg, targets, m.weights);
    const double worst = max_of(errs);
    add("error_bound" + tag, worst <= eps, worst, "|I(f_i) - int xi_i d lambda| <= eps");
    add("certificate" + tag, std::fabs(worst - m.eps_cert) <= 1e-12, m.eps_cert,
        "emitted eps_cert equals the recomputed error");
    return std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
  };
  measure_checks(result.raw, "_raw");
  const double mass = measure_checks(result.measure, "");
  add("normalization", result.measure.normalized && std::fabs(mass - 1.0) <= 1e-12, mass,
      "total mass 1");
  return rep;
}

}  // namespace cimm
