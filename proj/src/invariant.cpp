#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cimm/approx.hpp"

namespace cimm {

namespace {

constexpr std::size_t kRetryBudget = 200;

double min_distance(const FiniteStructure& s, std::span<const std::size_t> pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i] != pts[j]) best = std::min(best, s.distance(pts[i], pts[j]));
    }
  }
  return best;
}

double mean_distance(const MatchingResult& m) {
  if (m.distances.empty()) return 0.0;
  return std::accumulate(m.distances.begin(), m.distances.end(), 0.0) /
         static_cast<double>(m.distances.size());
}

}  // namespace

InvariantResult invariant_measure_approx(const FiniteStructure& s, std::span<const Isometry> group,
                                         double eps, double lipschitz,
                                         std::span<const std::size_t> constants) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("eps must be > 0");
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) throw PreconditionError("Lipschitz slope must be > 0");
  if (group.empty()) throw PreconditionError("isometry group must be nonempty");
  if (s.size() == 0) throw PreconditionError("structure has no points");
  for (const auto& alpha : group) check_isometry(s, alpha);
  for (std::size_t c : constants) {
    if (c >= s.size()) throw PreconditionError("constant point out of range");
  }

  std::vector<std::size_t> all(s.size());
  std::iota(all.begin(), all.end(), 0);
  const double separation = min_distance(s, all);

  double delta = 0.5 * (eps / lipschitz) * (1.0 - 1e-9);
  const double guard = min_distance(s, constants);
  if (std::isfinite(guard)) delta = std::min(delta, 0.5 * guard * (1.0 - 1e-9));
  if (!(delta > 0.0)) throw PreconditionError("designated constants must be distinct points");

  InvariantResult res;
  for (;; delta *= 0.5, ++res.retries) {
    if (res.retries > kRetryBudget) throw std::logic_error("matching retry budget exhausted");
    res.delta = delta;
    res.cover = two_stage_cover(s, delta);
    res.matchings.assign(group.size(), {});
    const auto count = static_cast<std::ptrdiff_t>(group.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t g = 0; g < count; ++g) {
      res.matchings[static_cast<std::size_t>(g)] = isometry_matching(s, res.cover, group[static_cast<std::size_t>(g)], delta);
    }
    if (std::all_of(res.matchings.begin(), res.matchings.end(),
                    [](const MatchingResult& m) { return m.feasible; })) {
      break;
    }
  }
  res.exact_regime = delta < separation;

  const std::size_t m = res.cover.centers.size();
  res.nu.support = res.cover.centers;
  res.nu.weights.assign(m, 1.0 / static_cast<double>(m));
  res.nu.normalized = true;
  for (const auto& mr : res.matchings) {
    res.nu.eps_cert = std::max(res.nu.eps_cert, lipschitz * mean_distance(mr));
  }
  return res;
}

InvarianceReport verify_invariance(const FiniteStructure& s, const InvariantResult& result,
                                   std::span<const Isometry> group,
                                   std::span<const TestFunction> tests, double eps,
                                   double lipschitz) {
  InvarianceReport out;
  auto add = [&](std::string name, bool ok, double value, std::string detail = {}) {
    out.report.checks.push_back({std::move(name), ok, value, std::move(detail)});
  };
  const std::size_t n = s.size();
  const ApproxMeasure& nu = result.nu;

  bool shape_ok = nu.support.size() == nu.weights.size() && result.matchings.size() == group.size();
  for (std::size_t p : nu.support) shape_ok = shape_ok && p < n;
  for (const auto& alpha : group) shape_ok = shape_ok && alpha.size() == n;
  for (const auto& t : tests) shape_ok = shape_ok && t.values.size() == n;
  add("shape", shape_ok, 0.0, "support, weights, matchings and tables agree in size");
  if (!shape_ok) return out;

  const bool positive = std::all_of(nu.weights.begin(), nu.weights.end(), [](double w) { return w >= 0.0; });
  add("positivity", positive, 0.0, "weights >= 0");
  const double mass = std::accumulate(nu.weights.begin(), nu.weights.end(), 0.0);
  add("normalization", nu.normalized && std::fabs(mass - 1.0) <= 1e-12, mass, "total mass 1");

  bool slopes_ok = true;
  double worst_slope = 0.0;
  for (const auto& t : tests) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double diff = std::fabs(t.values[a] - t.values[b]);
        const double d = s.distance(a, b);
        if (d > 0.0) {
          worst_slope = std::max(worst_slope, diff / d);
          slopes_ok = slopes_ok && diff <= t.lipschitz * d * (1.0 + 1e-12) + 1e-15;
        } else {
          slopes_ok = slopes_ok && diff == 0.0;
        }
      }
    }
    slopes_ok = slopes_ok && t.lipschitz <= lipschitz;
  }
  add("test_functions", slopes_ok, worst_slope, "every test function has slope <= declared <= L");

  // Matchings: bijections on the centers with every pair closer than 2 delta.
  bool matchings_ok = true;
  double cert = 0.0;
  const auto& centers = nu.support;
  const std::size_t m = centers.size();
  for (std::size_t g = 0; g < group.size(); ++g) {
    const MatchingResult& mr = result.matchings[g];
    bool ok = mr.feasible && mr.permutation.size() == m && mr.distances.size() == m;
    if (ok) {
      std::vector<bool> hit(m, false);
      double total = 0.0;
      for (std::size_t i = 0; i < m && ok; ++i) {
        const std::size_t j = mr.permutation[i];
        ok = j < m && !hit[j];
        if (!ok) break;
        hit[j] = true;
        const double d = s.distance(group[g][centers[j]], centers[i]);
        ok = std::fabs(d - mr.distances[i]) <= 1e-12 && d < 2.0 * result.delta;
        total += d;
      }
      if (ok) cert = std::max(cert, lipschitz * total / static_cast<double>(m));
    }
    matchings_ok = matchings_ok && ok;
  }
  add("matchings", matchings_ok, 0.0, "bijections on the centers with d(alpha(c_i'), c_i) < 2 delta");
  add("certificate", matchings_ok && std::fabs(cert - nu.eps_cert) <= 1e-12, nu.eps_cert,
      "eps_cert equals L times the worst mean matched distance");
  add("certificate_bound", nu.eps_cert <= eps, nu.eps_cert, "eps_cert <= eps");

  double worst_gap = 0.0;
  bool bound_ok = true;
  for (std::size_t g = 0; g < group.size(); ++g) {
    for (std::size_t f = 0; f < tests.size(); ++f) {
      double plain = 0.0, moved = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        plain += nu.weights[k] * tests[f].values[centers[k]];
        moved += nu.weights[k] * tests[f].values[group[g][centers[k]]];
      }
      const double gap = std::fabs(plain - moved);
      out.gaps.push_back({g, f, gap});
      worst_gap = std::max(worst_gap, gap);
      bound_ok = bound_ok && gap <= tests[f].lipschitz / lipschitz * nu.eps_cert + 1e-12;
    }
  }
  add("invariance", worst_gap <= eps, worst_gap, "|int f d nu - int f o alpha d nu| <= eps");
  add("gap_bound", bound_ok, worst_gap, "every gap within (slope / L) * eps_cert");

  std::vector<std::size_t> sorted = centers;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (sorted == all) {
    double tv = 0.0;
    for (std::size_t k = 0; k < m; ++k) tv += std::fabs(nu.weights[k] - 1.0 / static_cast<double>(n));
    out.tv_to_uniform = 0.5 * tv;
  }
  if (result.exact_regime) {
    const bool exact = out.tv_to_uniform && *out.tv_to_uniform <= 1e-12 && worst_gap <= 1e-12;
    add("exact_regime", exact, out.tv_to_uniform.value_or(1.0),
        "below the minimum distance nu is uniform on all points and exactly invariant");
  }
  return out;
}

}  // namespace cimm
