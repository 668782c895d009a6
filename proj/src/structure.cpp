#include "cimm/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cimm {

double FiniteStructure::total_mass() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::size_t FiniteStructure::tuple_count(std::size_t arity) const {
  std::size_t n = 1;
  for (std::size_t k = 0; k < arity; ++k) n *= size();
  return n;
}

std::size_t FiniteStructure::encode(std::span<const std::size_t> tuple) const {
  std::size_t idx = 0;
  for (std::size_t a : tuple) idx = idx * size() + a;
  return idx;
}

void FiniteStructure::decode(std::size_t index, std::span<std::size_t> tuple) const {
  for (std::size_t k = tuple.size(); k-- > 0;) {
    tuple[k] = index % size();
    index /= size();
  }
}

double FiniteStructure::tuple_distance(std::span<const std::size_t> a,
                                       std::span<const std::size_t> b) const {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, distance(a[k], b[k]));
  return d;
}

double FiniteStructure::relation_value(std::size_t relation,
                                       std::span<const std::size_t> tuple) const {
  if (relation == Signature::kMetric) return distance(tuple[0], tuple[1]);
  return relations[relation][encode(tuple)];
}

std::size_t FiniteStructure::function_value(std::size_t function,
                                            std::span<const std::size_t> tuple) const {
  return functions[function][encode(tuple)];
}

FiniteStructure make_structure(std::shared_ptr<const Signature> sig, std::size_t points) {
  FiniteStructure s;
  s.signature = std::move(sig);
  for (std::size_t i = 0; i < points; ++i) s.labels.push_back("p" + std::to_string(i));
  s.dist.assign(points * points, 0.0);
  s.weights.assign(points, 0.0);
  s.constants.assign(s.signature->constants().size(), 0);
  for (const auto& f : s.signature->functions()) s.functions.emplace_back(s.tuple_count(f.arity), 0);
  for (std::size_t r = 0; r < s.signature->relations().size(); ++r) {
    const std::size_t arity = s.signature->relations()[r].arity;
    s.relations.emplace_back(r == Signature::kMetric ? 0 : s.tuple_count(arity), 0.0);
  }
  return s;
}

const char* axiom_name(Axiom a) {
  switch (a) {
    case Axiom::WellFormedness: return "well-formedness";
    case Axiom::Metric: return "metric";
    case Axiom::Diameter: return "diameter";
    case Axiom::Mass: return "mass";
    case Axiom::Bound: return "bound";
    case Axiom::Modulus: return "modulus";
  }
  return "?";
}

bool operator<(const Violation& a, const Violation& b) {
  return std::tie(a.axiom, a.symbol, a.witness, a.detail, a.quantity) <
         std::tie(b.axiom, b.symbol, b.witness, b.detail, b.quantity);
}

bool operator==(const Violation& a, const Violation& b) {
  return a.axiom == b.axiom && a.symbol == b.symbol && a.witness == b.witness &&
         a.detail == b.detail && a.quantity == b.quantity;
}

bool ValidationReport::mentions(Axiom a) const {
  return std::any_of(violations.begin(), violations.end(),
                     [a](const Violation& v) { return v.axiom == a; });
}

namespace {

constexpr double kTol = kValidationTolerance;
// Refuse to materialise more than this many distance entries.
constexpr std::size_t kMaxDistanceEntries = 100'000'000;

std::vector<Violation> check_shape(const FiniteStructure& s) {
  std::vector<Violation> out;
  auto bad = [&](std::string symbol, std::string detail) {
    out.push_back({Axiom::WellFormedness, std::move(symbol), {}, 0.0, std::move(detail)});
  };
  const Signature& sig = *s.signature;
  const std::size_t n = s.size();
  if (n == 0) {
    bad("", "structure has no points");
    return out;
  }
  if (std::set<std::string>(s.labels.begin(), s.labels.end()).size() != n) {
    bad("", "point labels are not unique");
  }
  if (s.dist.size() != n * n) bad("rho", "distance matrix is not N x N");
  if (s.weights.size() != n) bad("", "weight vector length differs from point count");
  if (s.constants.size() != sig.constants().size()) {
    bad("", "constant interpretations do not match the signature");
  } else {
    for (std::size_t c = 0; c < s.constants.size(); ++c) {
      if (s.constants[c] >= n) bad(sig.constants()[c], "constant interpreted outside the point set");
    }
  }
  if (s.functions.size() != sig.functions().size()) {
    bad("", "function tables do not match the signature");
  } else {
    for (std::size_t f = 0; f < s.functions.size(); ++f) {
      const auto& sym = sig.functions()[f];
      if (s.functions[f].size() != s.tuple_count(sym.arity)) {
        bad(sym.name, "function table has the wrong number of entries");
      } else if (std::any_of(s.functions[f].begin(), s.functions[f].end(),
                             [n](std::size_t v) { return v >= n; })) {
        bad(sym.name, "function value outside the point set");
      }
    }
  }
  if (s.relations.size() != sig.relations().size()) {
    bad("", "relation tables do not match the signature");
  } else {
    for (std::size_t r = 1; r < s.relations.size(); ++r) {
      const auto& sym = sig.relations()[r];
      if (s.relations[r].size() != s.tuple_count(sym.arity)) {
        bad(sym.name, "relation table has the wrong number of entries");
      }
    }
  }
  return out;
}

// Rows [0, n) of the triangle / symmetry / positivity / diameter scans.
void scan_metric_row(const FiniteStructure& s, MetricKind kind, std::size_t i,
                     std::vector<Violation>& out) {
  const std::size_t n = s.size();
  const double dii = s.distance(i, i);
  if (dii != 0.0) out.push_back({Axiom::Metric, "rho", {{i, i}}, std::fabs(dii), "nonzero diagonal"});
  for (std::size_t j = 0; j < n; ++j) {
    const double dij = s.distance(i, j);
    if (!std::isfinite(dij) || dij < 0.0) {
      out.push_back({Axiom::Metric, "rho", {{i, j}}, dij, "negative or non-finite distance"});
      continue;
    }
    if (j <= i) continue;
    const double dji = s.distance(j, i);
    if (std::fabs(dij - dji) > kTol) {
      out.push_back({Axiom::Metric, "rho", {{i, j}}, std::fabs(dij - dji), "asymmetric distance"});
    }
    if (kind == MetricKind::Metric && dij == 0.0) {
      out.push_back({Axiom::Metric, "rho", {{i, j}}, 0.0, "distinct points at distance 0"});
    }
    if (dij > 1.0 + kTol) {
      out.push_back({Axiom::Diameter, "rho", {{i, j}}, dij - 1.0, "distance exceeds 1"});
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double excess = s.distance(i, k) - (s.distance(i, j) + s.distance(j, k));
      if (excess > kTol) {
        out.push_back({Axiom::Metric, "rho", {{i, j, k}}, excess, "triangle inequality"});
      }
    }
  }
}

// Pairs (t, u) with u > t for one symbol, first tuple fixed.
void scan_modulus_row(const FiniteStructure& s, bool is_relation, std::size_t symbol,
                      std::size_t t, std::vector<Violation>& out) {
  const Signature& sig = *s.signature;
  const std::size_t arity =
      is_relation ? sig.relations()[symbol].arity : sig.functions()[symbol].arity;
  const Modulus& modulus =
      is_relation ? sig.relations()[symbol].modulus : sig.functions()[symbol].modulus;
  const std::string& name = is_relation ? sig.relations()[symbol].name : sig.functions()[symbol].name;
  const auto slope = modulus.slope();
  const std::size_t count = s.tuple_count(arity);

  std::vector<std::size_t> a(arity), b(arity);
  s.decode(t, a);
  for (std::size_t u = t + 1; u < count; ++u) {
    s.decode(u, b);
    const double d = s.tuple_distance(a, b);
    const double diff = is_relation
                            ? std::fabs(s.relations[symbol][t] - s.relations[symbol][u])
                            : s.distance(s.functions[symbol][t], s.functions[symbol][u]);
    bool violated = false;
    double excess = 0.0;
    if (slope) {
      excess = diff - *slope * d;
      violated = excess > kTol;
    } else {
      violated = violates_modulus(modulus, d, diff);
      excess = diff;
    }
    if (violated) out.push_back({Axiom::Modulus, name, {a, b}, excess, "continuity modulus"});
  }
}

struct Job {
  enum Kind { MetricRow, RelationRow, FunctionRow } kind;
  std::size_t symbol;
  std::size_t row;
};

std::vector<Job> plan_jobs(const FiniteStructure& s) {
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < s.size(); ++i) jobs.push_back({Job::MetricRow, 0, i});
  const Signature& sig = *s.signature;
  for (std::size_t r = 1; r < sig.relations().size(); ++r) {
    for (std::size_t t = 0; t < s.tuple_count(sig.relations()[r].arity); ++t) {
      jobs.push_back({Job::RelationRow, r, t});
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    for (std::size_t t = 0; t < s.tuple_count(sig.functions()[f].arity); ++t) {
      jobs.push_back({Job::FunctionRow, f, t});
    }
  }
  return jobs;
}

void run_job(const FiniteStructure& s, MetricKind kind, const Job& job, std::vector<Violation>& out) {
  switch (job.kind) {
    case Job::MetricRow: scan_metric_row(s, kind, job.row, out); break;
    case Job::RelationRow: scan_modulus_row(s, true, job.symbol, job.row, out); break;
    case Job::FunctionRow: scan_modulus_row(s, false, job.symbol, job.row, out); break;
  }
}

void check_pointwise(const FiniteStructure& s, std::vector<Violation>& out) {
  const Signature& sig = *s.signature;
  double mass = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = s.weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      out.push_back({Axiom::Mass, "", {{i}}, w, "negative or non-finite weight"});
    } else {
      mass += w;
    }
  }
  if (mass > 1.0 + kTol) out.push_back({Axiom::Mass, "", {}, mass - 1.0, "total mass exceeds 1"});

  std::vector<std::size_t> tuple;
  for (std::size_t r = 1; r < sig.relations().size(); ++r) {
    const auto& sym = sig.relations()[r];
    tuple.resize(sym.arity);
    for (std::size_t t = 0; t < s.relations[r].size(); ++t) {
      const double v = s.relations[r][t];
      if (!std::isfinite(v) || std::fabs(v) > sym.bound + kTol) {
        s.decode(t, tuple);
        out.push_back({Axiom::Bound, sym.name, {tuple}, std::fabs(v) - sym.bound, "relation bound"});
      }
    }
  }
}

ValidationReport finish(std::vector<Violation> v) {
  std::sort(v.begin(), v.end());
  return ValidationReport{std::move(v)};
}

}  // namespace

ValidationReport validate_serial(const FiniteStructure& s, MetricKind kind) {
  auto shape = check_shape(s);
  if (!shape.empty()) return finish(std::move(shape));
  std::vector<Violation> out;
  check_pointwise(s, out);
  for (const Job& job : plan_jobs(s)) run_job(s, kind, job, out);
  return finish(std::move(out));
}

ValidationReport validate(const FiniteStructure& s, MetricKind kind) {
  auto shape = check_shape(s);
  if (!shape.empty()) return finish(std::move(shape));
  std::vector<Violation> out;
  check_pointwise(s, out);
  const std::vector<Job> jobs = plan_jobs(s);
  const auto job_count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel
  {
    std::vector<Violation> local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::ptrdiff_t j = 0; j < job_count; ++j) run_job(s, kind, jobs[j], local);
#pragma omp critical(cimm_validate_merge)
    out.insert(out.end(), local.begin(), local.end());
  }
  return finish(std::move(out));
}

std::vector<double> power_weights(const FiniteStructure& s, std::size_t n, std::size_t cap) {
  if (n < 1) throw PreconditionError("product power needs n >= 1");
  std::size_t count = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (count > cap / std::max<std::size_t>(s.size(), 1)) {
      throw PreconditionError("product power exceeds the size cap of " + std::to_string(cap));
    }
    count *= s.size();
  }
  std::vector<double> w(count);
  std::vector<std::size_t> tuple(n);
  for (std::size_t t = 0; t < count; ++t) {
    s.decode(t, tuple);
    double p = 1.0;
    for (std::size_t a : tuple) p *= s.weights[a];
    w[t] = p;
  }
  return w;
}

FiniteStructure product_power(const FiniteStructure& s, std::size_t n, std::size_t cap) {
  std::vector<double> w = power_weights(s, n, cap);
  const std::size_t count = w.size();
  if (count > 0 && count > kMaxDistanceEntries / count) {
    throw PreconditionError("product power distance matrix too large to materialise");
  }
  FiniteStructure out;
  out.weights = std::move(w);
  out.relations.resize(1);
  out.labels.reserve(count);
  std::vector<std::size_t> a(n), b(n);
  for (std::size_t t = 0; t < count; ++t) {
    s.decode(t, a);
    std::string label = "(";
    for (std::size_t k = 0; k < n; ++k) {
      if (k) label += ',';
      label += s.labels[a[k]];
    }
    out.labels.push_back(label + ")");
  }
  out.dist.assign(count * count, 0.0);
  for (std::size_t t = 0; t < count; ++t) {
    s.decode(t, a);
    for (std::size_t u = 0; u < count; ++u) {
      s.decode(u, b);
      out.dist[t * count + u] = s.tuple_distance(a, b);
    }
  }
  return out;
}

SubspaceResult subspace(const FiniteStructure& s, std::span<const std::size_t> subset) {
  if (subset.empty()) throw PreconditionError("subspace needs a nonempty subset");
  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> position(s.size(), kAbsent);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] >= s.size()) throw PreconditionError("subspace index out of range");
    if (position[subset[i]] != kAbsent) throw PreconditionError("subspace index repeated");
    position[subset[i]] = i;
  }
  const Signature& sig = *s.signature;
  SubspaceResult res;
  res.points.assign(subset.begin(), subset.end());
  FiniteStructure sub = make_structure(s.signature, subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    sub.labels[i] = s.labels[subset[i]];
    sub.weights[i] = s.weights[subset[i]];
    for (std::size_t j = 0; j < subset.size(); ++j) {
      sub.dist[i * subset.size() + j] = s.distance(subset[i], subset[j]);
    }
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c) {
    const std::size_t p = position[s.constants[c]];
    if (p == kAbsent) {
      throw ClosureError(sig.constants()[c],
                         "constant '" + sig.constants()[c] + "' is interpreted outside the subset");
    }
    sub.constants[c] = p;
  }
  auto translate = [&](std::size_t sub_index, std::size_t arity, std::vector<std::size_t>& tuple) {
    tuple.resize(arity);
    sub.decode(sub_index, tuple);
    for (auto& a : tuple) a = subset[a];
    return s.encode(tuple);
  };
  std::vector<std::size_t> tuple;
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const auto& sym = sig.functions()[f];
    for (std::size_t t = 0; t < sub.functions[f].size(); ++t) {
      const std::size_t value = s.functions[f][translate(t, sym.arity, tuple)];
      if (position[value] == kAbsent) {
        throw ClosureError(sym.name, "function '" + sym.name + "' maps the subset outside itself");
      }
      sub.functions[f][t] = position[value];
    }
  }
  for (std::size_t r = 1; r < sig.relations().size(); ++r) {
    const auto& sym = sig.relations()[r];
    for (std::size_t t = 0; t < sub.relations[r].size(); ++t) {
      sub.relations[r][t] = s.relations[r][translate(t, sym.arity, tuple)];
    }
  }
  res.mass = sub.total_mass();
  double complement = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (position[i] == kAbsent) complement += s.weights[i];
  }
  res.full_outer_measure = complement <= 0.0;
  res.structure = std::move(sub);
  return res;
}

}  // namespace cimm
