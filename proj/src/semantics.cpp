#include "cimm/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cimm/parser.hpp"

namespace cimm {

Statement universally_zero(const Formula& phi) {
  Formula body = absolute(phi);
  const auto& vars = phi.free_vars();
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = Formula::sup(*it, std::move(body));
  return Statement{Statement::Kind::Equal, std::move(body), Formula::scale(0.0, Formula::one()), std::nullopt};
}

Verdict check_statement(const Statement& st, const FiniteStructure& s, double eps) {
  if (!st.closed()) throw PreconditionError("statement has free variables");
  if (!(eps >= 0.0)) throw PreconditionError("tolerance must be >= 0");
  Verdict v;
  v.left = evaluate(st.left, s, {});
  v.right = evaluate(st.right, s, {});
  v.gap = st.kind == Statement::Kind::Equal ? std::fabs(v.left - v.right) : v.left - v.right;
  v.holds = v.gap <= eps;
  return v;
}

TheoryReport check_theory(const Theory& t, const FiniteStructure& s) {
  TheoryReport report;
  for (const Statement& st : t.statements) {
    StatementResult r;
    r.statement = print_formula(st.left) + (st.kind == Statement::Kind::Equal ? " = " : " <= ") +
                  print_formula(st.right);
    r.eps = st.eps.value_or(t.eps);
    r.verdict = check_statement(st, s, r.eps);
    report.worst_gap = report.results.empty() ? r.verdict.gap : std::max(report.worst_gap, r.verdict.gap);
    report.holds = report.holds && r.verdict.holds;
    report.results.push_back(std::move(r));
  }
  return report;
}

// ---------------------------------------------------------------------------

FubiniResult fubini_check(const Formula& phi, const FiniteStructure& s, std::size_t cap,
                          std::optional<std::string> x, std::optional<std::string> y) {
  const auto& vars = phi.free_vars();
  if (vars.size() < 2) throw PreconditionError("Fubini check needs two free variables");
  FubiniResult res;
  res.x = x.value_or(vars[0]);
  res.y = y.value_or(vars[1]);
  res.bound = phi.bound();
  auto has = [&](const std::string& v) { return std::find(vars.begin(), vars.end(), v) != vars.end(); };
  if (!has(res.x) || !has(res.y) || res.x == res.y) {
    throw PreconditionError("integration variables must be two distinct free variables");
  }

  const Formula dx_dy = Formula::integral(res.y, Formula::integral(res.x, phi));
  const Formula dy_dx = Formula::integral(res.x, Formula::integral(res.y, phi));
  const std::vector<double> first = evaluate_all(dx_dy, s, cap);
  const std::vector<double> second = evaluate_all(dy_dx, s, cap);

  // Sum against the product measure on M^2, one remaining assignment at a time.
  const std::vector<double> pair_weights = power_weights(s, 2, cap);
  const Evaluator integrand(phi, s);
  const auto& rest = dx_dy.free_vars();
  const std::size_t xi = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), res.x) - vars.begin());
  const std::size_t yi = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), res.y) - vars.begin());
  std::vector<std::size_t> rest_pos;
  for (const auto& v : rest) {
    rest_pos.push_back(static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin()));
  }

  std::vector<std::size_t> rest_values(rest.size()), values(vars.size()), pair(2);
  for (std::size_t g = 0; g < first.size(); ++g) {
    s.decode(g, rest_values);
    for (std::size_t k = 0; k < rest.size(); ++k) values[rest_pos[k]] = rest_values[k];
    double product = 0.0;
    for (std::size_t t = 0; t < pair_weights.size(); ++t) {
      s.decode(t, pair);
      values[xi] = pair[0];
      values[yi] = pair[1];
      product += pair_weights[t] * integrand(values);
    }
    res.discrepancy = std::max(res.discrepancy, std::fabs(first[g] - second[g]));
    res.product_discrepancy = std::max(
        {res.product_discrepancy, std::fabs(first[g] - product), std::fabs(second[g] - product)});
  }
  return res;
}

// ---------------------------------------------------------------------------

QuotientResult quotient(const FiniteStructure& p) {
  const std::size_t n = p.size();
  const Signature& sig = *p.signature;

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (p.distance(i, j) == 0.0) {
        const std::size_t a = find(i), b = find(j);
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  QuotientResult res;
  res.projection.assign(n, 0);
  std::vector<std::size_t> reps;  // class -> smallest member
  std::vector<std::size_t> class_of_root(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (class_of_root[r] == n) {
      class_of_root[r] = reps.size();
      reps.push_back(i);
    }
    res.projection[i] = class_of_root[r];
  }
  const std::size_t k = reps.size();

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = p.distance(reps[res.projection[i]], reps[res.projection[j]]);
      if (std::fabs(d - p.distance(i, j)) > kValidationTolerance) {
        throw QuotientError("rho", {i, j}, {reps[res.projection[i]], reps[res.projection[j]]},
                            "distance is not constant on equivalence classes");
      }
    }
  }

  auto representative = [&](std::vector<std::size_t> tuple) {
    for (auto& a : tuple) a = reps[res.projection[a]];
    return tuple;
  };

  FiniteStructure q = make_structure(p.signature, k);
  for (std::size_t c = 0; c < k; ++c) q.labels[c].clear();
  for (std::size_t i = 0; i < n; ++i) {
    auto& label = q.labels[res.projection[i]];
    if (!label.empty()) label += '~';
    label += p.labels[i];
    q.weights[res.projection[i]] += p.weights[i];
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) q.dist[a * k + b] = p.distance(reps[a], reps[b]);
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c) q.constants[c] = res.projection[p.constants[c]];

  std::vector<std::size_t> tuple, cls;
  for (std::size_t r = 1; r < sig.relations().size(); ++r) {
    const auto& sym = sig.relations()[r];
    tuple.resize(sym.arity);
    for (std::size_t t = 0; t < p.relations[r].size(); ++t) {
      p.decode(t, tuple);
      const auto rep = representative(tuple);
      if (std::fabs(p.relations[r][t] - p.relation_value(r, rep)) > 1e-12) {
        throw QuotientError(sym.name, tuple, rep,
                            "relation '" + sym.name + "' separates points at distance 0");
      }
    }
    cls.resize(sym.arity);
    for (std::size_t t = 0; t < q.relations[r].size(); ++t) {
      q.decode(t, cls);
      for (auto& a : cls) a = reps[a];
      q.relations[r][t] = p.relation_value(r, cls);
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const auto& sym = sig.functions()[f];
    tuple.resize(sym.arity);
    for (std::size_t t = 0; t < p.functions[f].size(); ++t) {
      p.decode(t, tuple);
      const auto rep = representative(tuple);
      if (res.projection[p.functions[f][t]] != res.projection[p.function_value(f, rep)]) {
        throw QuotientError(sym.name, tuple, rep,
                            "function '" + sym.name + "' separates points at distance 0");
      }
    }
    cls.resize(sym.arity);
    for (std::size_t t = 0; t < q.functions[f].size(); ++t) {
      q.decode(t, cls);
      for (auto& a : cls) a = reps[a];
      q.functions[f][t] = res.projection[p.function_value(f, cls)];
    }
  }
  res.class_weights = q.weights;
  res.structure = std::move(q);
  return res;
}

// ---------------------------------------------------------------------------

bool PrincipalUltrafilter::contains(std::span<const std::size_t> members) const {
  return std::find(members.begin(), members.end(), index) != members.end();
}

UltraproductResult principal_ultraproduct(std::span<const FiniteStructure> family,
                                          std::size_t index) {
  if (family.empty()) throw PreconditionError("ultraproduct of an empty family");
  if (index >= family.size()) throw PreconditionError("principal index out of range");
  for (const auto& m : family) {
    if (!(*m.signature == *family[0].signature)) {
      throw PreconditionError("ultraproduct family members have different signatures");
    }
  }
  const PrincipalUltrafilter ultra{family.size(), index};
  const FiniteStructure& base = family[index];
  const Signature& sig = *base.signature;
  const std::size_t n = base.size();

  // Element p is the class of the sequence that is p at the principal index
  // and point 0 elsewhere; two sequences are equivalent iff they agree on a
  // set in the ultrafilter, i.e. at the principal index.
  auto sequence = [&](std::size_t p) {
    std::vector<std::size_t> seq(family.size(), 0);
    seq[index] = p;
    return seq;
  };
  auto class_of = [&](const std::vector<std::size_t>& seq) { return seq[ultra.index]; };

  UltraproductResult res;
  res.isomorphism.resize(n);
  std::iota(res.isomorphism.begin(), res.isomorphism.end(), 0);
  FiniteStructure u = make_structure(base.signature, n);
  u.labels = base.labels;

  std::vector<double> coords(family.size());
  for (std::size_t a = 0; a < n; ++a) {
    const auto sa = sequence(a);
    for (std::size_t i = 0; i < family.size(); ++i) coords[i] = family[i].weights[sa[i]];
    u.weights[a] = ultra.limit(coords);
    for (std::size_t b = 0; b < n; ++b) {
      const auto sb = sequence(b);
      for (std::size_t i = 0; i < family.size(); ++i) coords[i] = family[i].distance(sa[i], sb[i]);
      u.dist[a * n + b] = ultra.limit(coords);
    }
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c) {
    std::vector<std::size_t> seq(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) seq[i] = family[i].constants[c];
    u.constants[c] = class_of(seq);
  }
  std::vector<std::size_t> tuple, member;
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    tuple.resize(sig.functions()[f].arity);
    member.resize(tuple.size());
    for (std::size_t t = 0; t < u.functions[f].size(); ++t) {
      u.decode(t, tuple);
      std::vector<std::size_t> seq(family.size());
      for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t k = 0; k < tuple.size(); ++k) member[k] = sequence(tuple[k])[i];
        seq[i] = family[i].function_value(f, member);
      }
      u.functions[f][t] = class_of(seq);
    }
  }
  for (std::size_t r = 1; r < sig.relations().size(); ++r) {
    tuple.resize(sig.relations()[r].arity);
    member.resize(tuple.size());
    for (std::size_t t = 0; t < u.relations[r].size(); ++t) {
      u.decode(t, tuple);
      for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t k = 0; k < tuple.size(); ++k) member[k] = sequence(tuple[k])[i];
        coords[i] = family[i].relation_value(r, member);
      }
      u.relations[r][t] = ultra.limit(coords);
    }
  }
  res.structure = std::move(u);
  return res;
}

double los_discrepancy(std::span<const FiniteStructure> family, std::size_t index,
                       const UltraproductResult& u, std::span<const Formula> formulas,
                       std::size_t cap) {
  const FiniteStructure& base = family[index];
  double worst = 0.0;
  for (const Formula& f : formulas) {
    const Evaluator on_base(f, base);
    const Evaluator on_product(f, u.structure);
    const std::size_t k = f.free_vars().size();
    std::size_t count = 1;
    for (std::size_t v = 0; v < k; ++v) {
      count *= base.size();
      if (count > cap) throw PreconditionError("Los check grid exceeds the size cap");
    }
    std::vector<std::size_t> a(k), image(k);
    for (std::size_t g = 0; g < count; ++g) {
      base.decode(g, a);
      for (std::size_t v = 0; v < k; ++v) image[v] = u.isomorphism[a[v]];
      worst = std::max(worst, std::fabs(on_product(image) - on_base(a)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

void check_substructure(const FiniteStructure& sub, const FiniteStructure& full,
                        std::span<const std::size_t> emb) {
  auto fail = [](const std::string& why) { throw PreconditionError("not a substructure: " + why); };
  if (!(*sub.signature == *full.signature)) fail("signatures differ");
  if (emb.size() != sub.size()) fail("embedding length differs from the point count");
  std::vector<bool> used(full.size(), false);
  for (std::size_t p : emb) {
    if (p >= full.size()) fail("embedding leaves the target");
    if (used[p]) fail("embedding is not injective");
    used[p] = true;
  }
  for (std::size_t a = 0; a < sub.size(); ++a) {
    for (std::size_t b = 0; b < sub.size(); ++b) {
      if (std::fabs(sub.distance(a, b) - full.distance(emb[a], emb[b])) > 1e-12) {
        fail("distances are not preserved");
      }
    }
  }
  const Signature& sig = *sub.signature;
  for (std::size_t c = 0; c < sig.constants().size(); ++c) {
    if (emb[sub.constants[c]] != full.constants[c]) fail("constant '" + sig.constants()[c] + "' moves");
  }
  std::vector<std::size_t> tuple, image;
  auto map_tuple = [&](std::size_t t, std::size_t arity) {
    tuple.resize(arity);
    image.resize(arity);
    sub.decode(t, tuple);
    for (std::size_t k = 0; k < arity; ++k) image[k] = emb[tuple[k]];
  };
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    for (std::size_t t = 0; t < sub.functions[f].size(); ++t) {
      map_tuple(t, sig.functions()[f].arity);
      if (emb[sub.functions[f][t]] != full.function_value(f, image)) {
        fail("function '" + sig.functions()[f].name + "' is not preserved");
      }
    }
  }
  for (std::size_t r = 1; r < sig.relations().size(); ++r) {
    for (std::size_t t = 0; t < sub.relations[r].size(); ++t) {
      map_tuple(t, sig.relations()[r].arity);
      if (std::fabs(sub.relations[r][t] - full.relation_value(r, image)) > 1e-12) {
        fail("relation '" + sig.relations()[r].name + "' is not preserved");
      }
    }
  }
}

}  // namespace

TarskiVaughtReport tarski_vaught_check(const FiniteStructure& sub, const FiniteStructure& full,
                                       std::span<const std::size_t> embedding,
                                       std::span<const Formula> formulas, double eps) {
  check_substructure(sub, full, embedding);
  if (!(eps >= 0.0)) throw PreconditionError("tolerance must be >= 0");
  std::vector<bool> in_sub(full.size(), false);
  for (std::size_t p : embedding) in_sub[p] = true;

  TarskiVaughtReport report;
  for (const Formula& f : formulas) {
    if (f.free_vars().size() > 1) {
      throw PreconditionError("Tarski-Vaught formulas take at most one free variable");
    }
    std::vector<double> values = evaluate_all(f, full);
    if (f.closed()) values.assign(full.size(), values[0]);
    TarskiVaughtEntry e;
    e.formula = print_formula(f);
    e.sup_sub = -std::numeric_limits<double>::infinity();
    e.sup_full = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < full.size(); ++x) {
      e.sup_full = std::max(e.sup_full, values[x]);
      if (values[x] > 0.0) e.measure_full += full.weights[x];
      if (in_sub[x]) {
        e.sup_sub = std::max(e.sup_sub, values[x]);
        if (values[x] > 0.0) e.measure_sub += full.weights[x];
      }
    }
    e.sup_condition = std::fabs(e.sup_full - e.sup_sub) <= eps;
    e.measure_condition = std::fabs(e.measure_full - e.measure_sub) <= eps;
    report.passed = report.passed && e.sup_condition && e.measure_condition;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace cimm
