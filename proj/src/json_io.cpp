#include "cimm/json_io.hpp"

#include <cmath>
#include <fstream>

#include "cimm/parser.hpp"

namespace cimm::io {

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string(what) + " must be a number");
  return j.get<double>();
}

std::size_t count(const json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw FormatError(std::string(what) + " must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::string text(const json& j, const char* what) {
  if (!j.is_string()) throw FormatError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

}  // namespace

Modulus modulus_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "vacuous") return Modulus::vacuous();
  if (j.is_object() && j.size() == 1 && j.contains("linear")) {
    const double s = number(j.at("linear"), "linear slope");
    if (!(s > 0.0) || !std::isfinite(s)) throw FormatError("linear slope must be > 0");
    return Modulus::linear(s);
  }
  throw FormatError("modulus must be {\"linear\": s} or \"vacuous\"");
}

json modulus_to_json(const Modulus& m) {
  const auto slope = m.slope();
  if (!slope) return m.to_string();
  if (*slope == 0.0) return "vacuous";
  return json{{"linear", *slope}};
}

std::shared_ptr<const Signature> signature_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("signature must be an object");
  auto sig = std::make_shared<Signature>();
  try {
    if (j.contains("constants")) {
      for (const auto& c : j.at("constants")) sig->add_constant(text(c, "constant name"));
    }
    if (j.contains("functions")) {
      for (const auto& f : j.at("functions")) {
        sig->add_function(text(require(f, "name"), "function name"), count(require(f, "arity"), "arity"),
                          f.contains("modulus") ? modulus_from_json(f.at("modulus")) : Modulus::vacuous());
      }
    }
    if (j.contains("relations")) {
      for (const auto& r : j.at("relations")) {
        sig->add_relation(text(require(r, "name"), "relation name"), count(require(r, "arity"), "arity"),
                          number(require(r, "bound"), "bound"),
                          r.contains("modulus") ? modulus_from_json(r.at("modulus")) : Modulus::vacuous());
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed signature: ") + e.what());
  }
  return sig;
}

json signature_to_json(const Signature& sig) {
  json out{{"constants", sig.constants()}, {"functions", json::array()}, {"relations", json::array()}};
  for (const auto& f : sig.functions()) {
    out["functions"].push_back({{"name", f.name}, {"arity", f.arity}, {"modulus", modulus_to_json(f.modulus)}});
  }
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    if (r == Signature::kMetric) continue;
    const auto& rel = sig.relations()[r];
    out["relations"].push_back({{"name", rel.name},
                                {"arity", rel.arity},
                                {"bound", rel.bound},
                                {"modulus", modulus_to_json(rel.modulus)}});
  }
  return out;
}

std::size_t point_from_json(const json& j, const FiniteStructure& s) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    for (std::size_t p = 0; p < s.size(); ++p) {
      if (s.labels[p] == name) return p;
    }
    throw FormatError("unknown point '" + name + "'");
  }
  const std::size_t p = count(j, "point index");
  if (p >= s.size()) throw FormatError("point index " + std::to_string(p) + " out of range");
  return p;
}

FiniteStructure structure_from_json(const json& j, std::shared_ptr<const Signature> sig) {
  if (!j.is_object()) throw FormatError("structure must be an object");
  if (!sig) sig = j.contains("signature") ? signature_from_json(j.at("signature")) : std::make_shared<const Signature>();
  try {
    const json& pts = require(j, "points");
    const std::size_t n = pts.is_array() ? pts.size() : count(pts, "points");
    FiniteStructure s = make_structure(sig, n);
    if (pts.is_array()) {
      for (std::size_t p = 0; p < n; ++p) s.labels[p] = text(pts[p], "point label");
    }

    // Shapes are taken as given; validate() reports mismatches.
    const json& d = require(j, "dist");
    if (!d.is_array()) throw FormatError("dist must be an array");
    s.dist.clear();
    if (!d.empty() && d.front().is_array()) {
      bool ragged = d.size() != n;
      for (const auto& row : d) {
        for (double v : numbers(row, "distance")) s.dist.push_back(v);
        ragged = ragged || row.size() != n;
      }
      if (ragged) s.dist.assign(n * n + 1, 0.0);
    } else {
      s.dist = numbers(d, "distance");
    }
    s.weights = numbers(require(j, "weights"), "weight");

    const json constants = j.value("constants", json::object());
    for (auto it = constants.begin(); it != constants.end(); ++it) {
      const auto c = sig->find_constant(it.key());
      if (!c) throw FormatError("undeclared constant '" + it.key() + "'");
      s.constants[*c] = point_from_json(it.value(), s);
    }
    for (std::size_t c = 0; c < sig->constants().size(); ++c) {
      if (!constants.contains(sig->constants()[c])) {
        throw FormatError("constant '" + sig->constants()[c] + "' has no interpretation");
      }
    }

    const json functions = j.value("functions", json::object());
    for (auto it = functions.begin(); it != functions.end(); ++it) {
      const auto f = sig->find_function(it.key());
      if (!f) throw FormatError("undeclared function '" + it.key() + "'");
      if (!it.value().is_array()) throw FormatError("function table must be an array");
      s.functions[*f].clear();
      for (const auto& v : it.value()) s.functions[*f].push_back(point_from_json(v, s));
    }
    for (const auto& fn : sig->functions()) {
      if (!functions.contains(fn.name)) throw FormatError("function '" + fn.name + "' has no table");
    }

    const json relations = j.value("relations", json::object());
    for (auto it = relations.begin(); it != relations.end(); ++it) {
      const auto r = sig->find_relation(it.key());
      if (!r || *r == Signature::kMetric) throw FormatError("undeclared relation '" + it.key() + "'");
      s.relations[*r] = numbers(it.value(), "relation value");
    }
    for (std::size_t r = 0; r < sig->relations().size(); ++r) {
      if (r != Signature::kMetric && !relations.contains(sig->relations()[r].name)) {
        throw FormatError("relation '" + sig->relations()[r].name + "' has no table");
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed structure: ") + e.what());
  }
}

json structure_to_json(const FiniteStructure& s) {
  const auto& sig = *s.signature;
  const std::size_t n = s.size();
  json dist = json::array();
  for (std::size_t a = 0; a < n; ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < n; ++b) row.push_back(s.distance(a, b));
    dist.push_back(std::move(row));
  }
  json out{{"signature", signature_to_json(sig)},
           {"points", s.labels},
           {"dist", std::move(dist)},
           {"weights", s.weights},
           {"constants", json::object()},
           {"functions", json::object()},
           {"relations", json::object()}};
  for (std::size_t c = 0; c < sig.constants().size(); ++c) out["constants"][sig.constants()[c]] = s.labels[s.constants[c]];
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    json table = json::array();
    for (std::size_t p : s.functions[f]) table.push_back(s.labels[p]);
    out["functions"][sig.functions()[f].name] = std::move(table);
  }
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    if (r != Signature::kMetric) out["relations"][sig.relations()[r].name] = s.relations[r];
  }
  return out;
}

json report_to_json(const ValidationReport& r, const FiniteStructure& s) {
  json list = json::array();
  for (const auto& v : r.violations) {
    json witness = json::array();
    for (const auto& tuple : v.witness) {
      json t = json::array();
      for (std::size_t p : tuple) t.push_back(p < s.size() ? json(s.labels[p]) : json(p));
      witness.push_back(std::move(t));
    }
    list.push_back({{"axiom", axiom_name(v.axiom)},
                    {"symbol", v.symbol},
                    {"witness", std::move(witness)},
                    {"quantity", v.quantity},
                    {"detail", v.detail}});
  }
  return {{"ok", r.ok()}, {"violations", std::move(list)}};
}

Theory theory_from_json(const json& j, const Signature& sig, double default_eps) {
  Theory t;
  t.eps = default_eps;
  const json* list = &j;
  if (j.is_object()) {
    if (j.contains("eps")) t.eps = number(j.at("eps"), "eps");
    list = &require(j, "statements");
  }
  if (!list->is_array()) throw FormatError("theory must be a list of statements");
  for (const auto& item : *list) {
    Statement st;
    const auto kind = text(require(item, "kind"), "kind");
    if (kind == "eq") {
      st.kind = Statement::Kind::Equal;
    } else if (kind == "le") {
      st.kind = Statement::Kind::LessEq;
    } else {
      throw FormatError("statement kind must be \"eq\" or \"le\"");
    }
    st.left = parse_formula(text(require(item, "left"), "left"), sig);
    st.right = parse_formula(text(require(item, "right"), "right"), sig);
    if (item.contains("eps")) st.eps = number(item.at("eps"), "eps");
    t.statements.push_back(std::move(st));
  }
  return t;
}

json theory_report_to_json(const TheoryReport& r) {
  json results = json::array();
  for (const auto& s : r.results) {
    results.push_back({{"statement", s.statement},
                       {"eps", s.eps},
                       {"value_left", s.verdict.left},
                       {"value_right", s.verdict.right},
                       {"gap", s.verdict.gap},
                       {"holds", s.verdict.holds}});
  }
  return {{"results", std::move(results)}, {"worst_gap", r.worst_gap}, {"holds", r.holds}};
}

Functional functional_from_json(const json& j) {
  return Functional{numbers(require(j, "weights"), "functional weight")};
}

std::vector<std::vector<double>> functions_from_json(const json& j) {
  const json& list = j.is_object() ? require(j, "functions") : j;
  if (!list.is_array()) throw FormatError("functions must be a list of tables");
  std::vector<std::vector<double>> out;
  for (const auto& f : list) out.push_back(numbers(f, "function value"));
  return out;
}

std::vector<Isometry> isometries_from_json(const json& j, const FiniteStructure& s) {
  const json& list = j.is_object() ? require(j, "isometries") : j;
  if (!list.is_array()) throw FormatError("isometries must be a list");
  std::vector<Isometry> out;
  for (const auto& item : list) {
    const json& perm = item.is_object() ? require(item, "permutation") : item;
    if (!perm.is_array()) throw FormatError("permutation must be an array");
    Isometry alpha;
    for (const auto& p : perm) alpha.push_back(point_from_json(p, s));
    out.push_back(std::move(alpha));
  }
  return out;
}

std::vector<TestFunction> test_functions_from_json(const json& j) {
  const json& list = j.is_object() ? require(j, "tests") : j;
  if (!list.is_array()) throw FormatError("test functions must be a list");
  std::vector<TestFunction> out;
  for (const auto& item : list) {
    out.push_back({numbers(require(item, "values"), "test function value"),
                   number(require(item, "lipschitz"), "lipschitz")});
  }
  return out;
}

json verify_to_json(const VerifyReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"detail", c.detail}});
  }
  return {{"passed", r.passed()}, {"checks", std::move(checks)}};
}

json riesz_to_json(const RieszResult& r, const VerifyReport& verdict) {
  return {{"atoms", r.algebra.atoms},
          {"endpoints", r.algebra.endpoints},
          {"shift", r.algebra.shift},
          {"xi", r.algebra.coefficients},
          {"targets", r.targets},
          {"lambda_raw", r.raw.weights},
          {"eps_cert_raw", r.raw.eps_cert},
          {"lambda", r.measure.weights},
          {"eps_cert", r.measure.eps_cert},
          {"mass_defect", r.mass_defect},
          {"verify", verify_to_json(verdict)}};
}

json invariant_to_json(const InvariantResult& r, const InvarianceReport& verdict) {
  json matchings = json::array();
  for (const auto& m : r.matchings) {
    matchings.push_back({{"feasible", m.feasible},
                         {"permutation", m.permutation},
                         {"distances", m.distances},
                         {"hall_witness", m.hall_witness}});
  }
  json gaps = json::array();
  for (const auto& g : verdict.gaps) gaps.push_back({{"isometry", g.isometry}, {"function", g.function}, {"gap", g.gap}});
  json out{{"delta", r.delta},
           {"retries", r.retries},
           {"exact_regime", r.exact_regime},
           {"first_stage", r.cover.first_stage},
           {"centers", r.cover.centers},
           {"nu", r.nu.weights},
           {"eps_cert", r.nu.eps_cert},
           {"matchings", std::move(matchings)},
           {"gaps", std::move(gaps)},
           {"verify", verify_to_json(verdict.report)}};
  out["tv_to_uniform"] = verdict.tv_to_uniform ? json(*verdict.tv_to_uniform) : json(nullptr);
  return out;
}

json suites_to_json(const std::vector<fuzz::SuiteResult>& suites, std::uint64_t seed, std::size_t count) {
  json list = json::array();
  bool passed = true;
  for (const auto& s : suites) {
    list.push_back({{"suite", s.name},
                    {"cases", s.cases},
                    {"failures", s.failures},
                    {"worst", s.worst},
                    {"first_failure", s.first_failure}});
    passed = passed && s.failures == 0;
  }
  return {{"seed", seed}, {"count", count}, {"passed", passed}, {"suites", std::move(list)}};
}

}  // namespace cimm::io
