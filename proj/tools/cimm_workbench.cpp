// Command-line front end: JSON in, JSON out.
//
// Exit codes: 0 success, 1 a check failed, 2 unreadable or invalid input.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cimm/approx.hpp"
#include "cimm/evaluator.hpp"
#include "cimm/fuzz.hpp"
#include "cimm/json_io.hpp"
#include "cimm/parser.hpp"
#include "cimm/semantics.hpp"

namespace {

using cimm::io::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

struct Options {
  double eps = 0.0;
  bool eps_given = false;
  std::uint64_t seed = 1;
  std::size_t count = 100;
  std::size_t cap = cimm::kDefaultPowerCap;
  bool allow_pseudo = false;
  std::string out;
  std::string sig;

  std::string structure;
  std::vector<std::string> structures;
  std::string formula;
  std::vector<std::string> assignments;
  std::string theory;
  std::vector<std::string> formulas;
  std::size_t index = 0;
  std::string functional;
  std::string functions;
  std::string isometries;
  std::string tests;
  std::vector<std::string> constants;
  double lipschitz = 1.0;
};

class BadInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const Options& o, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw BadInput("cannot write '" + o.out + "'");
  f << text;
}

cimm::FiniteStructure load_structure(const Options& o, const std::string& path, bool pseudo) {
  std::shared_ptr<const cimm::Signature> sig;
  if (!o.sig.empty()) sig = cimm::io::signature_from_json(cimm::io::read_file(o.sig));
  auto s = cimm::io::structure_from_json(cimm::io::read_file(path), sig);
  const auto report = cimm::validate(s, pseudo ? cimm::MetricKind::Pseudo : cimm::MetricKind::Metric);
  if (!report.ok()) {
    std::cerr << cimm::io::report_to_json(report, s).dump(2) << "\n";
    throw BadInput("'" + path + "' is not a valid structure");
  }
  return s;
}

int cmd_validate(const Options& o) {
  std::shared_ptr<const cimm::Signature> sig;
  if (!o.sig.empty()) sig = cimm::io::signature_from_json(cimm::io::read_file(o.sig));
  const auto s = cimm::io::structure_from_json(cimm::io::read_file(o.structures.at(0)), sig);
  const auto report = cimm::validate(s, o.allow_pseudo ? cimm::MetricKind::Pseudo : cimm::MetricKind::Metric);
  emit(o, cimm::io::report_to_json(report, s));
  return report.ok() ? kOk : kFailed;
}

int cmd_eval(const Options& o) {
  const auto s = load_structure(o, o.structures.at(0), o.allow_pseudo);
  const auto phi = cimm::parse_formula(o.formula, *s.signature);
  cimm::Assignment a;
  for (const auto& item : o.assignments) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw BadInput("assignment '" + item + "' must look like var=point");
    a[item.substr(0, eq)] = cimm::io::point_from_json(json(item.substr(eq + 1)), s);
  }
  json out{{"formula", cimm::print_formula(phi)},
           {"bound", phi.bound()},
           {"modulus", phi.modulus().to_string()},
           {"free_vars", phi.free_vars()}};
  if (const auto slope = phi.modulus().slope()) out["slope"] = *slope;

  bool complete = true;
  for (const auto& v : phi.free_vars()) complete = complete && a.count(v);
  if (complete) {
    out["value"] = cimm::evaluate(phi, s, a);
  } else if (a.empty()) {
    out["values"] = cimm::evaluate_all(phi, s, o.cap);
  } else {
    throw BadInput("assign every free variable, or none to tabulate all assignments");
  }
  emit(o, out);
  return kOk;
}

int cmd_check(const Options& o) {
  const auto s = load_structure(o, o.structures.at(0), o.allow_pseudo);
  const auto theory = cimm::io::theory_from_json(cimm::io::read_file(o.theory), *s.signature, o.eps);
  const auto report = cimm::check_theory(theory, s);
  emit(o, cimm::io::theory_report_to_json(report));
  return report.holds ? kOk : kFailed;
}

int cmd_quotient(const Options& o) {
  const auto p = load_structure(o, o.structures.at(0), true);
  const auto q = cimm::quotient(p);
  emit(o, {{"structure", cimm::io::structure_to_json(q.structure)},
           {"projection", q.projection},
           {"class_weights", q.class_weights}});
  return kOk;
}

int cmd_ultraproduct(const Options& o) {
  std::vector<cimm::FiniteStructure> family;
  for (const auto& path : o.structures) family.push_back(load_structure(o, path, o.allow_pseudo));
  const auto u = cimm::principal_ultraproduct(family, o.index);
  json out{{"index", o.index},
           {"structure", cimm::io::structure_to_json(u.structure)},
           {"isomorphism", u.isomorphism}};
  int code = kOk;
  if (!o.formulas.empty()) {
    std::vector<cimm::Formula> fs;
    for (const auto& text : o.formulas) fs.push_back(cimm::parse_formula(text, *family[0].signature));
    const double gap = cimm::los_discrepancy(family, o.index, u, fs, o.cap);
    out["los_discrepancy"] = gap;
    if (gap != 0.0) code = kFailed;
  }
  emit(o, out);
  return code;
}

int cmd_riesz(const Options& o) {
  const auto s = load_structure(o, o.structures.at(0), o.allow_pseudo);
  const auto I = cimm::io::functional_from_json(cimm::io::read_file(o.functional));
  const auto fs = cimm::io::functions_from_json(cimm::io::read_file(o.functions));
  if (!o.eps_given) throw BadInput("riesz needs --eps");
  const auto r = cimm::riesz_discretize(s, I, fs, o.eps);
  const auto verdict = cimm::verify_riesz(s, I, fs, r, o.eps);
  emit(o, cimm::io::riesz_to_json(r, verdict));
  return verdict.passed() ? kOk : kFailed;
}

int cmd_invariant(const Options& o) {
  const auto s = load_structure(o, o.structures.at(0), false);
  const auto group = cimm::io::isometries_from_json(cimm::io::read_file(o.isometries), s);
  std::vector<cimm::TestFunction> tests;
  if (!o.tests.empty()) tests = cimm::io::test_functions_from_json(cimm::io::read_file(o.tests));
  std::vector<std::size_t> constants;
  for (const auto& c : o.constants) constants.push_back(cimm::io::point_from_json(json(c), s));
  if (!o.eps_given) throw BadInput("invariant needs --eps");
  const auto r = cimm::invariant_measure_approx(s, group, o.eps, o.lipschitz, constants);
  const auto verdict = cimm::verify_invariance(s, r, group, tests, o.eps, o.lipschitz);
  emit(o, cimm::io::invariant_to_json(r, verdict));
  return verdict.passed() ? kOk : kFailed;
}

int cmd_fuzz(const Options& o) {
  const auto suites = cimm::fuzz::run_all(o.seed, o.count);
  const json report = cimm::io::suites_to_json(suites, o.seed, o.count);
  emit(o, report);
  return report.at("passed").get<bool>() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Continuous integration logic over finite metric-measure structures"};
  app.require_subcommand(1);
  app.add_option("--out", o.out, "Write the JSON report to this file instead of stdout");
  app.add_option("--sig", o.sig, "Signature file (overrides a signature embedded in the structure)");
  app.add_option("--eps", o.eps, "Tolerance")->each([&](const std::string&) { o.eps_given = true; });
  app.add_option("--cap", o.cap, "Largest assignment grid or power size")->envname("CIMM_CAP");
  app.add_flag("--allow-pseudo", o.allow_pseudo, "Accept pseudometrics (distance 0 between distinct points)");
  app.add_option("--seed", o.seed, "Seed for fuzz runs");
  app.fallthrough();

  auto* validate = app.add_subcommand("validate", "Check the structure axioms");
  validate->add_option("structure", o.structure, "Structure file")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a formula");
  eval->add_option("structure", o.structure, "Structure file")->required();
  eval->add_option("formula", o.formula, "Formula text")->required();
  eval->add_option("--assign,-a", o.assignments, "var=point (label or index)");

  auto* check = app.add_subcommand("check", "Check a theory against a structure");
  check->add_option("structure", o.structure, "Structure file")->required();
  check->add_option("theory", o.theory, "Theory file")->required();

  auto* quotient = app.add_subcommand("quotient", "Identify points at distance 0");
  quotient->add_option("structure", o.structure, "Structure file")->required();

  auto* ultra = app.add_subcommand("ultraproduct", "Ultraproduct along a principal ultrafilter");
  ultra->add_option("structures", o.structures, "Structure files")->required();
  ultra->add_option("--index,-j", o.index, "Principal index")->required();
  ultra->add_option("--formula,-f", o.formulas, "Formulas for the Los check");

  auto* riesz = app.add_subcommand("riesz", "Discretise a positive functional");
  riesz->add_option("structure", o.structure, "Structure file")->required();
  riesz->add_option("functional", o.functional, "Functional file {weights}")->required();
  riesz->add_option("functions", o.functions, "Function tables file")->required();

  auto* invariant = app.add_subcommand("invariant", "Approximately invariant measure for isometries");
  invariant->add_option("structure", o.structure, "Structure file")->required();
  invariant->add_option("isometries", o.isometries, "Isometries file")->required();
  invariant->add_option("--tests", o.tests, "Test functions file");
  invariant->add_option("--lipschitz,-L", o.lipschitz, "Largest test function slope");
  invariant->add_option("--constant", o.constants, "Designated constant point");

  auto* fuzz = app.add_subcommand("fuzz", "Run the property suites");
  fuzz->add_option("--count,-n", o.count, "Cases per suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  if (!o.structure.empty()) o.structures = {o.structure};
  try {
    if (*validate) return cmd_validate(o);
    if (*eval) return cmd_eval(o);
    if (*check) return cmd_check(o);
    if (*quotient) return cmd_quotient(o);
    if (*ultra) return cmd_ultraproduct(o);
    if (*riesz) return cmd_riesz(o);
    if (*invariant) return cmd_invariant(o);
    if (*fuzz) return cmd_fuzz(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
