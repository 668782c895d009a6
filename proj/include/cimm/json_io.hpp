#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cimm/approx.hpp"
#include "cimm/fuzz.hpp"
#include "cimm/semantics.hpp"
#include "cimm/statement.hpp"
#include "cimm/structure.hpp"

namespace cimm::io {

using nlohmann::json;

// Malformed document content (wrong types, unknown labels, missing keys).
class FormatError : public Error {
 public:
  using Error::Error;
};

json read_file(const std::string& path);

// {"linear": s} or "vacuous".
Modulus modulus_from_json(const json& j);
json modulus_to_json(const Modulus& m);

// {constants: [...], functions: [{name, arity, modulus}],
//  relations: [{name, arity, bound, modulus}]}. rho is implicit.
std::shared_ptr<const Signature> signature_from_json(const json& j);
json signature_to_json(const Signature& sig);

// {points: [labels] | N, dist: [[...]] | [...], weights: [...],
//  constants: {name: point}, functions: {name: [point...]},
//  relations: {name: [value...]}}. A point is a label or an index.
// Uses `sig` when given, otherwise the document's "signature" key, otherwise
// the empty signature.
FiniteStructure structure_from_json(const json& j, std::shared_ptr<const Signature> sig = nullptr);
json structure_to_json(const FiniteStructure& s);

json report_to_json(const ValidationReport& r, const FiniteStructure& s);

// A list of {kind: "eq" | "le", left, right, eps?}, or {eps?, statements: [...]}.
Theory theory_from_json(const json& j, const Signature& sig, double default_eps);
json theory_report_to_json(const TheoryReport& r);

Functional functional_from_json(const json& j);
// A list of tables, or {functions: [...]}.
std::vector<std::vector<double>> functions_from_json(const json& j);
// A list of {permutation: [...]} or bare arrays; entries are points.
std::vector<Isometry> isometries_from_json(const json& j, const FiniteStructure& s);
std::vector<TestFunction> test_functions_from_json(const json& j);

std::size_t point_from_json(const json& j, const FiniteStructure& s);

json verify_to_json(const VerifyReport& r);
json riesz_to_json(const RieszResult& r, const VerifyReport& verdict);
json invariant_to_json(const InvariantResult& r, const InvarianceReport& verdict);
json suites_to_json(const std::vector<fuzz::SuiteResult>& suites, std::uint64_t seed, std::size_t count);

}  // namespace cimm::io
