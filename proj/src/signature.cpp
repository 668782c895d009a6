#include "cimm/signature.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "cimm/error.hpp"

namespace cimm {

namespace {

template <class Range, class Proj>
std::optional<std::size_t> find_by_name(const Range& r, std::string_view name, Proj proj) {
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (proj(r[i]) == name) return i;
  }
  return std::nullopt;
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return s != "sup" && s != "inf" && s != "int";
}

Signature::Signature() {
  relations_.push_back({std::string(kMetricName), 2, 1.0, Modulus::linear(1.0)});
}

void Signature::check_new_name(const std::string& name) const {
  if (!is_identifier(name)) throw SignatureError("invalid symbol name '" + name + "'");
  if (declares(name)) throw SignatureError("symbol '" + name + "' declared twice");
}

std::size_t Signature::add_constant(std::string name) {
  check_new_name(name);
  constants_.push_back(std::move(name));
  return constants_.size() - 1;
}

std::size_t Signature::add_function(std::string name, std::size_t arity, Modulus modulus) {
  check_new_name(name);
  if (arity < 1) throw SignatureError("function '" + name + "' needs arity >= 1");
  functions_.push_back({std::move(name), arity, std::move(modulus)});
  return functions_.size() - 1;
}

std::size_t Signature::add_relation(std::string name, std::size_t arity, double bound,
                                    Modulus modulus) {
  check_new_name(name);
  if (arity < 1) throw SignatureError("relation '" + name + "' needs arity >= 1");
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    throw SignatureError("relation '" + name + "' needs a finite bound >= 0");
  }
  relations_.push_back({std::move(name), arity, bound, std::move(modulus)});
  return relations_.size() - 1;
}

std::optional<std::size_t> Signature::find_constant(std::string_view name) const {
  return find_by_name(constants_, name, [](const std::string& s) -> const std::string& { return s; });
}

std::optional<std::size_t> Signature::find_function(std::string_view name) const {
  return find_by_name(functions_, name, [](const FunctionSymbol& f) -> const std::string& { return f.name; });
}

std::optional<std::size_t> Signature::find_relation(std::string_view name) const {
  return find_by_name(relations_, name, [](const RelationSymbol& r) -> const std::string& { return r.name; });
}

bool Signature::declares(std::string_view name) const {
  return find_constant(name) || find_function(name) || find_relation(name);
}

bool operator==(const FunctionSymbol& a, const FunctionSymbol& b) {
  return a.name == b.name && a.arity == b.arity && a.modulus == b.modulus;
}

bool operator==(const RelationSymbol& a, const RelationSymbol& b) {
  return a.name == b.name && a.arity == b.arity && a.bound == b.bound && a.modulus == b.modulus;
}

bool operator==(const Signature& a, const Signature& b) {
  return a.constants_ == b.constants_ && a.functions_ == b.functions_ &&
         a.relations_ == b.relations_;
}

}  // namespace cimm
