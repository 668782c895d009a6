#include "cimm/formula.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cimm/error.hpp"

namespace cimm {

namespace {

void append_unique(std::vector<std::string>& out, const std::vector<std::string>& in) {
  for (const auto& v : in) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Term

struct Term::Node {
  Kind kind = Kind::Variable;
  std::string name;
  std::size_t symbol = 0;
  std::vector<Term> args;
  Modulus modulus;
  std::vector<std::string> free_vars;
};

Term::Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Term Term::variable(std::string name) {
  if (!is_identifier(name)) throw SignatureError("invalid variable name '" + name + "'");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->free_vars = {name};
  n->name = std::move(name);
  n->modulus = Modulus::linear(1.0);
  return Term(std::move(n));
}

Term Term::constant(const Signature& sig, const std::string& name) {
  auto idx = sig.find_constant(name);
  if (!idx) throw SignatureError("undeclared constant '" + name + "'");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->name = name;
  n->symbol = *idx;
  n->modulus = Modulus::vacuous();
  return Term(std::move(n));
}

Term Term::apply(const Signature& sig, const std::string& function, std::vector<Term> args) {
  auto idx = sig.find_function(function);
  if (!idx) throw SignatureError("undeclared function '" + function + "'");
  const FunctionSymbol& f = sig.functions()[*idx];
  if (args.size() != f.arity) {
    throw SignatureError("function '" + function + "' expects " + std::to_string(f.arity) +
                         " arguments, got " + std::to_string(args.size()));
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Apply;
  n->name = function;
  n->symbol = *idx;
  std::vector<Modulus> parts;
  parts.reserve(args.size());
  for (const auto& a : args) {
    parts.push_back(Modulus::compose(a.modulus(), f.modulus));
    append_unique(n->free_vars, a.free_vars());
  }
  n->modulus = Modulus::min(std::move(parts));
  n->args = std::move(args);
  return Term(std::move(n));
}

Term::Kind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
std::size_t Term::symbol() const { return node_->symbol; }
const std::vector<Term>& Term::args() const { return node_->args; }
const Modulus& Term::modulus() const { return node_->modulus; }
const std::vector<std::string>& Term::free_vars() const { return node_->free_vars; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  return a.kind() == b.kind() && a.name() == b.name() && a.symbol() == b.symbol() &&
         a.args() == b.args();
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
  Kind kind = Kind::One;
  double scalar = 0.0;
  std::size_t relation = 0;
  std::string relation_name;
  std::vector<Term> args;
  std::string variable;
  std::vector<Formula> children;

  double bound = 1.0;
  Modulus modulus;
  std::vector<std::string> free_vars;
  std::size_t depth = 1;
};

Formula::Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Formula Formula::one() {
  static const Formula shared = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::One;
    n->bound = 1.0;
    n->modulus = Modulus::vacuous();
    return Formula(std::move(n));
  }();
  return shared;
}

Formula Formula::atomic(const Signature& sig, const std::string& relation, std::vector<Term> args) {
  auto idx = sig.find_relation(relation);
  if (!idx) throw SignatureError("undeclared relation '" + relation + "'");
  const RelationSymbol& r = sig.relations()[*idx];
  if (args.size() != r.arity) {
    throw SignatureError("relation '" + relation + "' expects " + std::to_string(r.arity) +
                         " arguments, got " + std::to_string(args.size()));
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atomic;
  n->relation = *idx;
  n->relation_name = relation;
  n->bound = r.bound;
  std::vector<Modulus> parts;
  parts.reserve(args.size());
  for (const auto& t : args) {
    parts.push_back(Modulus::compose(t.modulus(), r.modulus));
    append_unique(n->free_vars, t.free_vars());
  }
  n->modulus = Modulus::min(std::move(parts));
  n->args = std::move(args);
  return Formula(std::move(n));
}

Formula Formula::scale(double r, Formula f) {
  if (!std::isfinite(r)) throw PreconditionError("scale factor must be finite");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scale;
  n->scalar = r;
  n->bound = std::fabs(r) * f.bound();
  n->modulus = r == 0.0 ? Modulus::vacuous() : Modulus::scale_input(1.0 / std::fabs(r), f.modulus());
  n->free_vars = f.free_vars();
  n->depth = f.depth() + 1;
  n->children = {std::move(f)};
  return Formula(std::move(n));
}

namespace {

template <class Node>
void fill_binary(Node& n, const Formula& a, const Formula& b) {
  n.bound = a.bound() + b.bound();
  n.modulus = Modulus::min({Modulus::scale_input(0.5, a.modulus()),
                            Modulus::scale_input(0.5, b.modulus())});
  n.free_vars = a.free_vars();
  append_unique(n.free_vars, b.free_vars());
  n.depth = std::max(a.depth(), b.depth()) + 1;
}

template <class Node>
void fill_quantifier(Node& n, const Formula& body) {
  n.bound = body.bound();
  n.modulus = body.modulus();
  for (const auto& v : body.free_vars()) {
    if (v != n.variable) n.free_vars.push_back(v);
  }
  n.depth = body.depth() + 1;
}

}  // namespace

Formula Formula::sum(Formula a, Formula b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  fill_binary(*n, a, b);
  n->children = {std::move(a), std::move(b)};
  return Formula(std::move(n));
}

Formula Formula::meet(Formula a, Formula b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Meet;
  fill_binary(*n, a, b);
  n->children = {std::move(a), std::move(b)};
  return Formula(std::move(n));
}

Formula Formula::sup(std::string var, Formula body) {
  if (!is_identifier(var)) throw SignatureError("invalid variable name '" + var + "'");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sup;
  n->variable = std::move(var);
  fill_quantifier(*n, body);
  n->children = {std::move(body)};
  return Formula(std::move(n));
}

Formula Formula::integral(std::string var, Formula body) {
  if (!is_identifier(var)) throw SignatureError("invalid variable name '" + var + "'");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Integral;
  n->variable = std::move(var);
  fill_quantifier(*n, body);
  n->children = {std::move(body)};
  return Formula(std::move(n));
}

Formula::Kind Formula::kind() const { return node_->kind; }
double Formula::scalar() const { return node_->scalar; }
std::size_t Formula::relation() const { return node_->relation; }
const std::string& Formula::relation_name() const { return node_->relation_name; }
const std::vector<Term>& Formula::args() const { return node_->args; }
const std::string& Formula::variable() const { return node_->variable; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
double Formula::bound() const { return node_->bound; }
const Modulus& Formula::modulus() const { return node_->modulus; }
const std::vector<std::string>& Formula::free_vars() const { return node_->free_vars; }
std::size_t Formula::depth() const { return node_->depth; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::One:
      return true;
    case Formula::Kind::Atomic:
      return a.relation() == b.relation() && a.relation_name() == b.relation_name() &&
             a.args() == b.args();
    case Formula::Kind::Scale:
      return a.scalar() == b.scalar() && a.children() == b.children();
    case Formula::Kind::Sum:
    case Formula::Kind::Meet:
      return a.children() == b.children();
    case Formula::Kind::Sup:
    case Formula::Kind::Integral:
      return a.variable() == b.variable() && a.children() == b.children();
  }
  return false;
}

double bound_of(const Formula& f) { return f.bound(); }
Modulus modulus_of(const Formula& f) { return f.modulus(); }
std::vector<std::string> free_vars(const Formula& f) { return f.free_vars(); }

Formula negate(Formula f) { return Formula::scale(-1.0, std::move(f)); }

Formula difference(Formula a, Formula b) { return Formula::sum(std::move(a), negate(std::move(b))); }

Formula join(Formula a, Formula b) {
  return negate(Formula::meet(negate(std::move(a)), negate(std::move(b))));
}

Formula absolute(Formula f) {
  Formula neg = negate(f);
  return join(std::move(f), std::move(neg));
}

Formula infimum(std::string var, Formula f) {
  return negate(Formula::sup(std::move(var), negate(std::move(f))));
}

}  // namespace cimm
