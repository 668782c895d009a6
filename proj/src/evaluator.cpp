#include "cimm/evaluator.hpp"

#include <algorithm>
#include <limits>

#include "cimm/error.hpp"

namespace cimm {

Evaluator::Evaluator(const Formula& f, const FiniteStructure& s)
    : structure_(s), variables_(f.free_vars()) {
  std::vector<std::string> scope = variables_;
  slots_ = scope.size();
  root_ = compile(f, scope);
}

std::size_t Evaluator::compile(const Term& t, const std::vector<std::string>& scope) {
  TermOp op{TermOp::Slot, 0, {}};
  switch (t.kind()) {
    case Term::Kind::Variable: {
      // Innermost binding wins.
      auto it = std::find(scope.rbegin(), scope.rend(), t.name());
      op.index = static_cast<std::size_t>(scope.rend() - it) - 1;
      break;
    }
    case Term::Kind::Constant:
      op.kind = TermOp::Constant;
      op.index = t.symbol();
      break;
    case Term::Kind::Apply:
      op.kind = TermOp::Apply;
      op.index = t.symbol();
      for (const auto& a : t.args()) op.args.push_back(compile(a, scope));
      break;
  }
  terms_.push_back(std::move(op));
  return terms_.size() - 1;
}

std::size_t Evaluator::compile(const Formula& f, std::vector<std::string>& scope) {
  FormulaOp op;
  op.kind = f.kind();
  switch (f.kind()) {
    case Formula::Kind::One:
      break;
    case Formula::Kind::Atomic:
      op.relation = f.relation();
      for (const auto& t : f.args()) op.args.push_back(compile(t, scope));
      break;
    case Formula::Kind::Scale:
      op.scalar = f.scalar();
      op.children.push_back(compile(f.children()[0], scope));
      break;
    case Formula::Kind::Sum:
    case Formula::Kind::Meet:
      op.children.push_back(compile(f.children()[0], scope));
      op.children.push_back(compile(f.children()[1], scope));
      break;
    case Formula::Kind::Sup:
    case Formula::Kind::Integral:
      op.slot = scope.size();
      scope.push_back(f.variable());
      slots_ = std::max(slots_, scope.size());
      op.children.push_back(compile(f.children()[0], scope));
      scope.pop_back();
      break;
  }
  ops_.push_back(std::move(op));
  return ops_.size() - 1;
}

std::size_t Evaluator::term_value(std::size_t index, std::vector<std::size_t>& env) const {
  const TermOp& op = terms_[index];
  switch (op.kind) {
    case TermOp::Slot:
      return env[op.index];
    case TermOp::Constant:
      return structure_.constants[op.index];
    case TermOp::Apply: {
      std::size_t code = 0;
      for (std::size_t a : op.args) code = code * structure_.size() + term_value(a, env);
      return structure_.functions[op.index][code];
    }
  }
  return 0;
}

double Evaluator::eval(std::size_t index, std::vector<std::size_t>& env) const {
  const FormulaOp& op = ops_[index];
  switch (op.kind) {
    case Formula::Kind::One:
      return 1.0;
    case Formula::Kind::Atomic: {
      if (op.relation == Signature::kMetric) {
        return structure_.distance(term_value(op.args[0], env), term_value(op.args[1], env));
      }
      std::size_t code = 0;
      for (std::size_t a : op.args) code = code * structure_.size() + term_value(a, env);
      return structure_.relations[op.relation][code];
    }
    case Formula::Kind::Scale:
      return op.scalar * eval(op.children[0], env);
    case Formula::Kind::Sum:
      return eval(op.children[0], env) + eval(op.children[1], env);
    case Formula::Kind::Meet:
      return std::min(eval(op.children[0], env), eval(op.children[1], env));
    case Formula::Kind::Sup: {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < structure_.size(); ++a) {
        env[op.slot] = a;
        best = std::max(best, eval(op.children[0], env));
      }
      return best;
    }
    case Formula::Kind::Integral: {
      double total = 0.0;
      for (std::size_t a = 0; a < structure_.size(); ++a) {
        env[op.slot] = a;
        total += structure_.weights[a] * eval(op.children[0], env);
      }
      return total;
    }
  }
  return 0.0;
}

double Evaluator::operator()(std::span<const std::size_t> values) const {
  if (values.size() != variables_.size()) {
    throw PreconditionError("assignment has the wrong number of values");
  }
  std::vector<std::size_t> env(std::max<std::size_t>(slots_, 1), 0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] >= structure_.size()) {
      throw PreconditionError("variable '" + variables_[k] + "' assigned outside the structure");
    }
    env[k] = values[k];
  }
  return eval(root_, env);
}

double Evaluator::operator()(const Assignment& a) const {
  std::vector<std::size_t> values;
  values.reserve(variables_.size());
  for (const auto& v : variables_) {
    auto it = a.find(v);
    if (it == a.end()) throw PreconditionError("no value assigned to free variable '" + v + "'");
    values.push_back(it->second);
  }
  return (*this)(values);
}

double evaluate(const Formula& f, const FiniteStructure& s, const Assignment& a) {
  return Evaluator(f, s)(a);
}

namespace {

std::size_t grid_size(const FiniteStructure& s, std::size_t vars, std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t k = 0; k < vars; ++k) {
    if (count > cap / std::max<std::size_t>(s.size(), 1)) {
      throw PreconditionError("assignment grid exceeds the size cap of " + std::to_string(cap));
    }
    count *= s.size();
  }
  return count;
}

}  // namespace

std::vector<double> evaluate_all_serial(const Formula& f, const FiniteStructure& s,
                                        std::size_t cap) {
  const Evaluator eval(f, s);
  const std::size_t k = eval.variables().size();
  std::vector<double> out(grid_size(s, k, cap));
  std::vector<std::size_t> values(k);
  for (std::size_t i = 0; i < out.size(); ++i) {
    s.decode(i, values);
    out[i] = eval(values);
  }
  return out;
}

std::vector<double> evaluate_all(const Formula& f, const FiniteStructure& s, std::size_t cap) {
  const Evaluator eval(f, s);
  const std::size_t k = eval.variables().size();
  std::vector<double> out(grid_size(s, k, cap));
  const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel
  {
    std::vector<std::size_t> values(k);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      s.decode(static_cast<std::size_t>(i), values);
      out[i] = eval(values);
    }
  }
  return out;
}

}  // namespace cimm
