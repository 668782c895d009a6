#include "cimm/modulus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include "cimm/error.hpp"

namespace cimm {

struct Modulus::Node {
  Kind kind = Kind::Vacuous;
  double parameter = 0.0;
  std::vector<Modulus> children;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Modulus::Modulus() : Modulus(vacuous()) {}

Modulus::Modulus(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Modulus Modulus::vacuous() {
  static const auto shared = std::make_shared<const Node>();
  return Modulus(shared);
}

Modulus Modulus::linear(double slope) {
  if (!(slope > 0.0) || !std::isfinite(slope)) {
    throw PreconditionError("linear modulus needs a finite slope > 0");
  }
  return Modulus(std::make_shared<const Node>(Node{Kind::Linear, slope, {}}));
}

Modulus Modulus::scale_input(double factor, Modulus inner) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw PreconditionError("scaled modulus needs a finite factor > 0");
  }
  return Modulus(std::make_shared<const Node>(Node{Kind::ScaleInput, factor, {std::move(inner)}}));
}

Modulus Modulus::min(std::vector<Modulus> parts) {
  if (parts.empty()) throw PreconditionError("min of an empty modulus list");
  return Modulus(std::make_shared<const Node>(Node{Kind::Min, 0.0, std::move(parts)}));
}

Modulus Modulus::compose(Modulus outer, Modulus inner) {
  return Modulus(
      std::make_shared<const Node>(Node{Kind::Compose, 0.0, {std::move(outer), std::move(inner)}}));
}

Modulus::Kind Modulus::kind() const { return node_->kind; }
double Modulus::parameter() const { return node_->parameter; }
const std::vector<Modulus>& Modulus::children() const { return node_->children; }

double Modulus::operator()(double eps) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Vacuous:
      return kInf;
    case Kind::Linear:
      return eps / n.parameter;
    case Kind::ScaleInput:
      return n.children[0](n.parameter * eps);
    case Kind::Min: {
      double best = kInf;
      for (const auto& c : n.children) best = std::min(best, c(eps));
      return best;
    }
    case Kind::Compose:
      return n.children[0](n.children[1](eps));
  }
  return kInf;
}

std::optional<double> Modulus::slope() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Vacuous:
      return 0.0;
    case Kind::Linear:
      return n.parameter;
    case Kind::ScaleInput: {
      auto s = n.children[0].slope();
      if (!s) return std::nullopt;
      return *s / n.parameter;
    }
    case Kind::Min: {
      double best = 0.0;
      for (const auto& c : n.children) {
        auto s = c.slope();
        if (!s) return std::nullopt;
        best = std::max(best, *s);
      }
      return best;
    }
    case Kind::Compose: {
      auto outer = n.children[0].slope();
      auto inner = n.children[1].slope();
      if (!outer || !inner) return std::nullopt;
      return *outer * *inner;
    }
  }
  return std::nullopt;
}

std::optional<Modulus> Modulus::normalized() const {
  auto s = slope();
  if (!s) return std::nullopt;
  if (*s == 0.0) return vacuous();
  return linear(*s);
}

std::string Modulus::to_string() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Vacuous:
      return "vacuous";
    case Kind::Linear:
      return "linear(" + format_number(n.parameter) + ")";
    case Kind::ScaleInput:
      return "scale(" + format_number(n.parameter) + ", " + n.children[0].to_string() + ")";
    case Kind::Min: {
      std::string out = "min(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ", ";
        out += n.children[i].to_string();
      }
      return out + ")";
    }
    case Kind::Compose:
      return "compose(" + n.children[0].to_string() + ", " + n.children[1].to_string() + ")";
  }
  return "?";
}

bool operator==(const Modulus& a, const Modulus& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.parameter() != b.parameter()) return false;
  return a.children() == b.children();
}

bool violates_modulus(const Modulus& modulus, double dist, double diff) {
  const double eps = diff - 1e-12;
  if (!(eps > 0.0)) return false;
  return dist < modulus(eps);
}

}  // namespace cimm
