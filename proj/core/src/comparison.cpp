#include "fsclf/comparison.hpp"

#include <cmath>
#include <utility>

#include "fsclf/errors.hpp"

namespace fsclf {

struct ComparisonFunction::Node {
  enum class Kind { kLinear, kPowerMax, kCompose };
  Kind kind;
  double c = 0.0;
  double q = 0.0, a = 0.0, b = 0.0;
  std::shared_ptr<const Node> outer;
  std::shared_ptr<const Node> inner;

  double eval(double r) const {
    switch (kind) {
      case Kind::kLinear:
        return c * r;
      case Kind::kPowerMax:
        return q * std::max(std::pow(r, a), std::pow(r, b));
      case Kind::kCompose:
        return outer->eval(inner->eval(r));
    }
    return 0.0;
  }
};

ComparisonFunction::ComparisonFunction(std::shared_ptr<const Node> node)
    : node_(std::move(node)) {}

ComparisonFunction ComparisonFunction::linear(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw ValidationError("comparison linear gain must be finite and >= 0");
  }
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kLinear;
  n->c = c;
  return ComparisonFunction(std::move(n));
}

ComparisonFunction ComparisonFunction::power_max(double q, double a,
                                                 double b) {
  if (!(q > 0.0 && a > 0.0 && b > 0.0) || !std::isfinite(q) ||
      !std::isfinite(a) || !std::isfinite(b)) {
    throw ValidationError("power_max parameters must be finite and > 0");
  }
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kPowerMax;
  n->q = q;
  n->a = a;
  n->b = b;
  return ComparisonFunction(std::move(n));
}

ComparisonFunction ComparisonFunction::compose(ComparisonFunction outer,
                                               ComparisonFunction inner) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kCompose;
  n->outer = std::move(outer.node_);
  n->inner = std::move(inner.node_);
  return ComparisonFunction(std::move(n));
}

ComparisonFunction ComparisonFunction::identity() { return linear(1.0); }

double ComparisonFunction::eval(double r) const {
  if (!(r >= 0.0)) {
    throw ValidationError("comparison functions are defined for r >= 0");
  }
  if (r == 0.0) return 0.0;  // exact zero at zero, pow(0,a) included
  return node_->eval(r);
}

bool ComparisonFunction::is_contraction() const {
  for (int e = -9; e <= 9; ++e) {
    for (double m : {1.0, 2.0, 5.0}) {
      const double s = m * std::pow(10.0, e);
      if (!(eval(s) < s)) return false;
    }
  }
  return true;
}

}  // namespace fsclf
