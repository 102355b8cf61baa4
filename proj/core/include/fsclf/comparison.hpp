#pragma once

#include <memory>

namespace fsclf {

/// Parametric class-K comparison function used for decay maps, sandwich
/// bounds, and growth coefficients. Supported forms are a linear gain c*r,
/// a power-max form q*max(r^a, r^b), and compositions of those. Instances
/// are immutable and validated on construction.
class ComparisonFunction {
 public:
  /// c*r with c >= 0. A coefficient below 1 makes the function a contraction.
  static ComparisonFunction linear(double c);

  /// q*max(r^a, r^b) with q, a, b > 0.
  static ComparisonFunction power_max(double q, double a, double b);

  /// outer(inner(r)).
  static ComparisonFunction compose(ComparisonFunction outer,
                                    ComparisonFunction inner);

  /// The identity map r -> r.
  static ComparisonFunction identity();

  double eval(double r) const;
  double operator()(double r) const { return eval(r); }

  /// Sampled check that f(s) < s for s > 0 over a wide logarithmic grid.
  bool is_contraction() const;

 private:
  struct Node;
  explicit ComparisonFunction(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

}  // namespace fsclf
