#ifndef MCROUTE_DELAY_HPP
#define MCROUTE_DELAY_HPP

#include <functional>

#include "mcroute/errors.hpp"

namespace mcroute {

/// Convex increasing delay curve with a finite capacity pole.
///
/// value(x) is finite, strictly increasing and convex on [0, capacity) and
/// diverges as x approaches the capacity. The built-in family is the M/M/1
/// sojourn curve 1/(capacity - x); arbitrary user-supplied curves with the
/// same properties are accepted via custom().
class DelayFunction {
 public:
  enum class Kind { mm1, custom };

  using Curve = std::function<double(double)>;

  static DelayFunction mm1(double capacity);

  // The caller supplies the curve and its first two derivatives; all three
  // must be valid on [0, capacity).
  static DelayFunction custom(double capacity, Curve value, Curve derivative,
                              Curve second_derivative);

  Kind kind() const { return kind_; }
  double capacity() const { return capacity_; }

  // Delay at routed rate x. Throws DomainError outside [0, capacity).
  double value(double x) const;

  // d/dx of the delay. Positive on the domain.
  double derivative(double x) const;

  double second_derivative(double x) const;

  // Marginal cost of one extra unit of rate: d/dx of x*value(x), which is
  // value(x) + x*value'(x). For M/M/1 this is capacity/(capacity - x)^2.
  double marginal_cost(double x) const;

  // d/dx of the marginal cost: 2*value'(x) + x*value''(x).
  double marginal_cost_derivative(double x) const;

  // Unique x in [0, capacity) with marginal_cost(x) == target. Closed form
  // for M/M/1, bisection to 1e-12 absolute on x otherwise. Throws
  // DomainError when target < marginal_cost(0); callers treat that route as
  // unused.
  double inverse_marginal_cost(double target) const;

 private:
  DelayFunction(Kind kind, double capacity)
      : kind_(kind), capacity_(capacity) {}

  void check_domain(double x) const;

  Kind kind_;
  double capacity_;
  Curve value_;
  Curve derivative_;
  Curve second_derivative_;
};

}  // namespace mcroute

#endif  // MCROUTE_DELAY_HPP
