#include "mcroute/delay.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace mcroute {

DelayFunction DelayFunction::mm1(double capacity) {
  if (!(capacity > 0.0))
    throw ValidationError("delay function capacity must be positive, got " +
                          std::to_string(capacity));
  return DelayFunction(Kind::mm1, capacity);
}

DelayFunction DelayFunction::custom(double capacity, Curve value,
                                    Curve derivative,
                                    Curve second_derivative) {
  if (!(capacity > 0.0))
    throw ValidationError("delay function capacity must be positive, got " +
                          std::to_string(capacity));
  DelayFunction f(Kind::custom, capacity);
  f.value_ = std::move(value);
  f.derivative_ = std::move(derivative);
  f.second_derivative_ = std::move(second_derivative);
  return f;
}

void DelayFunction::check_domain(double x) const {
  if (!(x >= 0.0))
    throw DomainError("rate " + std::to_string(x) + " is negative");
  if (!(x < capacity_))
    throw DomainError("rate " + std::to_string(x) +
                      " meets or exceeds capacity " +
                      std::to_string(capacity_));
}

double DelayFunction::value(double x) const {
  check_domain(x);
  if (kind_ == Kind::mm1) return 1.0 / (capacity_ - x);
  return value_(x);
}

double DelayFunction::derivative(double x) const {
  check_domain(x);
  if (kind_ == Kind::mm1) {
    const double gap = capacity_ - x;
    return 1.0 / (gap * gap);
  }
  return derivative_(x);
}

double DelayFunction::second_derivative(double x) const {
  check_domain(x);
  if (kind_ == Kind::mm1) {
    const double gap = capacity_ - x;
    return 2.0 / (gap * gap * gap);
  }
  return second_derivative_(x);
}

double DelayFunction::marginal_cost(double x) const {
  check_domain(x);
  if (kind_ == Kind::mm1) {
    const double gap = capacity_ - x;
    return capacity_ / (gap * gap);
  }
  return value_(x) + x * derivative_(x);
}

double DelayFunction::marginal_cost_derivative(double x) const {
  check_domain(x);
  if (kind_ == Kind::mm1) {
    const double gap = capacity_ - x;
    return 2.0 * capacity_ / (gap * gap * gap);
  }
  return 2.0 * derivative_(x) + x * second_derivative_(x);
}

double DelayFunction::inverse_marginal_cost(double target) const {
  const double at_zero = marginal_cost(0.0);
  if (target < at_zero)
    throw DomainError("marginal-cost target " + std::to_string(target) +
                      " lies below the zero-load cost " +
                      std::to_string(at_zero));
  if (kind_ == Kind::mm1) {
    const double x = capacity_ - std::sqrt(capacity_ / target);
    return x < 0.0 ? 0.0 : x;
  }

  // Bisection on [0, hi). marginal_cost is strictly increasing and diverges
  // at the capacity, so a bracketing hi always exists.
  double lo = 0.0;
  double hi = capacity_ * 0.5;
  while (marginal_cost(hi) < target) {
    hi = 0.5 * (hi + capacity_);
    if (capacity_ - hi < 1e-15 * capacity_) break;
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (marginal_cost(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace mcroute
