#ifndef MCROUTE_ERRORS_HPP
#define MCROUTE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcroute {

// Where a rate crossed (or met) a capacity pole.
enum class PoleSite { unspecified, path, node };

// Thrown when a delay function is evaluated at or beyond its pole, or at a
// negative rate. Carries the offending site so callers can react
// per-constraint.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string msg, PoleSite site = PoleSite::unspecified,
              int i = -1, int j = -1)
      : std::runtime_error(std::move(msg)), site_(site), i_(i), j_(j) {}

  PoleSite site() const { return site_; }
  int source() const { return i_; }
  int node() const { return j_; }

 private:
  PoleSite site_;
  int i_;
  int j_;
};

// No strictly feasible point exists (or could be constructed). The message
// names the blocking constraint.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(std::string msg)
      : std::runtime_error(std::move(msg)) {}
};

// A source's total path capacity cannot carry its offered rate.
class BestResponseInfeasible : public std::runtime_error {
 public:
  explicit BestResponseInfeasible(std::string msg)
      : std::runtime_error(std::move(msg)) {}
};

// Routing handed to the simulator would make some queue unstable.
class UnstableRouting : public std::runtime_error {
 public:
  explicit UnstableRouting(std::string msg)
      : std::runtime_error(std::move(msg)) {}
};

// Instance too large for the exhaustive search used as ground truth.
class DimensionTooLarge : public std::runtime_error {
 public:
  explicit DimensionTooLarge(std::string msg)
      : std::runtime_error(std::move(msg)) {}
};

// Instance or routing file could not be parsed.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Instance file parsed but violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::string msg)
      : std::runtime_error(std::move(msg)) {}
};

}  // namespace mcroute

#endif  // MCROUTE_ERRORS_HPP
