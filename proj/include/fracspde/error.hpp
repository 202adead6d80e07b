#pragma once

#include <stdexcept>
#include <string>
#include <cstdint>

namespace fracspde {

/// A precondition on an operation's inputs was violated.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its tolerance. Carries the best estimate
/// it had when it gave up.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best_(best_estimate), err_(error_estimate) {}
  double best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return err_; }

 private:
  double best_;
  double err_;
};

/// The discretisation cannot represent the requested quantity (kernel narrower
/// than the grid, or wider than the periodic box).
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated path produced a non-finite value.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time, std::int64_t step, std::uint64_t seed)
      : std::runtime_error(what), time_(time), step_(step), seed_(seed) {}
  double time() const noexcept { return time_; }
  std::int64_t step() const noexcept { return step_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  double time_;
  std::int64_t step_;
  std::uint64_t seed_;
};

}  // namespace fracspde
