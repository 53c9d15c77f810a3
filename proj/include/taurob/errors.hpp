#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace taurob {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input failed one or more model invariants. Every violated invariant is
// listed in issues().
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  explicit ValidationError(const std::string& issue)
      : ValidationError(std::vector<std::string>{issue}) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// A scalar function was applied outside its domain, or a matrix that must be
// positive definite was not.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Lagrange multiplier at or below the (1 - tau) * ||P|| feasibility bound.
class InfeasibleMultiplier : public Error {
 public:
  InfeasibleMultiplier(double lambda, double bound);

  double lambda() const noexcept { return lambda_; }
  double bound() const noexcept { return bound_; }

 private:
  double lambda_;
  double bound_;
};

// The divergence-vs-lambda curve could not be bracketed around the requested
// tolerance.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace taurob
