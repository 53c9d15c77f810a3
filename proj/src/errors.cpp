#include "taurob/errors.hpp"

#include <sstream>

namespace taurob {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream out;
  out << "validation failed";
  for (const auto& issue : issues) out << "; " << issue;
  return out.str();
}

std::string infeasible_message(double lambda, double bound) {
  std::ostringstream out;
  out.precision(17);
  out << "infeasible Lagrange multiplier: lambda = " << lambda
      << " must exceed (1 - tau) * ||P|| = " << bound;
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

InfeasibleMultiplier::InfeasibleMultiplier(double lambda, double bound)
    : Error(infeasible_message(lambda, bound)), lambda_(lambda), bound_(bound) {}

}  // namespace taurob
