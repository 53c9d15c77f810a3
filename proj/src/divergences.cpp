#include "taurob/divergences.hpp"

#include <cmath>
#include <limits>

#include "taurob/errors.hpp"

namespace taurob::divergence {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename M>
double trace_term_impl(const M& k, double tau) {
  const Vector d = linalg::eigenvalues(k);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) throw DomainError("normalized covariance is not positive definite");
    sum += eigen_term(d(i), tau);
  }
  return sum;
}

// ||dm||^2 in the metric of the inverse nominal covariance, plus the tau = 1
// indicator handling.
double mean_term(const Vector& delta, double actual_norm, const Vector& whitened, double tau) {
  if (tau == 1.0) {
    return delta.norm() > kDiracThreshold * (1.0 + actual_norm) ? kInf : 0.0;
  }
  return mean_weight(tau) * whitened.squaredNorm();
}

}  // namespace

double mean_weight(double tau) {
  require_tau(tau);
  if constexpr (kUnitMeanWeight) return 1.0;
  return tau < 1.0 ? 1.0 / (1.0 - tau) : kInf;
}

double eigen_term_log(double log_k, double tau) {
  require_tau(tau);
  if (std::isnan(log_k)) throw DomainError("eigenvalue of normalized covariance is NaN");
  const double km1 = std::expm1(log_k);
  if (!std::isfinite(km1)) return kInf;
  double value = 0.0;
  if (tau == 0.0) {
    value = km1 - log_k;
  } else if (tau == 1.0) {
    value = std::exp(log_k) * log_k - km1;
  } else {
    value = (std::expm1(tau * log_k) - tau * km1) / (tau * (tau - 1.0));
  }
  if (std::isnan(value)) return kInf;
  return std::max(value, 0.0);
}

double eigen_term(double k, double tau) {
  if (!(k > 0.0)) throw DomainError("eigen_term requires a positive eigenvalue");
  if (std::isinf(k)) return kInf;
  return eigen_term_log(std::log(k), tau);
}

double trace_term(const Matrix& k, double tau) { return trace_term_impl(k, tau); }
double trace_term(const CMatrix& k, double tau) { return trace_term_impl(k, tau); }

double ell_tau(const Vector& m, const Matrix& k, double tau) {
  require_tau(tau);
  if (m.size() != k.rows()) throw ValidationError("ell_tau: mean and covariance sizes differ");
  if (!linalg::is_positive_definite(k)) {
    throw DomainError("ell_tau: K must be positive definite");
  }
  const double mean_part = tau == 1.0 ? (m.norm() > kDiracThreshold ? kInf : 0.0)
                                      : mean_weight(tau) * m.squaredNorm();
  if (std::isinf(mean_part)) return kInf;
  return mean_part + trace_term(k, tau);
}

double normalized_trace_term(const Matrix& actual, const Matrix& nominal_factor, double tau) {
  // K = F^{-1} A F^{-T}
  const auto lu = nominal_factor.partialPivLu();
  const Matrix left = lu.solve(actual);
  const Matrix k = lu.solve(left.transpose()).transpose();
  return trace_term(linalg::symmetrize(k), tau);
}

double normalized_trace_term(const CMatrix& actual, const CMatrix& nominal_factor, double tau) {
  const auto lu = nominal_factor.partialPivLu();
  const CMatrix left = lu.solve(actual);
  const CMatrix k = lu.solve(left.adjoint()).adjoint();
  return trace_term(linalg::symmetrize(k), tau);
}

double tau_divergence(const GaussianPair& pair, double tau) {
  require_tau(tau);
  const Matrix l = linalg::square_root_factor(pair.nominal.cov());
  const Vector delta = pair.actual.mean() - pair.nominal.mean();
  const Vector whitened = l.triangularView<Eigen::Lower>().solve(delta);
  const double mean_part = mean_term(delta, pair.actual.mean().norm(), whitened, tau);
  if (std::isinf(mean_part)) return kInf;
  return mean_part + normalized_trace_term(pair.actual.cov(), l, tau);
}

double tau_divergence(const JointGaussian& actual, const JointGaussian& nominal, double tau) {
  return tau_divergence(GaussianPair(nominal, actual), tau);
}

double spectral_tau_divergence(const SpectralModel& actual, const SpectralModel& nominal,
                               double tau) {
  require_tau(tau);
  if (actual.n() != nominal.n() || actual.p() != nominal.p()) {
    throw ValidationError("actual and nominal spectral models have different dimensions");
  }
  if (actual.grid_size() != nominal.grid_size()) {
    throw ValidationError("actual and nominal spectral models use different grids");
  }
  const Vector delta = actual.mean() - nominal.mean();
  // Sigma_z(0) is real for a real process.
  const Matrix sigma0 = nominal.at(0).real();
  const Matrix l0 = linalg::square_root_factor(sigma0);
  const Vector whitened = l0.triangularView<Eigen::Lower>().solve(delta);
  const double mean_part = mean_term(delta, actual.mean().norm(), whitened, tau);
  if (std::isinf(mean_part)) return kInf;

  double integral = 0.0;
  for (int k = 0; k < nominal.grid_size(); ++k) {
    const CMatrix gamma = linalg::square_root_factor(nominal.at(k));
    integral += normalized_trace_term(actual.at(k), gamma, tau);
  }
  return mean_part + integral / nominal.grid_size();
}

}  // namespace taurob::divergence
