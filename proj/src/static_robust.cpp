#include "taurob/static_robust.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "taurob/bisection.hpp"
#include "taurob/divergences.hpp"
#include "taurob/errors.hpp"

namespace taurob::robust {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_feasible(double lambda, double bound) {
  if (!(lambda > bound)) throw InfeasibleMultiplier(lambda, bound);
}

Matrix y_inverse(const RealBlocks& b) {
  Eigen::LLT<Matrix> llt(b.y);
  if (llt.info() != Eigen::Success || !linalg::is_positive_definite(b.y)) {
    throw DomainError("observation covariance K_y is numerically singular");
  }
  return llt.solve(Matrix::Identity(b.y.rows(), b.y.cols()));
}

// Scalar function x -> (1 - (1 - tau) x / lambda)^{1/(tau - 1)}, or
// exp(x / lambda) at tau = 1.
linalg::ScalarFunction inflation(double lambda, double tau) {
  return [lambda, tau](double x) { return std::exp(log_inflation(lambda, x, tau)); };
}

}  // namespace

AffineEstimator bayes_estimator(const JointGaussian& model) {
  const RealBlocks b = model.blocks();
  const Matrix gain = b.xy * y_inverse(b);
  return {gain, model.mean_x() - gain * model.mean_y()};
}

Matrix nominal_error_cov(const JointGaussian& model) {
  const RealBlocks b = model.blocks();
  return linalg::symmetrize(b.x - b.xy * y_inverse(b) * b.yx);
}

double mean_square_error(const JointGaussian& law, const AffineEstimator& g) {
  if (g.gain.rows() != law.n() || g.gain.cols() != law.p() || g.offset.size() != law.n()) {
    throw ValidationError("estimator dimensions do not match the model");
  }
  Matrix selector(law.n(), law.dim());
  selector << Matrix::Identity(law.n(), law.n()), -g.gain;
  const Vector bias = selector * law.mean() - g.offset;
  return bias.squaredNorm() + (selector * law.cov() * selector.transpose()).trace();
}

double feasibility_bound(const Vector& eigenvalues, double tau) {
  require_tau(tau);
  return (1.0 - tau) * eigenvalues.cwiseAbs().maxCoeff();
}

double feasibility_bound(const Matrix& p, double tau) {
  return feasibility_bound(linalg::eigenvalues(p), tau);
}

double log_inflation(double lambda, double d, double tau) {
  if (tau == 1.0) return d / lambda;
  const double arg = -(1.0 - tau) * d / lambda;
  if (arg <= -1.0) return kInf;
  return std::log1p(arg) / (tau - 1.0);
}

double gamma(double lambda, double d, double tau) {
  return divergence::eigen_term_log(log_inflation(lambda, d, tau), tau);
}

Matrix lf_error_cov_from_factor(const Matrix& factor, double lambda, double tau) {
  const Matrix gram = linalg::symmetrize(factor.transpose() * factor);
  require_feasible(lambda, feasibility_bound(gram, tau));
  const Matrix middle = linalg::apply_spectral_function(gram, inflation(lambda, tau));
  return linalg::symmetrize(factor * middle * factor.transpose());
}

Matrix lf_error_cov(const Matrix& p, double lambda, double tau) {
  require_tau(tau);
  return lf_error_cov_from_factor(linalg::square_root_factor(p), lambda, tau);
}

double divergence_at_lambda(const Vector& eigenvalues, double lambda, double tau) {
  require_feasible(lambda, feasibility_bound(eigenvalues, tau));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) sum += gamma(lambda, eigenvalues(i), tau);
  return sum;
}

double divergence_at_lambda(const Matrix& p, double lambda, double tau) {
  return divergence_at_lambda(linalg::eigenvalues(p), lambda, tau);
}

double delta_mse_at_lambda(const Vector& eigenvalues, double lambda, double tau) {
  require_feasible(lambda, feasibility_bound(eigenvalues, tau));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    sum += eigenvalues(i) * std::expm1(log_inflation(lambda, eigenvalues(i), tau));
  }
  return sum;
}

double solve_lambda(const Matrix& p, double c, double tau, double rel_tol) {
  require_tau(tau);
  if (!(c > 0.0)) throw ValidationError("solve_lambda requires c > 0");
  const Vector d = linalg::eigenvalues(p);
  return solve_decreasing(
      [&](double lambda) { return divergence_at_lambda(d, lambda, tau); },
      feasibility_bound(d, tau), c, rel_tol);
}

double solve_lambda_for_delta_mse(const Matrix& p, double target_delta_mse, double tau,
                                  double rel_tol) {
  require_tau(tau);
  if (!(target_delta_mse > 0.0)) throw ValidationError("target delta MSE must be positive");
  const Vector d = linalg::eigenvalues(p);
  return solve_decreasing(
      [&](double lambda) { return delta_mse_at_lambda(d, lambda, tau); },
      feasibility_bound(d, tau), target_delta_mse, rel_tol);
}

WorstCaseStatic worst_case_static(const JointGaussian& model, const TauBall& ball,
                                  double rel_tol) {
  const double tau = ball.tau();
  const Matrix p = nominal_error_cov(model);
  const Vector d = linalg::eigenvalues(p);

  if (ball.is_hard() && ball.c() == 0.0) {
    return {tau, kInf, 0.0, p, p, model, 0.0};
  }

  double lambda = 0.0;
  if (ball.is_hard()) {
    lambda = solve_lambda(p, ball.c(), tau, rel_tol);
  } else {
    lambda = ball.lambda();
    require_feasible(lambda, feasibility_bound(d, tau));
  }

  const Matrix worst_p = lf_error_cov(p, lambda, tau);
  RealBlocks b = model.blocks();
  // K~_x = P~ + K_xy K_y^{-1} K_yx
  b.x = worst_p + (b.x - p);
  JointGaussian worst(model.n(), model.p(), model.mean(), assemble_blocks(b));

  return {tau,
          lambda,
          divergence_at_lambda(d, lambda, tau),
          p,
          worst_p,
          std::move(worst),
          delta_mse_at_lambda(d, lambda, tau)};
}

namespace {

// Solves phi(k) == r for k on one side of 1, phi = divergence::eigen_term.
// Works in log k; direction +1 searches k > 1, -1 searches k < 1.
double variance_ratio_root(double r, double tau, int direction) {
  if (r <= 0.0) return 1.0;
  auto phi = [tau](double log_k) { return divergence::eigen_term_log(log_k, tau); };
  double inner = 0.0;
  double outer = direction * 0.1;
  while (phi(outer) < r) {
    inner = outer;
    outer *= 2.0;
    if (!std::isfinite(outer)) throw DomainError("variance root not bracketed");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (inner + outer);
    const double value = phi(mid);
    if (std::abs(value - r) <= 1e-13 * std::max(1.0, r)) return std::exp(mid);
    (value < r ? inner : outer) = mid;
    if (std::abs(outer - inner) <= 1e-16 * std::max(1.0, std::abs(mid))) break;
  }
  return std::exp(0.5 * (inner + outer));
}

// Supremum of phi(k) as k -> 0: unbounded at tau = 0, 1 / tau otherwise.
double lower_side_limit(double tau) { return tau == 0.0 ? kInf : 1.0 / tau; }

}  // namespace

std::vector<BallPoint> ball_boundary_scalar(double mean, double var, double tau, double c,
                                            int n_points) {
  require_tau(tau);
  if (!(c > 0.0)) throw ValidationError("ball tolerance c must be positive");
  if (!(var > 0.0)) throw ValidationError("nominal variance must be positive");
  if (n_points < 2) throw ValidationError("ball trace needs at least 2 points");

  const double weight = tau == 1.0 ? kInf : divergence::mean_weight(tau);
  const double half_width = tau == 1.0 ? 0.0 : std::sqrt(c * var / weight);

  std::vector<double> offsets;
  if (half_width == 0.0) {
    offsets.push_back(0.0);
  } else {
    for (int j = 0; j < n_points; ++j) {
      offsets.push_back(-half_width + 2.0 * half_width * j / (n_points - 1));
    }
  }

  std::vector<BallPoint> upper;
  std::vector<BallPoint> lower;
  for (double dm : offsets) {
    const double mean_part = half_width == 0.0 ? 0.0 : weight * dm * dm / var;
    const double r = std::max(0.0, c - mean_part);
    upper.push_back({mean + dm, var * variance_ratio_root(r, tau, +1)});
    if (r == 0.0) continue;  // the two roots coincide at k = 1
    if (r < lower_side_limit(tau)) {
      lower.push_back({mean + dm, var * variance_ratio_root(r, tau, -1)});
    }
  }
  // Upper arc left to right, then lower arc right to left.
  std::vector<BallPoint> out(upper.begin(), upper.end());
  out.insert(out.end(), lower.rbegin(), lower.rend());
  return out;
}

}  // namespace taurob::robust
