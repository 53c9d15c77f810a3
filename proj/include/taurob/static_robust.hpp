#pragma once

#include <optional>
#include <vector>

#include "taurob/models.hpp"

namespace taurob::robust {

inline constexpr double kDefaultRelTol = 1e-9;

// g(y) = gain * y + offset.
struct AffineEstimator {
  Matrix gain;
  Vector offset;

  Vector operator()(const Vector& y) const { return gain * y + offset; }
};

// Conditional-mean estimator of x given y under the nominal law:
// gain K_xy K_y^{-1}, offset m_x - gain * m_y.
AffineEstimator bayes_estimator(const JointGaussian& model);

// Schur complement P = K_x - K_xy K_y^{-1} K_yx.
Matrix nominal_error_cov(const JointGaussian& model);

// Mean square error E||x - g(y)||^2 of an affine estimator under a law.
double mean_square_error(const JointGaussian& law, const AffineEstimator& g);

// (1 - tau) * ||P||: multipliers must lie strictly above this.
double feasibility_bound(const Matrix& p, double tau);
double feasibility_bound(const Vector& eigenvalues, double tau);

// log of the least favorable / nominal error-variance ratio along an
// eigendirection with nominal eigenvalue d:
//   -log(1 - (1 - tau) d / lambda) / (1 - tau), or d / lambda at tau = 1.
double log_inflation(double lambda, double d, double tau);

// Divergence contributed by one eigendirection; strictly decreasing in lambda.
double gamma(double lambda, double d, double tau);

// Least favorable error covariance P~ for a fixed multiplier. Throws
// InfeasibleMultiplier for lambda <= (1 - tau) ||P||.
Matrix lf_error_cov(const Matrix& p, double lambda, double tau);
// Same quantity built from an arbitrary square factor of P.
Matrix lf_error_cov_from_factor(const Matrix& factor, double lambda, double tau);

// D_tau between the least favorable law at lambda and the nominal law.
double divergence_at_lambda(const Matrix& p, double lambda, double tau);
double divergence_at_lambda(const Vector& eigenvalues, double lambda, double tau);

// tr(P~ - P) at lambda.
double delta_mse_at_lambda(const Vector& eigenvalues, double lambda, double tau);

// Unique multiplier with divergence_at_lambda == c (c > 0).
double solve_lambda(const Matrix& p, double c, double tau, double rel_tol = kDefaultRelTol);

// Multiplier whose least favorable law adds exactly target_delta_mse.
double solve_lambda_for_delta_mse(const Matrix& p, double target_delta_mse, double tau,
                                  double rel_tol = kDefaultRelTol);

struct WorstCaseStatic {
  double tau;
  double lambda;  // +inf for the degenerate c == 0 ball
  double c;       // divergence of the least favorable law (implied in soft mode)
  Matrix nominal_p;
  Matrix worst_p;
  JointGaussian worst_joint;
  double delta_mse;
};

// Least favorable law in the ball. Hard mode solves for lambda; soft mode uses
// the given lambda. Only the x-block of the covariance moves.
WorstCaseStatic worst_case_static(const JointGaussian& model, const TauBall& ball,
                                  double rel_tol = kDefaultRelTol);

struct BallPoint {
  double mean;
  double var;
};

// Boundary {D_tau = c} of the ball around a scalar N(mean, var), scanning
// n_points mean values across the feasible interval and solving for the
// variance roots on each side of var. Points are ordered along the contour.
std::vector<BallPoint> ball_boundary_scalar(double mean, double var, double tau, double c,
                                            int n_points);

}  // namespace taurob::robust
