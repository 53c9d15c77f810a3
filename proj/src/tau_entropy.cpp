#include "taurob/tau_entropy.hpp"

#include <cmath>
#include <limits>

#include "taurob/divergences.hpp"
#include "taurob/errors.hpp"

namespace taurob::entropy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ErrorMoments error_moments(const JointGaussian& model, const robust::AffineEstimator& g) {
  if (g.gain.rows() != model.n() || g.gain.cols() != model.p() || g.offset.size() != model.n()) {
    throw ValidationError("estimator dimensions do not match the model");
  }
  Matrix selector(model.n(), model.dim());
  selector << Matrix::Identity(model.n(), model.n()), -g.gain;
  return {selector * model.mean() - g.offset,
          linalg::symmetrize(selector * model.cov() * selector.transpose())};
}

EntropyValue tau_entropy(const ErrorMoments& e, double lambda, double tau) {
  require_tau(tau);
  if (!(lambda > 0.0)) throw ValidationError("tau entropy requires lambda > 0");
  if (e.cov.rows() != e.mean.size()) throw ValidationError("error moments have mismatched sizes");

  const auto eig = linalg::eigen(e.cov);
  const Vector& kappa = eig.values;
  if (kappa(kappa.size() - 1) < -1e-12 * std::max(1.0, kappa(0))) {
    throw ValidationError("error covariance is not positive semidefinite");
  }
  if (!(lambda > (1.0 - tau) * kappa.cwiseAbs().maxCoeff())) return {kInf, false};

  const double a = (1.0 - tau) / lambda;
  const Vector projected = eig.vectors.transpose() * e.mean;
  double value = 0.0;
  for (Eigen::Index i = 0; i < kappa.size(); ++i) {
    const double k = std::max(kappa(i), 0.0);
    // m^T (I - a K)^{-1} m, diagonalized
    value += projected(i) * projected(i) / (1.0 - a * k);
    if (tau == 0.0) {
      value -= lambda * std::log1p(-k / lambda);
    } else if (tau == 1.0) {
      value += lambda * std::expm1(k / lambda);
    } else {
      value += lambda / tau * std::expm1(tau / (tau - 1.0) * std::log1p(-a * k));
    }
  }
  return {std::max(value, 0.0), true};
}

double lagrangian(const JointGaussian& actual, const JointGaussian& nominal,
                  const robust::AffineEstimator& g, double lambda, double tau, double c) {
  const double d = divergence::tau_divergence(actual, nominal, tau);
  if (std::isinf(d)) return -kInf;
  return robust::mean_square_error(actual, g) + lambda * (c - d);
}

JointGaussian random_perturbation(const JointGaussian& nominal, double tau, double scale,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int q = nominal.dim();
  Matrix s(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = normal(rng);
  Vector v(q);
  for (int i = 0; i < q; ++i) v(i) = normal(rng);

  const Matrix l = linalg::square_root_factor(nominal.cov());
  const Matrix inner =
      linalg::apply_spectral_function(s, [scale](double x) { return std::exp(scale * x); });
  const Vector mean = tau == 1.0 ? nominal.mean() : Vector(nominal.mean() + scale * (l * v));
  return {nominal.n(), nominal.p(), mean, linalg::symmetrize(l * inner * l.transpose())};
}

EquivalenceReport entropy_equivalence_check(const JointGaussian& model, double lambda, double tau,
                                            int n_samples, std::mt19937_64& rng, double c) {
  const Matrix p = robust::nominal_error_cov(model);
  const double bound_lambda = robust::feasibility_bound(p, tau);
  if (!(lambda > bound_lambda)) throw InfeasibleMultiplier(lambda, bound_lambda);

  const auto g = robust::bayes_estimator(model);
  const EntropyValue h = tau_entropy(error_moments(model, g), lambda, tau);

  EquivalenceReport report{};
  report.entropy = h.value;
  report.bound = h.value + lambda * c;
  const auto worst = robust::worst_case_static(model, TauBall::soft(tau, lambda));
  report.lagrangian_at_lf = lagrangian(worst.worst_joint, model, g, lambda, tau, c);
  report.equality_gap =
      std::abs(report.lagrangian_at_lf - report.bound) / std::max(1.0, std::abs(report.bound));

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  report.max_sampled_excess = -kInf;
  for (int s = 0; s < n_samples; ++s) {
    // Half the samples perturb the nominal law, half the least favorable one.
    const JointGaussian& centre = (s % 2 == 0) ? model : worst.worst_joint;
    const JointGaussian candidate = random_perturbation(centre, tau, 0.3 * unit(rng), rng);
    const double value = lagrangian(candidate, model, g, lambda, tau, c);
    report.max_sampled_excess = std::max(report.max_sampled_excess, value - report.bound);
  }
  report.samples = n_samples;
  return report;
}

}  // namespace taurob::entropy
