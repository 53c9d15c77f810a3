#include "taurob/dynamic_robust.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "taurob/bisection.hpp"
#include "taurob/errors.hpp"

namespace taurob::dynamic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CMatrix observation_inverse(const SpectralModel& model, int k, const CMatrix& sigma_y) {
  const auto eig = linalg::eigen(sigma_y);
  const double top = eig.values(0);
  const double bottom = eig.values(eig.values.size() - 1);
  if (!(bottom > 0.0) || top / bottom > kMaxObservationCondition) {
    std::ostringstream out;
    out.precision(6);
    out << "observation spectrum is singular at frequency index " << k << " (theta = "
        << model.theta(k) << "), condition number " << (bottom > 0.0 ? top / bottom : kInf);
    throw DomainError(out.str());
  }
  const Vector inv = eig.values.cwiseInverse();
  return eig.vectors * inv.asDiagonal() * eig.vectors.adjoint();
}

void require_feasible(double lambda, double bound) {
  if (!(lambda > bound)) throw InfeasibleMultiplier(lambda, bound);
}

CMatrix lf_from_factor(const CMatrix& factor, double lambda, double tau) {
  const CMatrix gram = linalg::symmetrize(CMatrix(factor.adjoint() * factor));
  const CMatrix middle = linalg::apply_spectral_function(
      gram, [lambda, tau](double x) { return std::exp(robust::log_inflation(lambda, x, tau)); });
  return linalg::symmetrize(CMatrix(factor * middle * factor.adjoint()));
}

}  // namespace

FrequencyResponse wiener_filter(const SpectralModel& model) {
  FrequencyResponse out;
  out.values.reserve(static_cast<std::size_t>(model.grid_size()));
  for (int k = 0; k < model.grid_size(); ++k) {
    const ComplexBlocks b = model.blocks(k);
    out.values.push_back(b.xy * observation_inverse(model, k, b.y));
  }
  // theta_0 = 0 is always a grid point; Lambda(0) is real for a real process.
  const Matrix gain0 = out.values.front().real();
  out.offset = model.mean().head(model.n()) - gain0 * model.mean().tail(model.p());
  return out;
}

SpectrumGrid error_spectrum(const SpectralModel& model) {
  SpectrumGrid out;
  out.reserve(static_cast<std::size_t>(model.grid_size()));
  for (int k = 0; k < model.grid_size(); ++k) {
    const ComplexBlocks b = model.blocks(k);
    out.push_back(linalg::symmetrize(CMatrix(b.x - b.xy * observation_inverse(model, k, b.y) * b.yx)));
  }
  return out;
}

std::vector<Vector> grid_eigenvalues(const SpectrumGrid& grid) {
  std::vector<Vector> out;
  out.reserve(grid.size());
  for (const auto& s : grid) out.push_back(linalg::eigenvalues(s));
  return out;
}

double feasibility_bound(const std::vector<Vector>& eigenvalues, double tau) {
  require_tau(tau);
  double top = 0.0;
  for (const auto& d : eigenvalues) top = std::max(top, d.cwiseAbs().maxCoeff());
  return (1.0 - tau) * top;
}

SpectrumGrid lf_error_spectrum_from_factors(const SpectrumGrid& factors, double lambda,
                                            double tau) {
  require_tau(tau);
  SpectrumGrid grams;
  grams.reserve(factors.size());
  for (const auto& f : factors) grams.push_back(linalg::symmetrize(CMatrix(f.adjoint() * f)));
  require_feasible(lambda, feasibility_bound(grid_eigenvalues(grams), tau));
  SpectrumGrid out;
  out.reserve(factors.size());
  for (const auto& f : factors) out.push_back(lf_from_factor(f, lambda, tau));
  return out;
}

SpectrumGrid lf_error_spectrum(const SpectrumGrid& se, double lambda, double tau) {
  SpectrumGrid factors;
  factors.reserve(se.size());
  for (const auto& s : se) factors.push_back(linalg::square_root_factor(s));
  return lf_error_spectrum_from_factors(factors, lambda, tau);
}

double spectral_divergence_at_lambda(const std::vector<Vector>& eigenvalues, double lambda,
                                     double tau) {
  require_feasible(lambda, feasibility_bound(eigenvalues, tau));
  double sum = 0.0;
  for (const auto& d : eigenvalues) {
    for (Eigen::Index i = 0; i < d.size(); ++i) sum += robust::gamma(lambda, d(i), tau);
  }
  return sum / static_cast<double>(eigenvalues.size());
}

double spectral_divergence_at_lambda(const SpectrumGrid& se, double lambda, double tau) {
  return spectral_divergence_at_lambda(grid_eigenvalues(se), lambda, tau);
}

double delta_mse_at_lambda(const std::vector<Vector>& eigenvalues, double lambda, double tau) {
  require_feasible(lambda, feasibility_bound(eigenvalues, tau));
  double sum = 0.0;
  for (const auto& d : eigenvalues) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      sum += d(i) * std::expm1(robust::log_inflation(lambda, d(i), tau));
    }
  }
  return sum / static_cast<double>(eigenvalues.size());
}

double solve_lambda(const SpectrumGrid& se, double c, double tau, double rel_tol) {
  require_tau(tau);
  if (!(c > 0.0)) throw ValidationError("solve_lambda requires c > 0");
  const auto d = grid_eigenvalues(se);
  return solve_decreasing([&](double lambda) { return spectral_divergence_at_lambda(d, lambda, tau); },
                          feasibility_bound(d, tau), c, rel_tol);
}

double solve_lambda_for_delta_mse(const SpectrumGrid& se, double target_delta_mse, double tau,
                                  double rel_tol) {
  require_tau(tau);
  if (!(target_delta_mse > 0.0)) throw ValidationError("target delta MSE must be positive");
  const auto d = grid_eigenvalues(se);
  return solve_decreasing([&](double lambda) { return delta_mse_at_lambda(d, lambda, tau); },
                          feasibility_bound(d, tau), target_delta_mse, rel_tol);
}

bool has_integer_order(double tau) {
  if (tau == 1.0) return true;
  const double order = 1.0 / (1.0 - tau);
  return std::abs(order - std::round(order)) <= 1e-9 * order;
}

WorstCaseSpectral worst_case_spectral(const SpectralModel& model, const TauBall& ball,
                                      double rel_tol) {
  const double tau = ball.tau();
  std::vector<std::string> warnings;
  if (!has_integer_order(tau)) {
    std::ostringstream out;
    out << "1/(1 - tau) = " << 1.0 / (1.0 - tau)
        << " is not an integer; existence of the multiplier is not guaranteed for this tau, "
           "relying on numerical bracketing";
    warnings.push_back(out.str());
  }

  SpectrumGrid se = error_spectrum(model);
  const auto d = grid_eigenvalues(se);

  if (ball.is_hard() && ball.c() == 0.0) {
    return {tau, kInf, 0.0, se, se, model, 0.0, std::move(warnings)};
  }

  double lambda = 0.0;
  if (ball.is_hard()) {
    lambda = solve_decreasing(
        [&](double l) { return spectral_divergence_at_lambda(d, l, tau); },
        feasibility_bound(d, tau), ball.c(), rel_tol);
  } else {
    lambda = ball.lambda();
    require_feasible(lambda, feasibility_bound(d, tau));
  }

  SpectrumGrid worst_se = lf_error_spectrum(se, lambda, tau);
  std::vector<CMatrix> worst_values;
  worst_values.reserve(se.size());
  for (int k = 0; k < model.grid_size(); ++k) {
    ComplexBlocks b = model.blocks(k);
    const auto idx = static_cast<std::size_t>(k);
    b.x = worst_se[idx] + (b.x - se[idx]);
    worst_values.push_back(assemble_blocks(b));
  }
  SpectralModel worst(model.n(), model.p(), model.mean(), std::move(worst_values));

  return {tau,
          lambda,
          spectral_divergence_at_lambda(d, lambda, tau),
          std::move(se),
          std::move(worst_se),
          std::move(worst),
          delta_mse_at_lambda(d, lambda, tau),
          std::move(warnings)};
}

}  // namespace taurob::dynamic
