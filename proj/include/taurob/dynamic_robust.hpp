#pragma once

#include <string>
#include <vector>

#include "taurob/models.hpp"
#include "taurob/static_robust.hpp"

namespace taurob::dynamic {

using SpectrumGrid = std::vector<CMatrix>;

// Frequencies where Sigma_y has condition number above this abort the filter.
inline constexpr double kMaxObservationCondition = 1e12;

// Noncausal Wiener filter Lambda(theta_k) = Sigma_xy Sigma_y^{-1} and offset
// h = m_x - Lambda(0) m_y.
struct FrequencyResponse {
  SpectrumGrid values;
  Vector offset;
};

FrequencyResponse wiener_filter(const SpectralModel& model);

// Pointwise Schur complement Sigma_e = Sigma_x - Sigma_xy Sigma_y^{-1} Sigma_yx.
SpectrumGrid error_spectrum(const SpectralModel& model);

// Eigenvalues (descending) of each grid sample.
std::vector<Vector> grid_eigenvalues(const SpectrumGrid& grid);

// (1 - tau) * max_k ||Sigma_e(theta_k)||.
double feasibility_bound(const std::vector<Vector>& eigenvalues, double tau);

SpectrumGrid lf_error_spectrum(const SpectrumGrid& se, double lambda, double tau);
// Same, from arbitrary pointwise factors with Gamma Gamma^* = Sigma_e.
SpectrumGrid lf_error_spectrum_from_factors(const SpectrumGrid& factors, double lambda,
                                            double tau);

// Grid average of sum_i gamma(lambda, d_i(theta_k)).
double spectral_divergence_at_lambda(const std::vector<Vector>& eigenvalues, double lambda,
                                     double tau);
double spectral_divergence_at_lambda(const SpectrumGrid& se, double lambda, double tau);

// Grid average of tr(Sigma~_e - Sigma_e).
double delta_mse_at_lambda(const std::vector<Vector>& eigenvalues, double lambda, double tau);

double solve_lambda(const SpectrumGrid& se, double c, double tau,
                    double rel_tol = robust::kDefaultRelTol);
double solve_lambda_for_delta_mse(const SpectrumGrid& se, double target_delta_mse, double tau,
                                  double rel_tol = robust::kDefaultRelTol);

struct WorstCaseSpectral {
  double tau;
  double lambda;  // +inf for the degenerate c == 0 ball
  double c;
  SpectrumGrid nominal_se;
  SpectrumGrid worst_se;
  SpectralModel worst_model;
  double delta_mse;
  std::vector<std::string> warnings;
};

// True when 1/(1 - tau) is a natural number (or tau == 1).
bool has_integer_order(double tau);

// Least favorable spectrum in the ball; only Sigma_x moves. Emits a warning
// (not an error) when 1/(1 - tau) is not an integer. Throws BracketFailure if
// the divergence curve cannot be bracketed around c.
WorstCaseSpectral worst_case_spectral(const SpectralModel& model, const TauBall& ball,
                                      double rel_tol = robust::kDefaultRelTol);

}  // namespace taurob::dynamic
