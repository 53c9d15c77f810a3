#pragma once

#include "taurob/models.hpp"

// Build with -DTAUROB_UNIT_MEAN_WEIGHT=1 to weight the mean mismatch by 1
// instead of 1/(1 - tau). With unit weighting the admissible multipliers
// shrink to lambda > ||P|| for every tau; the least favorable laws are
// unchanged because they never move the mean.
#ifndef TAUROB_UNIT_MEAN_WEIGHT
#define TAUROB_UNIT_MEAN_WEIGHT 0
#endif

namespace taurob::divergence {

inline constexpr bool kUnitMeanWeight = TAUROB_UNIT_MEAN_WEIGHT != 0;

// A mean mismatch below kDiracThreshold * (1 + scale) counts as zero in the
// tau = 1 indicator term.
inline constexpr double kDiracThreshold = 1e-12;

// Weight on the squared normalized mean mismatch for tau < 1.
double mean_weight(double tau);

// Contribution of one eigenvalue k = exp(log_k) of the normalized covariance
// to the trace part of ell_tau:
//   tau = 0:      k - 1 - log k
//   0 < tau < 1:  k^tau / (tau (tau - 1)) + k / (1 - tau) + 1 / tau
//   tau = 1:      k log k - k + 1
// Evaluated in expm1 form so the result stays accurate near k = 1 and near
// the endpoints of the tau range. Returns +inf on overflow.
double eigen_term_log(double log_k, double tau);
double eigen_term(double k, double tau);

// Sum of eigen_term over the spectrum of a positive definite K.
double trace_term(const Matrix& k, double tau);
double trace_term(const CMatrix& k, double tau);

// ell_tau(m, K): mismatch of the normalized innovation (m, K) from (0, I).
// Returns +inf for tau = 1 with m != 0.
double ell_tau(const Vector& m, const Matrix& k, double tau);

// Trace part for an actual covariance against the nominal one, given a square
// factor of the nominal (factor * factor^* == nominal).
double normalized_trace_term(const Matrix& actual, const Matrix& nominal_factor, double tau);
double normalized_trace_term(const CMatrix& actual, const CMatrix& nominal_factor, double tau);

// D_tau(actual || nominal) for Gaussian vectors.
double tau_divergence(const GaussianPair& pair, double tau);
double tau_divergence(const JointGaussian& actual, const JointGaussian& nominal, double tau);

// S_tau(actual || nominal) for stationary processes on a common grid; the
// frequency integral is the rectangle rule on the uniform grid.
double spectral_tau_divergence(const SpectralModel& actual, const SpectralModel& nominal,
                               double tau);

}  // namespace taurob::divergence
