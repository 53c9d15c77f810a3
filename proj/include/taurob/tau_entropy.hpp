#pragma once

#include <cstdint>
#include <random>

#include "taurob/models.hpp"
#include "taurob/static_robust.hpp"

namespace taurob::entropy {

// Mean and covariance of e = x - g(y) under the nominal law.
struct ErrorMoments {
  Vector mean;
  Matrix cov;
};

ErrorMoments error_moments(const JointGaussian& model, const robust::AffineEstimator& g);

// +inf exactly when infeasible (lambda <= (1 - tau) ||K_e||).
struct EntropyValue {
  double value;
  bool feasible;
};

// tau entropy H_tau(e, lambda). At tau = 1 the mean enters as ||m_e||^2.
EntropyValue tau_entropy(const ErrorMoments& e, double lambda, double tau);

// J(f~, g) + lambda * (c - D_tau(f~ || f)).
double lagrangian(const JointGaussian& actual, const JointGaussian& nominal,
                  const robust::AffineEstimator& g, double lambda, double tau, double c);

struct EquivalenceReport {
  double entropy;             // H_tau(e, lambda) for the Bayes estimator
  double bound;               // entropy + lambda * c
  double lagrangian_at_lf;    // Lagrangian at the analytic least favorable law
  double equality_gap;        // |lagrangian_at_lf - bound| / max(1, |bound|)
  double max_sampled_excess;  // max over samples of (lagrangian - bound); <= 0 expected
  int samples;
};

// Numerically checks that the soft-constrained maximization of the Lagrangian
// over Gaussian laws equals the tau entropy plus lambda * c for the nominal
// Bayes estimator: the analytic least favorable law attains the bound and
// randomly perturbed laws stay below it. rng is caller-seeded.
EquivalenceReport entropy_equivalence_check(const JointGaussian& model, double lambda, double tau,
                                            int n_samples, std::mt19937_64& rng, double c = 0.0);

// Random law with finite divergence from nominal: covariance
// L exp(scale * S) L^T with S symmetric Gaussian, mean shifted by
// scale * L v (no shift at tau = 1).
JointGaussian random_perturbation(const JointGaussian& nominal, double tau, double scale,
                                  std::mt19937_64& rng);

}  // namespace taurob::entropy
