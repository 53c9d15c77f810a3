#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "taurob/divergences.hpp"
#include "taurob/errors.hpp"
#include "taurob/static_robust.hpp"
#include "test_support.hpp"

using namespace taurob;
using namespace taurob::robust;
namespace t = taurob::testing;

namespace {

constexpr double kTaus[] = {0.0, 0.25, 0.5, 0.75, 1.0};

// Joint model whose Schur complement is the 2x2 nominal error covariance
// [[0.15, 0.05], [0.05, 0.1]]; K_y = 1 and K_xy = [0.1; 0.2].
JointGaussian error_cov_model() {
  Matrix cov(3, 3);
  cov << 0.16, 0.07, 0.1, 0.07, 0.14, 0.2, 0.1, 0.2, 1.0;
  return {2, 1, Vector::Zero(3), cov};
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("bayes estimator with zero cross covariance returns the prior mean") {
  Matrix cov = Matrix::Identity(3, 3);
  Vector mean(3);
  mean << 1.0, -2.0, 5.0;
  const auto g = bayes_estimator(JointGaussian(2, 1, mean, cov));
  CHECK(g.gain.cwiseAbs().maxCoeff() == 0.0);
  CHECK((g(Vector::Constant(1, 3.0)) - mean.head(2)).norm() == 0.0);
}

TEST_CASE("bayes estimator 2x2 normal equations") {
  Matrix cov(2, 2);
  cov << 0.2, 0.1, 0.1, 0.3;
  Vector mean(2);
  mean << 1.0, 2.0;
  const auto g = bayes_estimator(JointGaussian(1, 1, mean, cov));
  CHECK(g.gain(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(g.offset(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("bayes gain minimizes Monte-Carlo MSE against +-10% perturbations") {
  std::mt19937_64 rng(99);
  const JointGaussian model = t::random_model(2, 2, rng);
  const auto g = bayes_estimator(model);
  const Matrix l = linalg::square_root_factor(model.cov());
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kSamples = 100000;
  double mse_opt = 0.0, mse_up = 0.0, mse_down = 0.0;
  auto with_gain = [&](const Matrix& gain) {
    return AffineEstimator{gain, model.mean_x() - gain * model.mean_y()};
  };
  const auto up = with_gain(1.1 * g.gain);
  const auto down = with_gain(0.9 * g.gain);
  Vector w(4);
  for (int s = 0; s < kSamples; ++s) {
    for (int i = 0; i < 4; ++i) w(i) = normal(rng);
    const Vector z = model.mean() + l * w;
    const Vector x = z.head(2), y = z.tail(2);
    mse_opt += (x - g(y)).squaredNorm();
    mse_up += (x - up(y)).squaredNorm();
    mse_down += (x - down(y)).squaredNorm();
  }
  CHECK(mse_opt < mse_up);
  CHECK(mse_opt < mse_down);
  // and agrees with the closed-form MSE
  CHECK(mse_opt / kSamples == doctest::Approx(mean_square_error(model, g)).epsilon(0.02));
}

TEST_CASE("nominal error covariance") {
  Matrix cov = Matrix::Zero(3, 3);
  cov.diagonal() << 2.0, 3.0, 4.0;
  cov(0, 1) = cov(1, 0) = 0.5;
  const JointGaussian block_diag(2, 1, Vector::Zero(3), cov);
  CHECK(t::max_abs_diff(nominal_error_cov(block_diag), cov.topLeftCorner(2, 2)) == 0.0);

  Matrix c2(2, 2);
  c2 << 0.2, 0.1, 0.1, 0.3;
  CHECK(nominal_error_cov(JointGaussian(1, 1, Vector::Zero(2), c2))(0, 0) ==
        doctest::Approx(0.2 - 0.01 / 0.3).epsilon(1e-15));

  Matrix p(2, 2);
  p << 0.15, 0.05, 0.05, 0.1;
  CHECK(t::max_abs_diff(nominal_error_cov(error_cov_model()), p) <= 1e-15);
}

TEST_CASE("lf_error_cov scalar closed forms") {
  CHECK(lf_error_cov(scalar(0.1), 0.5, 0.0)(0, 0) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(lf_error_cov(scalar(0.1), 0.1, 1.0)(0, 0) ==
        doctest::Approx(0.271828182845904523536028747135).epsilon(1e-14));
  // tau = 0.5, lambda = 0.5: p / 0.9^2
  CHECK(lf_error_cov(scalar(0.1), 0.5, 0.5)(0, 0) ==
        doctest::Approx(0.123456790123456790123456790123).epsilon(1e-14));
}

TEST_CASE("lf_error_cov tends to P for large lambda") {
  std::mt19937_64 rng(12);
  const Matrix p = t::random_spd(3, rng);
  for (double tau : kTaus) {
    CHECK(t::max_abs_diff(lf_error_cov(p, 1e9, tau), p) <= 1e-6 * p.norm());
  }
}

TEST_CASE("lf_error_cov rejects infeasible multipliers") {
  Matrix p(2, 2);
  p << 0.15, 0.05, 0.05, 0.1;
  const double norm = linalg::spectral_norm(p);
  CHECK_THROWS_AS(lf_error_cov(p, norm, 0.0), InfeasibleMultiplier);
  CHECK_THROWS_AS(lf_error_cov(p, 0.5 * norm, 0.5), InfeasibleMultiplier);
  CHECK_NOTHROW(lf_error_cov(p, 0.51 * norm, 0.5));
  CHECK_THROWS_AS(lf_error_cov(p, 0.0, 1.0), InfeasibleMultiplier);
  CHECK_THROWS_AS(divergence_at_lambda(p, norm * 0.99, 0.0), InfeasibleMultiplier);
}

TEST_CASE("lf_error_cov is independent of the square factor") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    const Matrix p = t::random_spd(n, rng);
    const Matrix chol = linalg::square_root_factor(p);
    const Matrix sym = linalg::apply_spectral_function(p, [](double x) { return std::sqrt(x); });
    const Matrix rotated = chol * t::random_orthogonal(n, rng);
    for (double tau : kTaus) {
      const double lambda = 1.3 * (1.0 - tau) * linalg::spectral_norm(p) + 0.2;
      const Matrix base = lf_error_cov(p, lambda, tau);
      CHECK(t::max_abs_diff(lf_error_cov_from_factor(sym, lambda, tau), base) <= 1e-10 * base.norm());
      CHECK(t::max_abs_diff(lf_error_cov_from_factor(rotated, lambda, tau), base) <= 1e-10 * base.norm());
      // factor-free form P (I - (1 - tau) P / lambda)^{1/(tau - 1)}
      const Matrix factor_free =
          p * linalg::apply_spectral_function(p, [&](double x) {
            return tau == 1.0 ? std::exp(x / lambda)
                              : std::pow(1.0 - (1.0 - tau) * x / lambda, 1.0 / (tau - 1.0));
          });
      CHECK(t::max_abs_diff(factor_free, base) <= 1e-10 * base.norm());
    }
  }
}

TEST_CASE("divergence_at_lambda frozen values and large-lambda limit") {
  CHECK(divergence_at_lambda(scalar(0.1), 0.5, 0.0) ==
        doctest::Approx(0.0268564486857902442337049096902).epsilon(1e-12));
  CHECK(divergence_at_lambda(scalar(0.1), 0.1, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(divergence_at_lambda(scalar(0.1), 0.5, 0.5) ==
        doctest::Approx(0.024691358024691358024691358025).epsilon(1e-12));
  Matrix p(2, 2);
  p << 0.15, 0.05, 0.05, 0.1;
  for (double tau : kTaus) CHECK(divergence_at_lambda(p, 1e12, tau) < 1e-9);
}

TEST_CASE("divergence_at_lambda equals tau_divergence of the assembled pair") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const JointGaussian model = t::random_model(2, 2, rng);
    for (double tau : kTaus) {
      const Matrix p = nominal_error_cov(model);
      const double lambda = (1.0 - tau) * linalg::spectral_norm(p) * 1.5 + 0.3;
      const auto wc = worst_case_static(model, TauBall::soft(tau, lambda));
      CHECK(divergence::tau_divergence(wc.worst_joint, model, tau) ==
            doctest::Approx(divergence_at_lambda(p, lambda, tau)).epsilon(1e-9));
    }
  }
}

TEST_CASE("divergence_at_lambda is strictly decreasing in lambda") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix p = t::random_spd(3, rng);
    for (double tau : kTaus) {
      const double bound = feasibility_bound(p, tau);
      double prev = std::numeric_limits<double>::infinity();
      for (double lambda = bound + 0.01; lambda < bound + 50.0; lambda *= 1.3) {
        const double d = divergence_at_lambda(p, lambda, tau);
        CHECK(d < prev);
        prev = d;
      }
    }
  }
}

TEST_CASE("solve_lambda inverts divergence_at_lambda") {
  CHECK(solve_lambda(scalar(0.1), 0.0268564486857902442337049096902, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-6));
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix p = t::random_spd(1 + trial % 4, rng);
    for (double tau : kTaus) {
      for (double c : {1e-4, 0.01, 0.5, 1.0, 10.0}) {
        const double lambda = solve_lambda(p, c, tau);
        CHECK(lambda > feasibility_bound(p, tau));
        CHECK(std::abs(divergence_at_lambda(p, lambda, tau) - c) <= 1e-9 * std::max(1.0, c));
      }
    }
  }
}

TEST_CASE("solved lambda decreases as c grows") {
  Matrix p(2, 2);
  p << 0.15, 0.05, 0.05, 0.1;
  for (double tau : kTaus) {
    double prev = std::numeric_limits<double>::infinity();
    for (double c = 1e-3; c < 5.0; c *= 2.0) {
      const double lambda = solve_lambda(p, c, tau);
      CHECK(lambda < prev);
      prev = lambda;
    }
  }
}

TEST_CASE("worst case: tiny and zero tolerance return the nominal law") {
  const JointGaussian model = error_cov_model();
  for (double tau : kTaus) {
    const auto tiny = worst_case_static(model, TauBall::hard(tau, 1e-12));
    CHECK(t::max_abs_diff(tiny.worst_joint.cov(), model.cov()) <= 1e-6);
    CHECK(tiny.delta_mse == doctest::Approx(0.0));
    const auto zero = worst_case_static(model, TauBall::hard(tau, 0.0));
    CHECK(std::isinf(zero.lambda));
    CHECK(zero.delta_mse == 0.0);
    CHECK(zero.worst_joint.cov() == model.cov());
  }
}

TEST_CASE("worst case on the 2x2 example matches the known least favorable covariances") {
  const JointGaussian model = error_cov_model();
  struct Case {
    double tau, c, p11, p12, p22;
  };
  for (const Case& k : {Case{0.0, 0.0692, 0.2041, 0.0783, 0.1259}, Case{0.5, 0.0728, 0.2039, 0.0779, 0.1261},
                        Case{1.0, 0.0767, 0.2037, 0.0775, 0.1263}}) {
    const auto wc = worst_case_static(model, TauBall::hard(k.tau, k.c));
    CHECK(std::abs(wc.delta_mse - 0.08) <= 2e-3);
    CHECK(std::abs(wc.worst_p(0, 0) - k.p11) <= 2e-3);
    CHECK(std::abs(wc.worst_p(0, 1) - k.p12) <= 2e-3);
    CHECK(std::abs(wc.worst_p(1, 1) - k.p22) <= 2e-3);
  }
}

TEST_CASE("worst case structure: only the x block moves, PSD gap, trace identity") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const JointGaussian model = t::random_model(1 + trial % 3, 1 + trial % 2, rng);
    const int n = model.n();
    for (double tau : kTaus) {
      const auto wc = worst_case_static(model, TauBall::hard(tau, 0.2));
      const Matrix& kt = wc.worst_joint.cov();
      CHECK(t::max_abs_diff(kt.rightCols(model.p()), model.cov().rightCols(model.p())) <= 1e-14);
      CHECK(wc.worst_joint.mean() == model.mean());
      const Matrix gap = wc.worst_p - wc.nominal_p;
      CHECK(linalg::eigenvalues(gap).minCoeff() >= -1e-12);
      CHECK(gap.trace() == doctest::Approx(wc.delta_mse).epsilon(1e-10));
      CHECK(wc.delta_mse > 0.0);
      // x block equals P~ + K_xy K_y^{-1} K_yx
      CHECK(t::max_abs_diff(kt.topLeftCorner(n, n), wc.worst_p + (model.cov().topLeftCorner(n, n) - wc.nominal_p)) <=
            1e-14);
      CHECK(divergence::tau_divergence(wc.worst_joint, model, tau) == doctest::Approx(0.2).epsilon(1e-8));
    }
  }
}

TEST_CASE("soft mode uses the given lambda and reports the implied tolerance") {
  const JointGaussian model = error_cov_model();
  const auto hard = worst_case_static(model, TauBall::hard(0.5, 0.05));
  const auto soft = worst_case_static(model, TauBall::soft(0.5, hard.lambda));
  CHECK(soft.lambda == hard.lambda);
  CHECK(soft.c == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(t::max_abs_diff(soft.worst_p, hard.worst_p) == 0.0);
  CHECK_THROWS_AS(worst_case_static(model, TauBall::soft(0.5, 0.01)), InfeasibleMultiplier);
}

TEST_CASE("larger tau gives smaller delta MSE at fixed c") {
  const JointGaussian model = error_cov_model();
  for (double c : {0.001, 0.01, 0.05, 0.1}) {
    const double d0 = worst_case_static(model, TauBall::hard(0.0, c)).delta_mse;
    const double d5 = worst_case_static(model, TauBall::hard(0.5, c)).delta_mse;
    const double d1 = worst_case_static(model, TauBall::hard(1.0, c)).delta_mse;
    CHECK(d0 > d5);
    CHECK(d5 > d1);
  }
}

TEST_CASE("tau = 0 concentrates the perturbation on the larger-variance component") {
  const JointGaussian model = error_cov_model();
  const auto w0 = worst_case_static(model, TauBall::hard(0.0, 0.0692));
  const auto w1 = worst_case_static(model, TauBall::hard(1.0, 0.0767));
  CHECK(w0.worst_p(0, 0) - w0.nominal_p(0, 0) > w1.worst_p(0, 0) - w1.nominal_p(0, 0));
  CHECK(w0.worst_p(1, 1) - w0.nominal_p(1, 1) < w1.worst_p(1, 1) - w1.nominal_p(1, 1));
}

TEST_CASE("solve_lambda_for_delta_mse calibrates the tolerance") {
  Matrix p(2, 2);
  p << 0.15, 0.05, 0.05, 0.1;
  for (double tau : {0.0, 0.5, 1.0}) {
    const double lambda = solve_lambda_for_delta_mse(p, 0.08, tau);
    CHECK(delta_mse_at_lambda(linalg::eigenvalues(p), lambda, tau) == doctest::Approx(0.08).epsilon(1e-9));
  }
  // equal-MSE tolerances round to 0.0692, 0.0728, 0.0767
  CHECK(divergence_at_lambda(p, solve_lambda_for_delta_mse(p, 0.08, 0.0), 0.0) == doctest::Approx(0.0692).epsilon(2e-3));
  CHECK(divergence_at_lambda(p, solve_lambda_for_delta_mse(p, 0.08, 0.5), 0.5) == doctest::Approx(0.0728).epsilon(2e-3));
  CHECK(divergence_at_lambda(p, solve_lambda_for_delta_mse(p, 0.08, 1.0), 1.0) == doctest::Approx(0.0767).epsilon(2e-3));
}

TEST_CASE("ball boundary: both variance roots bracket the nominal variance at the nominal mean") {
  for (double tau : {0.0, 0.5, 0.8, 1.0}) {
    const auto pts = ball_boundary_scalar(0.5, 0.03, tau, 0.2, 21);
    double below = 0.0, above = 0.0;
    bool found_below = false, found_above = false;
    for (const auto& pt : pts) {
      if (std::abs(pt.mean - 0.5) > 1e-15) continue;
      if (pt.var < 0.03) { below = pt.var; found_below = true; }
      if (pt.var > 0.03) { above = pt.var; found_above = true; }
    }
    CHECK(found_below);
    CHECK(found_above);
    CHECK(below < 0.03);
    CHECK(above > 0.03);
  }
}

TEST_CASE("ball boundary points lie on the level set") {
  for (double tau : {0.0, 0.3, 0.8, 1.0}) {
    for (double c : {0.2, 0.454, 2.0}) {
      const auto pts = ball_boundary_scalar(0.5, 0.03, tau, c, 41);
      CHECK(!pts.empty());
      const double mean_weight = tau == 1.0 ? 0.0 : 1.0 / (1.0 - tau);
      for (const auto& pt : pts) {
        const double dm = pt.mean - 0.5;
        const double value = mean_weight * dm * dm / 0.03 + divergence::eigen_term(pt.var / 0.03, tau);
        CHECK(std::abs(value - c) <= 1e-8);
      }
    }
  }
}

TEST_CASE("ball boundary shape: tau 0.8 is wider in variance and narrower in mean") {
  auto extents = [](const std::vector<BallPoint>& pts) {
    double mlo = 1e300, mhi = -1e300, vlo = 1e300, vhi = -1e300;
    for (const auto& p : pts) {
      mlo = std::min(mlo, p.mean);
      mhi = std::max(mhi, p.mean);
      vlo = std::min(vlo, p.var);
      vhi = std::max(vhi, p.var);
    }
    return std::pair{mhi - mlo, vhi - vlo};
  };
  const auto [m0, v0] = extents(ball_boundary_scalar(0.5, 0.03, 0.0, 0.2, 101));
  const auto [m8, v8] = extents(ball_boundary_scalar(0.5, 0.03, 0.8, 0.454, 101));
  CHECK(m8 < m0);
  CHECK(v8 > v0);
}

TEST_CASE("ball boundary input errors") {
  CHECK_THROWS_AS(ball_boundary_scalar(0.5, 0.03, 0.5, 0.0, 10), ValidationError);
  CHECK_THROWS_AS(ball_boundary_scalar(0.5, -1.0, 0.5, 0.1, 10), ValidationError);
  CHECK_THROWS_AS(ball_boundary_scalar(0.5, 0.03, 0.5, 0.1, 1), ValidationError);
}
