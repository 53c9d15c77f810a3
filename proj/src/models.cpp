#include "taurob/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "taurob/errors.hpp"

namespace taurob {

namespace {

std::string at_frequency(int k) {
  std::ostringstream out;
  out << "frequency index " << k;
  return out.str();
}

}  // namespace

void require_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    std::ostringstream out;
    out << "tau must lie in [0, 1], got " << tau;
    throw ValidationError(out.str());
  }
}

std::vector<std::string> validation_issues(int n, int p, const Vector& mean, const Matrix& cov) {
  std::vector<std::string> issues;
  if (n < 1) issues.push_back("state dimension n must be >= 1");
  if (p < 1) issues.push_back("observation dimension p must be >= 1");
  const int q = n + p;
  if (mean.size() != q) {
    issues.push_back("mean length " + std::to_string(mean.size()) + " does not match n + p = " +
                     std::to_string(q));
  }
  if (!mean.allFinite()) issues.push_back("mean has non-finite entries");
  if (cov.rows() != q || cov.cols() != q) {
    issues.push_back("covariance is " + std::to_string(cov.rows()) + "x" +
                     std::to_string(cov.cols()) + ", expected " + std::to_string(q) + "x" +
                     std::to_string(q));
    return issues;
  }
  if (!cov.allFinite()) {
    issues.push_back("covariance has non-finite entries");
    return issues;
  }
  if (!linalg::is_symmetric(cov)) {
    issues.push_back("covariance is not symmetric");
  } else if (!linalg::is_positive_definite(cov)) {
    issues.push_back("covariance is not positive definite");
  }
  return issues;
}

JointGaussian::JointGaussian(int n, int p, Vector mean, Matrix cov)
    : n_(n), p_(p), mean_(std::move(mean)), cov_(std::move(cov)) {
  if (auto issues = validation_issues(n_, p_, mean_, cov_); !issues.empty()) {
    throw ValidationError(std::move(issues));
  }
  cov_ = linalg::symmetrize(cov_);
}

GaussianPair::GaussianPair(JointGaussian nominal_law, JointGaussian actual_law)
    : nominal(std::move(nominal_law)), actual(std::move(actual_law)) {
  if (nominal.n() != actual.n() || nominal.p() != actual.p()) {
    throw ValidationError("actual and nominal models have different dimensions");
  }
}

std::vector<std::string> validation_issues(int n, int p, const Vector& mean,
                                           const std::vector<CMatrix>& values) {
  std::vector<std::string> issues;
  if (n < 1) issues.push_back("state dimension n must be >= 1");
  if (p < 1) issues.push_back("observation dimension p must be >= 1");
  const int q = n + p;
  if (mean.size() != q) {
    issues.push_back("mean length " + std::to_string(mean.size()) + " does not match n + p = " +
                     std::to_string(q));
  }
  const int m = static_cast<int>(values.size());
  if (m < 8 || m % 2 != 0) {
    issues.push_back("grid size must be even and >= 8, got " + std::to_string(m));
  }
  bool shapes_ok = true;
  for (int k = 0; k < m; ++k) {
    const CMatrix& s = values[static_cast<std::size_t>(k)];
    if (s.rows() != q || s.cols() != q) {
      issues.push_back("spectrum at " + at_frequency(k) + " has wrong shape");
      shapes_ok = false;
      continue;
    }
    if (!s.allFinite()) {
      issues.push_back("spectrum at " + at_frequency(k) + " has non-finite entries");
      shapes_ok = false;
      continue;
    }
    if (!linalg::is_hermitian(s)) {
      issues.push_back("spectrum at " + at_frequency(k) + " is not Hermitian");
    } else if (!linalg::is_positive_definite(s)) {
      issues.push_back("spectrum at " + at_frequency(k) + " is not positive definite");
    }
  }
  if (shapes_ok && m > 0) {
    for (int k = 0; k <= m / 2; ++k) {
      const CMatrix& a = values[static_cast<std::size_t>(k)];
      const CMatrix& b = values[static_cast<std::size_t>((m - k) % m)];
      const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
      if ((a - b.conjugate()).cwiseAbs().maxCoeff() > kConjugateSymmetryTol * scale) {
        issues.push_back("conjugate symmetry broken between " + at_frequency(k) + " and " +
                         at_frequency((m - k) % m));
      }
    }
  }
  return issues;
}

SpectralModel::SpectralModel(int n, int p, Vector mean, std::vector<CMatrix> values)
    : n_(n), p_(p), mean_(std::move(mean)), values_(std::move(values)) {
  if (auto issues = validation_issues(n_, p_, mean_, values_); !issues.empty()) {
    throw ValidationError(std::move(issues));
  }
  for (auto& v : values_) v = linalg::symmetrize(v);
}

double SpectralModel::theta(int k) const {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid_size());
}

CMatrix evaluate_arma(const ArmaSpectrum& arma, double theta) {
  const std::size_t rows = arma.num.size();
  if (rows == 0 || arma.den.size() != rows) {
    throw ValidationError("ARMA numerator/denominator must be non-empty with matching rows");
  }
  const std::size_t cols = arma.num.front().size();
  const linalg::Complex shift = std::polar(1.0, -theta);
  auto poly = [&](const std::vector<double>& coeffs) {
    linalg::Complex acc = 0.0;
    // Horner in e^{-i theta}.
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * shift + *it;
    return acc;
  };
  CMatrix w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (arma.num[i].size() != cols || arma.den[i].size() != cols) {
      throw ValidationError("ARMA numerator/denominator rows have inconsistent lengths");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& den = arma.den[i][j];
      const linalg::Complex d = den.empty() ? linalg::Complex(1.0) : poly(den);
      if (std::abs(d) == 0.0) {
        throw ValidationError("ARMA denominator vanishes on the unit circle");
      }
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = poly(arma.num[i][j]) / d;
    }
  }
  return w * w.adjoint();
}

SpectralModel SpectralModel::from_arma(int n, int p, Vector mean, const ArmaSpectrum& arma,
                                       int grid_size) {
  if (grid_size < 8 || grid_size % 2 != 0) {
    throw ValidationError("grid size must be even and >= 8, got " + std::to_string(grid_size));
  }
  std::vector<CMatrix> values;
  values.reserve(static_cast<std::size_t>(grid_size));
  for (int k = 0; k < grid_size; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / grid_size;
    values.push_back(evaluate_arma(arma, theta));
  }
  // Enforce exact conjugate symmetry; the evaluation at theta_{M-k} differs
  // from conj(theta_k) only by rounding.
  for (int k = 1; k < grid_size / 2; ++k) {
    values[static_cast<std::size_t>(grid_size - k)] = values[static_cast<std::size_t>(k)].conjugate();
  }
  values[0] = values[0].real().cast<linalg::Complex>();
  values[static_cast<std::size_t>(grid_size / 2)] =
      values[static_cast<std::size_t>(grid_size / 2)].real().cast<linalg::Complex>();
  return SpectralModel(n, p, std::move(mean), std::move(values));
}

SpectralModel SpectralModel::constant(const JointGaussian& model, int grid_size) {
  std::vector<CMatrix> values(static_cast<std::size_t>(std::max(grid_size, 0)),
                              model.cov().cast<linalg::Complex>());
  return SpectralModel(model.n(), model.p(), model.mean(), std::move(values));
}

TauBall TauBall::hard(double tau, double c) {
  require_tau(tau);
  if (!(c >= 0.0) || !std::isfinite(c)) {
    std::ostringstream out;
    out << "tolerance c must be a finite nonnegative number, got " << c;
    throw ValidationError(out.str());
  }
  return TauBall(tau, HardBound{c});
}

TauBall TauBall::soft(double tau, double lambda) {
  require_tau(tau);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    std::ostringstream out;
    out << "multiplier lambda must be a finite positive number, got " << lambda;
    throw ValidationError(out.str());
  }
  return TauBall(tau, SoftPenalty{lambda});
}

}  // namespace taurob
