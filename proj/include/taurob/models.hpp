#pragma once

#include <string>
#include <variant>
#include <vector>

#include "taurob/linalg.hpp"

namespace taurob {

using linalg::CMatrix;
using linalg::Matrix;
using linalg::Vector;

// Conformal partition of a joint covariance over z = [x; y].
template <typename M>
struct CovBlocks {
  M x;   // n x n
  M xy;  // n x p
  M yx;  // p x n, adjoint of xy
  M y;   // p x p
};

using RealBlocks = CovBlocks<Matrix>;
using ComplexBlocks = CovBlocks<CMatrix>;

template <typename M>
CovBlocks<M> split_blocks(const M& cov, Eigen::Index n) {
  const Eigen::Index p = cov.rows() - n;
  return {cov.topLeftCorner(n, n), cov.topRightCorner(n, p), cov.topRightCorner(n, p).adjoint(),
          cov.bottomRightCorner(p, p)};
}

template <typename M>
M assemble_blocks(const CovBlocks<M>& b) {
  const Eigen::Index n = b.x.rows();
  const Eigen::Index p = b.y.rows();
  M out(n + p, n + p);
  out << b.x, b.xy, b.yx, b.y;
  return out;
}

// Lists every violated invariant of a joint Gaussian description; empty when
// the description is valid.
std::vector<std::string> validation_issues(int n, int p, const Vector& mean, const Matrix& cov);

// Nominal or actual Gaussian law of z = [x; y], with x of size n and y of
// size p. Always holds a validated, positive definite covariance.
class JointGaussian {
 public:
  JointGaussian(int n, int p, Vector mean, Matrix cov);

  int n() const noexcept { return n_; }
  int p() const noexcept { return p_; }
  int dim() const noexcept { return n_ + p_; }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }
  Vector mean_x() const { return mean_.head(n_); }
  Vector mean_y() const { return mean_.tail(p_); }

  RealBlocks blocks() const { return split_blocks(cov_, n_); }

 private:
  int n_;
  int p_;
  Vector mean_;
  Matrix cov_;
};

// Actual law paired with the nominal one it is compared against.
struct GaussianPair {
  JointGaussian nominal;
  JointGaussian actual;

  GaussianPair(JointGaussian nominal_law, JointGaussian actual_law);
};

inline constexpr int kDefaultGridSize = 1024;
inline constexpr double kConjugateSymmetryTol = 1e-10;

// Shaping-filter description of a spectrum: Sigma(theta) = W W^* with
// W_ij(theta) = num_ij(e^{-i theta}) / den_ij(e^{-i theta}), coefficient
// lists in increasing powers of e^{-i theta}. W is q x r.
struct ArmaSpectrum {
  std::vector<std::vector<std::vector<double>>> num;
  std::vector<std::vector<std::vector<double>>> den;
};

std::vector<std::string> validation_issues(int n, int p, const Vector& mean,
                                           const std::vector<CMatrix>& values);

// Nominal or actual stationary Gaussian process: mean vector plus samples of
// the continuous part of the spectral density on theta_k = 2 pi k / M.
// The spectral line at theta = 0 from the mean is carried by mean() only.
class SpectralModel {
 public:
  SpectralModel(int n, int p, Vector mean, std::vector<CMatrix> values);

  static SpectralModel from_arma(int n, int p, Vector mean, const ArmaSpectrum& arma,
                                 int grid_size = kDefaultGridSize);
  // Flat spectrum equal to the covariance of a static model.
  static SpectralModel constant(const JointGaussian& model, int grid_size = kDefaultGridSize);

  int n() const noexcept { return n_; }
  int p() const noexcept { return p_; }
  int dim() const noexcept { return n_ + p_; }
  int grid_size() const noexcept { return static_cast<int>(values_.size()); }
  const Vector& mean() const noexcept { return mean_; }
  const std::vector<CMatrix>& values() const noexcept { return values_; }
  const CMatrix& at(int k) const { return values_.at(static_cast<std::size_t>(k)); }
  double theta(int k) const;

  ComplexBlocks blocks(int k) const { return split_blocks(at(k), n_); }

 private:
  int n_;
  int p_;
  Vector mean_;
  std::vector<CMatrix> values_;
};

CMatrix evaluate_arma(const ArmaSpectrum& arma, double theta);

// Uncertainty ball: either a hard divergence bound c or a fixed multiplier
// lambda for the soft-constraint (penalized) problem.
struct HardBound {
  double c;
};
struct SoftPenalty {
  double lambda;
};

class TauBall {
 public:
  // c == 0 is accepted and denotes the degenerate ball {nominal}.
  static TauBall hard(double tau, double c);
  static TauBall soft(double tau, double lambda);

  double tau() const noexcept { return tau_; }
  bool is_hard() const noexcept { return std::holds_alternative<HardBound>(mode_); }
  double c() const { return std::get<HardBound>(mode_).c; }
  double lambda() const { return std::get<SoftPenalty>(mode_).lambda; }

 private:
  TauBall(double tau, std::variant<HardBound, SoftPenalty> mode) : tau_(tau), mode_(mode) {}

  double tau_;
  std::variant<HardBound, SoftPenalty> mode_;
};

void require_tau(double tau);

}  // namespace taurob
