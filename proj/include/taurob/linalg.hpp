#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace taurob::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Symmetric / Hermitian tolerance, relative to the largest entry.
inline constexpr double kSymmetryTol = 1e-12;
// A is positive definite when min eig > kPdRatio * max eig (and max eig > 0).
inline constexpr double kPdRatio = 1e-12;

template <typename Scalar>
struct EigenPair {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
  Vector values;  // descending
};

using RealEigenPair = EigenPair<double>;
using ComplexEigenPair = EigenPair<Complex>;

bool is_symmetric(const Matrix& a, double rel_tol = kSymmetryTol);
bool is_hermitian(const CMatrix& a, double rel_tol = kSymmetryTol);

// Throws ValidationError if the input is not square and symmetric/Hermitian.
RealEigenPair eigen(const Matrix& a);
ComplexEigenPair eigen(const CMatrix& a);

// Eigenvalues only, descending.
Vector eigenvalues(const Matrix& a);
Vector eigenvalues(const CMatrix& a);

bool is_positive_definite(const Matrix& a);
bool is_positive_definite(const CMatrix& a);

// Largest eigenvalue magnitude; equals the spectral norm for symmetric input.
double spectral_norm(const Matrix& a);
double spectral_norm(const CMatrix& a);

using ScalarFunction = std::function<double(double)>;

// V * diag(f(d_i)) * V^*. Throws DomainError when f is not finite on some
// eigenvalue.
Matrix apply_spectral_function(const Matrix& a, const ScalarFunction& f);
CMatrix apply_spectral_function(const CMatrix& a, const ScalarFunction& f);

// Lower-triangular Cholesky factor L with L L^T = A.
Matrix square_root_factor(const Matrix& a);
// Hermitian square root G with G G^* = A.
CMatrix square_root_factor(const CMatrix& a);

// Forces exact symmetry by averaging with the (conjugate) transpose.
template <typename Derived>
typename Derived::PlainObject symmetrize(const Eigen::MatrixBase<Derived>& a) {
  typename Derived::PlainObject m = a;
  return 0.5 * (m + m.adjoint());
}

// Inverse of a symmetric positive definite matrix.
Matrix spd_inverse(const Matrix& a);

}  // namespace taurob::linalg
