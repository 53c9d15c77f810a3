#include "taurob/linalg.hpp"

#include <cmath>
#include <sstream>

#include "taurob/errors.hpp"

namespace taurob::linalg {

namespace {

template <typename M>
bool is_self_adjoint(const M& a, double rel_tol) {
  if (a.rows() != a.cols() || a.rows() == 0) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

template <typename M>
void require_self_adjoint(const M& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream out;
    out << what << " must be square and non-empty, got " << a.rows() << "x"
        << a.cols();
    throw ValidationError(out.str());
  }
  if (!is_self_adjoint(a, kSymmetryTol)) {
    throw ValidationError(std::string(what) + " is not " +
                          (std::is_same_v<typename M::Scalar, double>
                               ? "symmetric"
                               : "Hermitian"));
  }
}

template <typename M>
EigenPair<typename M::Scalar> eigen_impl(const M& a) {
  require_self_adjoint(a, "matrix");
  Eigen::SelfAdjointEigenSolver<M> solver(symmetrize(a));
  if (solver.info() != Eigen::Success) {
    throw DomainError("eigendecomposition did not converge");
  }
  // Eigen returns ascending order.
  EigenPair<typename M::Scalar> out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

template <typename M>
M apply_impl(const M& a, const ScalarFunction& f) {
  const auto pair = eigen_impl(a);
  Vector mapped(pair.values.size());
  for (Eigen::Index i = 0; i < pair.values.size(); ++i) {
    mapped(i) = f(pair.values(i));
    if (!std::isfinite(mapped(i))) {
      std::ostringstream out;
      out.precision(17);
      out << "spectral function undefined at eigenvalue " << pair.values(i);
      throw DomainError(out.str());
    }
  }
  M result = pair.vectors * mapped.asDiagonal() * pair.vectors.adjoint();
  return symmetrize(result);
}

template <typename M>
bool pd_impl(const M& a) {
  const Vector d = eigen_impl(a).values;
  const double top = d(0);
  return top > 0.0 && d(d.size() - 1) > kPdRatio * top;
}

template <typename M>
[[noreturn]] void throw_not_pd(const M& a) {
  const Vector d = eigen_impl(a).values;
  std::ostringstream out;
  out.precision(17);
  out << "matrix is not positive definite: minimum eigenvalue " << d(d.size() - 1)
      << ", maximum eigenvalue " << d(0);
  throw DomainError(out.str());
}

}  // namespace

bool is_symmetric(const Matrix& a, double rel_tol) { return is_self_adjoint(a, rel_tol); }
bool is_hermitian(const CMatrix& a, double rel_tol) { return is_self_adjoint(a, rel_tol); }

RealEigenPair eigen(const Matrix& a) { return eigen_impl(a); }
ComplexEigenPair eigen(const CMatrix& a) { return eigen_impl(a); }

Vector eigenvalues(const Matrix& a) {
  require_self_adjoint(a, "matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

Vector eigenvalues(const CMatrix& a) {
  require_self_adjoint(a, "matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(symmetrize(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

bool is_positive_definite(const Matrix& a) { return pd_impl(a); }
bool is_positive_definite(const CMatrix& a) { return pd_impl(a); }

double spectral_norm(const Matrix& a) { return eigenvalues(a).cwiseAbs().maxCoeff(); }
double spectral_norm(const CMatrix& a) { return eigenvalues(a).cwiseAbs().maxCoeff(); }

Matrix apply_spectral_function(const Matrix& a, const ScalarFunction& f) {
  return apply_impl(a, f);
}

CMatrix apply_spectral_function(const CMatrix& a, const ScalarFunction& f) {
  return apply_impl(a, f);
}

Matrix square_root_factor(const Matrix& a) {
  if (!pd_impl(a)) throw_not_pd(a);
  Eigen::LLT<Matrix> llt(symmetrize(a));
  if (llt.info() != Eigen::Success) throw_not_pd(a);
  return llt.matrixL();
}

CMatrix square_root_factor(const CMatrix& a) {
  if (!pd_impl(a)) throw_not_pd(a);
  return apply_impl(a, [](double x) { return std::sqrt(x); });
}

Matrix spd_inverse(const Matrix& a) {
  Eigen::LLT<Matrix> llt(symmetrize(a));
  if (llt.info() != Eigen::Success) throw_not_pd(a);
  return symmetrize(Matrix(llt.solve(Matrix::Identity(a.rows(), a.cols()))));
}

}  // namespace taurob::linalg
