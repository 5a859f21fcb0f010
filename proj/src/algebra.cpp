#include "kclind/algebra.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace kclind {

bool all_finite(const Matrix& m) { return m.allFinite(); }

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

bool is_hermitian(const Matrix& m, double tolerance) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tolerance;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

Matrix partial_trace(const Matrix& joint, Subsystem keep, Index dim_a, Index dim_b) {
  if (dim_a < 1 || dim_b < 1 || joint.rows() != dim_a * dim_b ||
      joint.cols() != dim_a * dim_b) {
    throw ConfigError("partial_trace: matrix is not dim_a*dim_b square");
  }
  if (keep == Subsystem::A) {
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (Index i = 0; i < dim_a; ++i)
      for (Index j = 0; j < dim_a; ++j)
        for (Index b = 0; b < dim_b; ++b) out(i, j) += joint(i * dim_b + b, j * dim_b + b);
    return out;
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (Index i = 0; i < dim_b; ++i)
    for (Index j = 0; j < dim_b; ++j)
      for (Index a = 0; a < dim_a; ++a) out(i, j) += joint(a * dim_b + i, a * dim_b + j);
  return out;
}

Vector vectorize(const Matrix& m) {
  // Eigen is column-major, so the flat view is already column-stacked.
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvectorize(const Vector& v) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) {
    throw ConfigError("unvectorize: length is not a perfect square");
  }
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Eigensystem hermitian_eigensystem(const Matrix& m, double tolerance) {
  if (m.rows() != m.cols()) {
    throw ConfigError("hermitian_eigensystem: matrix is not square");
  }
  const double defect = hermiticity_defect(m);
  if (defect > tolerance) {
    std::ostringstream msg;
    msg << "hermitian_eigensystem: Hermiticity defect " << defect << " exceeds " << tolerance;
    throw ToleranceError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success) {
    throw ToleranceError("hermitian_eigensystem: eigensolver failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix psd_sqrt(const Matrix& m, double clamp_tol) {
  Eigensystem es = hermitian_eigensystem(m);
  RealVector lam = es.values;
  for (Index k = 0; k < lam.size(); ++k) {
    if (lam[k] < -clamp_tol) {
      std::ostringstream msg;
      msg << "psd_sqrt: eigenvalue " << lam[k] << " below -" << clamp_tol;
      throw ToleranceError(msg.str());
    }
    lam[k] = std::sqrt(std::max(lam[k], 0.0));
  }
  return es.vectors * lam.asDiagonal() * es.vectors.adjoint();
}

Matrix matrix_exp(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw ConfigError("matrix_exp: matrix is not square");
  }
  if (!all_finite(m)) {
    throw ToleranceError("matrix_exp: non-finite entries");
  }
  return m.exp();
}

DensityMatrix::DensityMatrix(Matrix m, double herm_tol, double trace_tol, double psd_tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ConfigError("DensityMatrix: matrix is not square");
  }
  if (!all_finite(m)) {
    throw ToleranceError("DensityMatrix: non-finite entries");
  }
  const double defect = hermiticity_defect(m);
  if (defect > herm_tol) {
    std::ostringstream msg;
    msg << "DensityMatrix: Hermiticity defect " << defect << " exceeds " << herm_tol;
    throw ToleranceError(msg.str());
  }
  // For exactly Hermitian input this is bit-identical to m.
  m = (m + m.adjoint().eval()) / 2.0;
  const double trace_err = std::abs(m.trace() - Complex(1.0, 0.0));
  if (trace_err > trace_tol) {
    std::ostringstream msg;
    msg << "DensityMatrix: |trace - 1| = " << trace_err << " exceeds " << trace_tol;
    throw ToleranceError(msg.str());
  }
  Eigensystem es = hermitian_eigensystem(m, herm_tol);
  const double min_eig = es.values.minCoeff();
  if (min_eig < -psd_tol) {
    std::ostringstream msg;
    msg << "DensityMatrix: eigenvalue " << min_eig << " below -" << psd_tol;
    throw ToleranceError(msg.str());
  }
  if (min_eig < 0.0) {
    // Clamp eigenvalue dust; only then does the matrix get reconstructed.
    RealVector lam = es.values.cwiseMax(0.0);
    m = es.vectors * lam.asDiagonal() * es.vectors.adjoint();
    m = (m + m.adjoint().eval()) / 2.0;
  }
  m_ = std::move(m);
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double n = psi.norm();
  if (n <= 0.0 || !psi.allFinite()) {
    throw ToleranceError("DensityMatrix::pure: state vector has no norm");
  }
  Vector u = psi / n;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep, Index dim_a,
                            Index dim_b) {
  return DensityMatrix(partial_trace(rho.matrix(), keep, dim_a, dim_b));
}

Superoperator::Superoperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw ConfigError("Superoperator: matrix is not square");
  }
  dim_ = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m_.rows()))));
  if (dim_ * dim_ != m_.rows()) {
    throw ConfigError("Superoperator: side length is not a perfect square");
  }
  if (!all_finite(m_)) {
    throw ToleranceError("Superoperator: non-finite entries");
  }
}

Superoperator Superoperator::zero(Index dim) {
  return Superoperator(Matrix::Zero(dim * dim, dim * dim));
}

Matrix Superoperator::apply(const Matrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) {
    throw ConfigError("Superoperator::apply: operand dimension mismatch");
  }
  return unvectorize(m_ * vectorize(rho));
}

Superoperator& Superoperator::operator+=(const Superoperator& other) {
  if (other.dim_ != dim_) {
    throw ConfigError("Superoperator::operator+=: dimension mismatch");
  }
  m_ += other.m_;
  return *this;
}

Matrix left_right_product(const Matrix& x, const Matrix& y) {
  return kron(y.transpose(), x);
}

Matrix lindblad_dissipator(const Matrix& v) {
  const Index d = v.rows();
  if (d != v.cols()) {
    throw ConfigError("lindblad_dissipator: jump operator is not square");
  }
  const Matrix id = Matrix::Identity(d, d);
  const Matrix vdv = v.adjoint() * v;
  return kron(v.conjugate(), v) - 0.5 * kron(id, vdv) - 0.5 * kron(vdv.transpose(), id);
}

}  // namespace kclind
