#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "kclind/errors.hpp"

namespace kclind {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Default tolerances for state validation. Callers can override per call.
namespace tol {
inline constexpr double herm = 1e-10;   // max |rho - rho^dag| entry
inline constexpr double trace = 1e-10;  // |Tr rho - 1|
inline constexpr double psd = 1e-9;     // eigenvalues below -psd are fatal
inline constexpr double null_rel = 1e-10;  // kernel cutoff, relative
}  // namespace tol

bool all_finite(const Matrix& m);

// max_ij |m_ij|
double max_abs(const Matrix& m);

// max_ij |(m - m^dag)_ij|
double hermiticity_defect(const Matrix& m);

bool is_hermitian(const Matrix& m, double tolerance = tol::herm);

// Kronecker product a (x) b; index convention (i*rows_b + k, j*cols_b + l),
// i.e. the left factor owns the slow index.
Matrix kron(const Matrix& a, const Matrix& b);

enum class Subsystem { A, B };

// Partial trace of a dim_a*dim_b square matrix over the discarded factor.
// The raw overload accepts any matrix (conditional states are subnormalized);
// the DensityMatrix overload revalidates the result.
Matrix partial_trace(const Matrix& joint, Subsystem keep, Index dim_a, Index dim_b);

// Column-stacking vectorization: vec(m) stacks columns top to bottom, so
// vec(X rho Y) = (Y^T (x) X) vec(rho). All superoperators below use this
// convention.
Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v);

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns, vectors.col(k) <-> values[k]
};

// Eigendecomposition of a Hermitian matrix. Throws ToleranceError if the
// input fails the Hermiticity check; the symmetrized (m + m^dag)/2 is what
// gets decomposed.
Eigensystem hermitian_eigensystem(const Matrix& m, double tolerance = tol::herm);

// Principal square root of a Hermitian PSD matrix. Eigenvalue dust in
// (-clamp_tol, 0) is clamped to zero; anything lower throws.
Matrix psd_sqrt(const Matrix& m, double clamp_tol = tol::psd);

// exp(m) for a general square complex matrix (scaling-and-squaring Pade).
Matrix matrix_exp(const Matrix& m);

// Validated density matrix: square, finite, Hermitian, unit trace, PSD —
// each within an explicit tolerance. Eigenvalue dust in (-psd_tol, 0) is
// clamped (the matrix is reconstructed); violations beyond tolerance throw
// ToleranceError. Exactly-valid inputs are stored bit-identically.
class DensityMatrix {
public:
  explicit DensityMatrix(Matrix m, double herm_tol = tol::herm,
                         double trace_tol = tol::trace, double psd_tol = tol::psd);

  static DensityMatrix pure(const Vector& psi);

  // Uniform mixture I/d.
  static DensityMatrix maximally_mixed(Index dim);

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

private:
  Matrix m_;
};

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep, Index dim_a,
                            Index dim_b);

// Linear map on operators, stored as a dim^2 x dim^2 matrix acting on
// column-stacked vec(rho).
class Superoperator {
public:
  explicit Superoperator(Matrix m);

  static Superoperator zero(Index dim);

  // Hilbert-space dimension d (the stored matrix is d^2 x d^2).
  Index dim() const { return dim_; }
  const Matrix& matrix() const { return m_; }

  Matrix apply(const Matrix& rho) const;

  Superoperator& operator+=(const Superoperator& other);

private:
  Matrix m_;
  Index dim_;
};

// Superoperator of the similarity map rho -> x rho y, i.e. y^T (x) x.
Matrix left_right_product(const Matrix& x, const Matrix& y);

// Superoperator matrix of the unit-rate Lindblad dissipator of jump operator
// v: rho -> v rho v^dag - 1/2 {v^dag v, rho}.
Matrix lindblad_dissipator(const Matrix& v);

}  // namespace kclind
