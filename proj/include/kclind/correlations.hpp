#pragma once

#include "kclind/algebra.hpp"

namespace kclind {

// Wootters concurrence of a two-qubit state, computed through the Hermitian
// route: the square roots of the eigenvalues of rho rho~ are the eigenvalues
// of sqrt(sqrt(rho) rho~ sqrt(rho)), with the spin flip
// rho~ = (sigma_y (x) sigma_y) conj(rho) (sigma_y (x) sigma_y).
double concurrence(const DensityMatrix& rho);

// von Neumann entropy in bits (base-2 logarithm).
double entropy(const DensityMatrix& rho);

// I(A:B) = S(A) + S(B) - S(AB) for a two-qubit state.
double mutual_information(const DensityMatrix& rho);

// Projective measurement direction on the Bloch sphere:
//   |n+> = cos(theta/2)|+> + e^{i phi} sin(theta/2)|->,
//   |n-> = -sin(theta/2)|+> + e^{i phi} cos(theta/2)|->.
struct MeasurementDirection {
  double theta = 0.0;
  double phi = 0.0;
};

enum class MeasuredSide { B, A };

// Measurement-conditioned entropy sum_{s=+-} p_s S(rho_{other|s}) for the
// projective measurement along `direction` on the given side.
double conditional_entropy(const DensityMatrix& rho, const MeasurementDirection& direction,
                           MeasuredSide side = MeasuredSide::B);

struct OptimizedCorrelation {
  double value = 0.0;
  MeasurementDirection direction;  // the optimizing measurement
};

// Classical correlation Q = S(rho_A) - min_n sum p_s S(rho_{A|s}) with the
// minimum over all projective measurements on B (64x64 coarse grid over
// [0, pi] x [0, 2 pi), then coordinate-wise golden-section refinement to a
// step below 1e-7).
OptimizedCorrelation classical_correlation(const DensityMatrix& rho,
                                           MeasuredSide side = MeasuredSide::B);

// Quantum discord D = I(A:B) - Q, sharing the same optimized measurement so
// Q + D = I holds by construction.
OptimizedCorrelation discord(const DensityMatrix& rho, MeasuredSide side = MeasuredSide::B);

struct CorrelationReport {
  double concurrence = 0.0;
  double mutual_information = 0.0;
  double classical = 0.0;
  double discord = 0.0;
  double entropy_a = 0.0;
  double entropy_b = 0.0;
  double entropy_ab = 0.0;
  MeasurementDirection direction;
};

// All of the above from a single optimizer run.
CorrelationReport correlation_report(const DensityMatrix& rho,
                                     MeasuredSide side = MeasuredSide::B);

}  // namespace kclind
