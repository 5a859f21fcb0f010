#pragma once

#include <optional>
#include <vector>

#include "kclind/algebra.hpp"

namespace kclind {

// Conventions used throughout:
//   - single-qubit basis {|+>, |->} with |+> at index 0 (excited first);
//   - joint basis |a> (x) |b> at index a*dim_b + b, so for two qubits the
//     order is {|++>, |+->, |-+>, |-->};
//   - sigma = |-><+| lowers the qubit, proj_minus = |-><-|.

enum class QubitOp {
  Identity,
  SigmaMinus,  // |-><+|
  SigmaPlus,   // |+><-|
  SigmaX,
  SigmaY,
  SigmaZ,      // diag(+1, -1)
  ProjPlus,    // |+><+|
  ProjMinus,   // |-><-|
  ProjXPlus,   // |x+><x+|, |x+> = (|+> + |->)/sqrt(2)
  ProjXMinus,
};

Matrix qubit_operator(QubitOp op);

// One dissipative channel acting on a single subsystem, gated by a projector
// on the partner: the joint jump operator is op (x) constraint (channel on A)
// or constraint (x) op (channel on B). constraint = identity means
// unconstrained.
struct DissipativeChannel {
  Matrix op;
  double rate = 0.0;
  Matrix constraint;

  DissipativeChannel(Matrix op_, double rate_, Matrix constraint_);
};

struct BipartiteModel {
  Index dim_a = 2;
  Index dim_b = 2;
  Matrix hamiltonian;                         // joint, (dim_a*dim_b)^2 entries
  std::vector<DissipativeChannel> channels_a; // ops on A, constraints on B
  std::vector<DissipativeChannel> channels_b; // ops on B, constraints on A
};

// Validates dimensions, Hamiltonian Hermiticity (1e-12), rate positivity and
// that every constraint is a projector (P^2 = P = P^dag within 1e-12).
void validate(const BipartiteModel& model);

// Lindblad generator as a superoperator on vec(rho):
//   L = -i(I (x) H - H^T (x) I)
//     + sum_c rate_c [ conj(V_c) (x) V_c
//                      - 1/2 I (x) V_c^dag V_c - 1/2 (V_c^dag V_c)^T (x) I ]
// with V = op (x) constraint for channels_a and constraint (x) op for
// channels_b.
Superoperator build_liouvillian(const BipartiteModel& model);

enum class ConstraintKind {
  None,        // ordinary local decay, no gating
  MinusMinus,  // each decay gated by the partner's |-><-|
  PlusPlus,    // gated by |+><+|
  XBasis,      // gated by |x+><x+| (deliberately non-classical)
};

struct TwoQubitConfig {
  double gamma_a = 1.0;
  double gamma_b = 1.0;
  ConstraintKind constraint = ConstraintKind::MinusMinus;
  double omega_a = 0.0;   // Rabi drive (omega/2) sigma_x per qubit
  double omega_b = 0.0;
  double detuning = 0.0;  // omega_A - omega_B; adds (detuning/2)(sz (x) I - I (x) sz)
};

// The two-qubit model studied here: sigma-decay on each qubit, each gated by
// a projector on its partner, plus optional resonant Rabi drives.
BipartiteModel build_two_qubit_model(const TwoQubitConfig& config);

// Bloch-sphere qubit state rho = (I + lambda * sigma_n)/2 with
// sigma_n = [[cos(theta), sin(theta) e^{-i phi}], [sin(theta) e^{+i phi},
// -cos(theta)]]. |lambda| <= 1; lambda < 0 flips the direction.
struct BlochParams {
  double lambda = 1.0;
  double theta = 0.0;
  double phi = 0.0;
};

DensityMatrix bloch_state(const BlochParams& p);

DensityMatrix product_state(const DensityMatrix& a, const DensityMatrix& b);

enum class Bell { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

// |Phi+-> = (+-|++> + |-->)/sqrt(2), |Psi+-> = (+-|+-> + |-+>)/sqrt(2).
Vector bell_vector(Bell which);
DensityMatrix bell_state(Bell which);

// Unitary whose columns are the collective states
// {|++>, |Psi+>, |Psi->, |-->} expressed in the product basis.
Matrix collective_basis_unitary();

// U^dag m U: product-basis operator re-expressed in the collective basis.
Matrix to_collective_basis(const Matrix& m);
Matrix from_collective_basis(const Matrix& m);

}  // namespace kclind
