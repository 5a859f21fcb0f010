#pragma once

#include <optional>
#include <vector>

#include "kclind/algebra.hpp"

namespace kclind {

struct PropagateOptions {
  enum class Method {
    MatrixExp,  // exact semigroup stepping, exp(L dt) per unique step
    Rk4,        // fixed-step classical Runge-Kutta (cross-check path)
  };
  Method method = Method::MatrixExp;
  double rk4_step = 1e-3;

  // Per-state revalidation; trajectories tolerate more drift than
  // freshly-built states.
  double herm_tol = 1e-9;
  double trace_tol = 1e-9;
  double psd_tol = 1e-8;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

// Evolve the initial state to each requested time (absolute, measured from
// the initial state; must be non-negative and non-decreasing). Every state
// is revalidated; drift beyond the options' tolerances throws.
Trajectory propagate(const Superoperator& liouvillian, const DensityMatrix& initial,
                     const std::vector<double>& times, const PropagateOptions& options = {});

// Uniform grid [0, t_max] with n points (n >= 2).
std::vector<double> time_grid(double t_max, int n);

struct SteadyStateResult {
  int null_dimension = 0;
  // Orthonormal kernel vectors of L, unvectorized; null-space elements need
  // not individually be states.
  std::vector<Matrix> null_basis;
  // Present only when the kernel is one-dimensional.
  std::optional<DensityMatrix> state;
  double residual = 0.0;        // max |L[state]| entry, 0 when no unique state
  RealVector singular_values;   // of L, ascending
  double gap_ratio = 0.0;       // smallest surviving singular value over largest
                                // kernel one (inf when the kernel is exact)
};

// Kernel analysis of the generator via the Hermitian eigenproblem of L^dag L.
// Eigenvalues of L^dag L below tol_rel times the largest count as kernel.
SteadyStateResult steady_states(const Superoperator& liouvillian,
                                double tol_rel = tol::null_rel);

// Long-time limit reached by repeated squaring of exp(L t0): the state at
// t0, 2 t0, 4 t0, ... until successive states differ by less than tolerance
// (max-abs entry). Throws ToleranceError if max_doublings is exhausted.
DensityMatrix stationary_from_initial(const Superoperator& liouvillian,
                                      const DensityMatrix& initial, double t0 = 1.0,
                                      double tolerance = 1e-10, int max_doublings = 60);

// Closed-form stationary state of the undriven constrained two-qubit model:
// an X-matrix determined by the conserved quantities p = <++|rho(0)|++> and
// c = <++|rho(0)|-->.
struct AnalyticStationary {
  double p = 0.0;
  Complex c{0.0, 0.0};

  Matrix matrix() const;
  DensityMatrix state() const;
};

AnalyticStationary analytic_stationary(const DensityMatrix& initial);

// First-order (in delta_omega) stationary matrix of the driven model with
// gamma_A = gamma_B = gamma and Rabi asymmetry delta_omega =
// (Omega_A - Omega_B)/2, in the product basis {|++>, |+->, |-+>, |-->}.
// Independent of the mean Rabi frequency at this order. Hermitian with unit
// trace but NOT positive semidefinite (the truncation has a -4(delta/gamma)^2
// eigenvalue), hence returned raw rather than as a DensityMatrix.
Matrix perturbative_stationary(double gamma, double delta_omega);

}  // namespace kclind
