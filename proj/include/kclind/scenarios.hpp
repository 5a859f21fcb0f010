#pragma once

#include <string>

#include "kclind/classicality.hpp"
#include "kclind/config.hpp"
#include "kclind/correlations.hpp"
#include "kclind/csv.hpp"
#include "kclind/propagator.hpp"

namespace kclind {

DensityMatrix build_initial_state(const InitialStateSpec& spec);

// First time the trajectory's concurrence exceeds `threshold`, refined by
// bisection (to width refine_tol) between the bracketing grid points; the
// generator provides the off-grid states the refinement needs. detected is
// false when the whole trajectory stays below threshold.
struct BirthTimeResult {
  double tau0 = 0.0;
  bool detected = false;
  double threshold = 0.0;
};

BirthTimeResult birth_time(const Superoperator& liouvillian, const Trajectory& trajectory,
                           double threshold = 1e-9, double refine_tol = 1e-6);

// Stationary concurrence maximized over product initial states
// rho(lambda_a, theta_a, phi_a) (x) rho(lambda_b, ...) of the undriven
// constrained model, on a full grid (lambda in [-cap, cap], theta in [0, pi]
// inclusive, phi in [0, 2 pi)). Ties keep the lowest flat grid index, so the
// result is thread-count independent.
struct SeparableMaxResult {
  double max_concurrence = 0.0;
  BlochParams a;
  BlochParams b;
};

SeparableMaxResult separable_max_scan(int lambda_points, int theta_points, int phi_points,
                                      double lambda_cap = 1.0, int threads = 1);

// Stationary concurrence of the driven model at Omega_{A,B} = omega +- delta
// for each delta, and the least-squares coefficient kappa of the law
// 1 - C = kappa * delta^2.
struct AsymmetryFitResult {
  double kappa = 0.0;
  std::vector<double> deltas;
  std::vector<double> concurrences;
};

AsymmetryFitResult asymmetry_law_fit(double gamma, double omega,
                                     const std::vector<double>& deltas);

struct ScenarioResult {
  CsvTable table;
  std::string summary_json;
};

// Produces the table (and a small JSON summary) for the configured scenario.
// Deterministic: rows are assembled in index order whatever cfg.threads is.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

}  // namespace kclind
