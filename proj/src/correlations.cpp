#include "kclind/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kclind {

namespace {

void require_two_qubits(const DensityMatrix& rho, const char* who) {
  if (rho.dim() != 4) {
    throw ConfigError(std::string(who) + ": two-qubit states only");
  }
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// sigma_y (x) sigma_y is real: antidiag(-1, 1, 1, -1).
Matrix spin_flip_conjugator() {
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  return yy;
}

// Eigenvalues of a 2x2 Hermitian matrix, closed form. The optimizer calls
// this millions of times per trajectory, so no solver object here.
void eig2(const Matrix& m, double& lo, double& hi) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double h = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
  lo = mean - h;
  hi = mean + h;
}

double entropy2(const Matrix& m, double norm) {
  double lo, hi;
  eig2(m, lo, hi);
  return -xlog2x(std::max(lo, 0.0) / norm) - xlog2x(std::max(hi, 0.0) / norm);
}

// Conditional 2x2 block of the unmeasured side, unnormalized:
// out[a, a'] = <n| rho_block(a, a') |n> for a measurement on B, and the
// transposed indexing for a measurement on A.
Matrix project_out(const Matrix& rho, const Vector& n, MeasuredSide side) {
  Matrix out(2, 2);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      Complex acc = 0.0;
      for (Index b1 = 0; b1 < 2; ++b1) {
        for (Index b2 = 0; b2 < 2; ++b2) {
          const Complex weight = std::conj(n[b1]) * n[b2];
          acc += weight * (side == MeasuredSide::B ? rho(i * 2 + b1, j * 2 + b2)
                                                   : rho(b1 * 2 + i, b2 * 2 + j));
        }
      }
      out(i, j) = acc;
    }
  }
  return out;
}

struct GoldenResult {
  double x;
  double value;
};

// Golden-section minimization over [lo, hi] down to interval width `tol`.
template <typename F>
GoldenResult golden_minimize(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? GoldenResult{x1, f1} : GoldenResult{x2, f2};
}

struct MinimizedEntropy {
  double value;
  MeasurementDirection direction;
};

MinimizedEntropy minimize_conditional_entropy(const DensityMatrix& rho, MeasuredSide side) {
  const auto eval = [&](double theta, double phi) {
    return conditional_entropy(rho, {theta, phi}, side);
  };

  constexpr int kGrid = 64;
  const double dtheta = M_PI / (kGrid - 1);
  const double dphi = 2.0 * M_PI / kGrid;

  MinimizedEntropy best{std::numeric_limits<double>::infinity(), {}};
  for (int i = 0; i < kGrid; ++i) {
    const double theta = i * dtheta;
    for (int j = 0; j < kGrid; ++j) {
      const double phi = j * dphi;
      const double v = eval(theta, phi);
      if (v < best.value) best = {v, {theta, phi}};
    }
  }

  // Coordinate-wise golden-section passes around the grid winner. The
  // parametrization is smooth for arguments outside the fundamental domain,
  // so the brackets need no clamping.
  constexpr double kStep = 1e-7;
  for (int round = 0; round < 8; ++round) {
    const double before = best.value;
    GoldenResult t = golden_minimize(
        [&](double th) { return eval(th, best.direction.phi); },
        best.direction.theta - dtheta, best.direction.theta + dtheta, kStep);
    if (t.value < best.value) best = {t.value, {t.x, best.direction.phi}};
    GoldenResult p = golden_minimize(
        [&](double ph) { return eval(best.direction.theta, ph); },
        best.direction.phi - dphi, best.direction.phi + dphi, kStep);
    if (p.value < best.value) best = {p.value, {best.direction.theta, p.x}};
    if (before - best.value < 1e-13) break;
  }
  return best;
}

}  // namespace

double concurrence(const DensityMatrix& rho) {
  require_two_qubits(rho, "concurrence");
  static const Matrix yy = spin_flip_conjugator();
  const Matrix flipped = yy * rho.matrix().conjugate() * yy;
  const Matrix root = psd_sqrt(rho.matrix());
  // Hermitian stand-in for rho rho~: same spectrum, no unsymmetric solve.
  const Matrix core = root * flipped * root;
  Eigensystem es = hermitian_eigensystem(core, 1e-9);
  // The spectrum lives in [0, 1]; rounding leaves O(eps) dust on zero
  // eigenvalues, which the square root would inflate to O(sqrt(eps)). An
  // absolute floor keeps separable states at exactly zero.
  constexpr double kDust = 1e-13;
  RealVector mu = es.values;
  for (Index k = 0; k < mu.size(); ++k) {
    mu[k] = mu[k] < kDust ? 0.0 : std::sqrt(mu[k]);
  }
  const double c = mu[3] - mu[2] - mu[1] - mu[0];
  return std::max(c, 0.0);
}

double entropy(const DensityMatrix& rho) {
  Eigensystem es = hermitian_eigensystem(rho.matrix());
  double s = 0.0;
  for (Index k = 0; k < es.values.size(); ++k) {
    s -= xlog2x(std::max(es.values[k], 0.0));
  }
  return s;
}

double mutual_information(const DensityMatrix& rho) {
  require_two_qubits(rho, "mutual_information");
  const DensityMatrix a = partial_trace(rho, Subsystem::A, 2, 2);
  const DensityMatrix b = partial_trace(rho, Subsystem::B, 2, 2);
  return entropy(a) + entropy(b) - entropy(rho);
}

double conditional_entropy(const DensityMatrix& rho, const MeasurementDirection& direction,
                           MeasuredSide side) {
  require_two_qubits(rho, "conditional_entropy");
  const double c = std::cos(direction.theta / 2.0);
  const double s = std::sin(direction.theta / 2.0);
  const Complex e = std::exp(Complex(0.0, direction.phi));

  Vector n_plus(2), n_minus(2);
  n_plus << Complex(c, 0.0), e * s;
  n_minus << Complex(-s, 0.0), e * c;

  double total = 0.0;
  for (const Vector& n : {n_plus, n_minus}) {
    const Matrix cond = project_out(rho.matrix(), n, side);
    const double p = cond(0, 0).real() + cond(1, 1).real();
    if (p > 1e-14) {
      total += p * entropy2(cond, p);
    }
  }
  return total;
}

OptimizedCorrelation classical_correlation(const DensityMatrix& rho, MeasuredSide side) {
  require_two_qubits(rho, "classical_correlation");
  const Subsystem kept = side == MeasuredSide::B ? Subsystem::A : Subsystem::B;
  const double s_kept = entropy(partial_trace(rho, kept, 2, 2));
  const MinimizedEntropy m = minimize_conditional_entropy(rho, side);
  return {s_kept - m.value, m.direction};
}

OptimizedCorrelation discord(const DensityMatrix& rho, MeasuredSide side) {
  const OptimizedCorrelation q = classical_correlation(rho, side);
  return {mutual_information(rho) - q.value, q.direction};
}

CorrelationReport correlation_report(const DensityMatrix& rho, MeasuredSide side) {
  require_two_qubits(rho, "correlation_report");
  CorrelationReport report;
  report.concurrence = concurrence(rho);
  report.entropy_a = entropy(partial_trace(rho, Subsystem::A, 2, 2));
  report.entropy_b = entropy(partial_trace(rho, Subsystem::B, 2, 2));
  report.entropy_ab = entropy(rho);
  report.mutual_information = report.entropy_a + report.entropy_b - report.entropy_ab;

  const MinimizedEntropy m = minimize_conditional_entropy(rho, side);
  const double s_kept = side == MeasuredSide::B ? report.entropy_a : report.entropy_b;
  report.classical = s_kept - m.value;
  report.discord = report.mutual_information - report.classical;
  report.direction = m.direction;
  return report;
}

}  // namespace kclind
