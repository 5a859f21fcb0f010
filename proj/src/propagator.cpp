#include "kclind/propagator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace kclind {

namespace {

// Reuses the last exponential when consecutive grid spacings agree to
// rounding; uniform grids then cost a single expm.
class StepCache {
public:
  explicit StepCache(const Matrix& generator) : generator_(generator) {}

  const Matrix& exponential(double dt) {
    const double scale = std::max(std::abs(dt), std::abs(cached_dt_));
    if (!have_ || std::abs(dt - cached_dt_) > 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      cached_ = matrix_exp(generator_ * dt);
      cached_dt_ = dt;
      have_ = true;
    }
    return cached_;
  }

private:
  const Matrix& generator_;
  Matrix cached_;
  double cached_dt_ = 0.0;
  bool have_ = false;
};

Vector rk4_segment(const Matrix& m, Vector v, double dt, double step) {
  if (dt <= 0.0) return v;
  const auto n = static_cast<long>(std::ceil(dt / step));
  const double h = dt / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const Vector k1 = m * v;
    const Vector k2 = m * (v + 0.5 * h * k1);
    const Vector k3 = m * (v + 0.5 * h * k2);
    const Vector k4 = m * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return v;
}

}  // namespace

Trajectory propagate(const Superoperator& liouvillian, const DensityMatrix& initial,
                     const std::vector<double>& times, const PropagateOptions& options) {
  if (times.empty()) {
    throw ConfigError("propagate: empty time grid");
  }
  if (initial.dim() != liouvillian.dim()) {
    throw ConfigError("propagate: state/generator dimension mismatch");
  }
  double prev = 0.0;
  for (double t : times) {
    if (!std::isfinite(t) || t < prev) {
      throw ConfigError("propagate: times must be finite, non-negative, non-decreasing");
    }
    prev = t;
  }

  Trajectory out;
  out.times = times;
  out.states.reserve(times.size());

  Vector v = vectorize(initial.matrix());
  StepCache cache(liouvillian.matrix());
  prev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double dt = times[k] - prev;
    if (dt > 0.0) {
      if (options.method == PropagateOptions::Method::MatrixExp) {
        v = cache.exponential(dt) * v;
      } else {
        v = rk4_segment(liouvillian.matrix(), std::move(v), dt, options.rk4_step);
      }
    }
    prev = times[k];
    try {
      out.states.emplace_back(unvectorize(v), options.herm_tol, options.trace_tol,
                              options.psd_tol);
    } catch (const ToleranceError& err) {
      std::ostringstream msg;
      msg << "propagate: state invalid at t = " << times[k] << ": " << err.what();
      throw ToleranceError(msg.str());
    }
  }
  return out;
}

std::vector<double> time_grid(double t_max, int n) {
  if (!(t_max > 0.0) || n < 2) {
    throw ConfigError("time_grid: need t_max > 0 and at least 2 points");
  }
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    t[static_cast<std::size_t>(i)] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return t;
}

SteadyStateResult steady_states(const Superoperator& liouvillian, double tol_rel) {
  const Matrix& l = liouvillian.matrix();
  const Index d = liouvillian.dim();

  // Kernel of L == lowest eigenspace of the Hermitian PSD matrix L^dag L;
  // its eigenvalues are squared singular values of L.
  Eigensystem es = hermitian_eigensystem(l.adjoint() * l, 1e-9 * std::max(1.0, max_abs(l) * max_abs(l)));

  SteadyStateResult result;
  result.singular_values = es.values.cwiseMax(0.0).cwiseSqrt();
  const double lambda_max = es.values[es.values.size() - 1];

  if (lambda_max <= 0.0) {
    // Zero generator: everything is stationary.
    result.null_dimension = static_cast<int>(d * d);
  } else {
    // The cutoff acts on the eigenvalues of L^dag L: kernel eigenvalues are
    // computed with absolute error ~eps*lambda_max, comfortably below the
    // relative threshold, whereas their square roots would sit near
    // sqrt(eps)*sigma_max and a singular-value cutoff this tight would never
    // trigger.
    const double cutoff = tol_rel * lambda_max;
    for (Index k = 0; k < es.values.size(); ++k) {
      if (es.values[k] <= cutoff) ++result.null_dimension;
    }
  }

  for (int k = 0; k < result.null_dimension; ++k) {
    result.null_basis.push_back(unvectorize(es.vectors.col(k)));
  }

  if (result.null_dimension == static_cast<int>(d * d)) {
    result.gap_ratio = std::numeric_limits<double>::infinity();
  } else if (result.null_dimension > 0) {
    const double last_zero = result.singular_values[result.null_dimension - 1];
    const double first_kept = result.singular_values[result.null_dimension];
    result.gap_ratio = last_zero > 0.0 ? first_kept / last_zero
                                       : std::numeric_limits<double>::infinity();
  }

  if (result.null_dimension == 1) {
    // The kernel vector is unique up to phase; pick its Hermitian part (or
    // anti-Hermitian, whichever survives) and normalize the trace.
    const Matrix& x = result.null_basis.front();
    Matrix h = 0.5 * (x + x.adjoint().eval());
    Matrix g = (x - x.adjoint().eval()) / Complex(0.0, 2.0);
    if (g.norm() > h.norm()) h = std::move(g);
    const Complex tr = h.trace();
    if (std::abs(tr) > 1e-12) {
      h /= tr;
      DensityMatrix rho(std::move(h), 1e-9, 1e-9, 1e-9);
      result.residual = max_abs(liouvillian.apply(rho.matrix()));
      result.state = std::move(rho);
    }
  }
  return result;
}

DensityMatrix stationary_from_initial(const Superoperator& liouvillian,
                                      const DensityMatrix& initial, double t0,
                                      double tolerance, int max_doublings) {
  if (!(t0 > 0.0)) {
    throw ConfigError("stationary_from_initial: t0 must be positive");
  }
  Matrix e = matrix_exp(liouvillian.matrix() * t0);
  const Vector v0 = vectorize(initial.matrix());
  Matrix prev = initial.matrix();
  for (int k = 0; k < max_doublings; ++k) {
    Matrix cur = unvectorize(e * v0);
    if (max_abs(cur - prev) < tolerance) {
      return DensityMatrix(std::move(cur), 1e-9, 1e-9, 1e-8);
    }
    prev = std::move(cur);
    e = e * e;  // doubles the horizon: t0 * 2^k
  }
  throw ToleranceError("stationary_from_initial: no convergence within doubling budget");
}

Matrix AnalyticStationary::matrix() const {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = p;
  m(3, 3) = 1.0 - p;
  m(0, 3) = c;
  m(3, 0) = std::conj(c);
  return m;
}

DensityMatrix AnalyticStationary::state() const { return DensityMatrix(matrix()); }

AnalyticStationary analytic_stationary(const DensityMatrix& initial) {
  if (initial.dim() != 4) {
    throw ConfigError("analytic_stationary: two-qubit states only");
  }
  AnalyticStationary s;
  s.p = initial(0, 0).real();
  s.c = initial(0, 3);
  // |c| <= sqrt(p(1-p)) holds for every valid input; tolerate rounding dust.
  if (std::abs(s.c) > std::sqrt(std::max(s.p * (1.0 - s.p), 0.0)) + 1e-12) {
    throw ToleranceError("analytic_stationary: coherence bound violated");
  }
  return s;
}

Matrix perturbative_stationary(double gamma, double delta_omega) {
  if (!(gamma > 0.0)) {
    throw ConfigError("perturbative_stationary: gamma must be positive");
  }
  const Complex ie{0.0, delta_omega / gamma};
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  m(0, 3) = -0.5;
  m(3, 0) = -0.5;
  m(0, 1) = -ie;
  m(0, 2) = ie;
  m(1, 0) = ie;
  m(2, 0) = -ie;
  m(1, 3) = -ie;
  m(2, 3) = ie;
  m(3, 1) = ie;
  m(3, 2) = -ie;
  return m;
}

}  // namespace kclind
