#include "kclind/classicality.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace kclind {

namespace {

constexpr double kStructureTol = 1e-12;

// Per-segment exponential stepping shared by the two integrators here.
// Uniform grids hit a single expm thanks to the spacing cache.
template <typename Scalar>
class SegmentStepper {
public:
  explicit SegmentStepper(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> generator)
      : g_(std::move(generator)) {}

  void advance(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, double dt) {
    if (dt == 0.0) return;
    const double scale = std::max(std::abs(dt), std::abs(cached_dt_));
    if (!have_ ||
        std::abs(dt - cached_dt_) > 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      cached_ = (g_ * dt).exp();
      cached_dt_ = dt;
      have_ = true;
    }
    v = cached_ * v;
  }

private:
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> g_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cached_;
  double cached_dt_ = 0.0;
  bool have_ = false;
};

void require_times(const std::vector<double>& times) {
  if (times.empty()) {
    throw ConfigError("empty time grid");
  }
  double prev = 0.0;
  for (double t : times) {
    if (!std::isfinite(t) || t < prev) {
      throw ConfigError("times must be finite, non-negative, non-decreasing");
    }
    prev = t;
  }
}

double clamp_occupation(double p) {
  if (p < -1e-12) {
    std::ostringstream msg;
    msg << "occupation " << p << " below -1e-12";
    throw ToleranceError(msg.str());
  }
  return std::max(p, 0.0);
}

std::vector<RealMatrix> expansion_coefficients(const std::vector<DissipativeChannel>& channels,
                                               const ProjectorSet& proj, double& residual,
                                               double& diagonal_defect) {
  const auto n = static_cast<Index>(proj.size());
  std::vector<RealMatrix> coeff;
  coeff.reserve(channels.size());
  for (const auto& ch : channels) {
    if (ch.op.rows() != proj.dim()) {
      throw ConfigError("check_closure: channel operator does not match projector dimension");
    }
    RealMatrix m = RealMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      const Matrix evolved = ch.op.adjoint() * proj[static_cast<std::size_t>(i)] * ch.op;
      Matrix expansion = Matrix::Zero(proj.dim(), proj.dim());
      for (Index k = 0; k < n; ++k) {
        const Matrix& pk = proj[static_cast<std::size_t>(k)];
        double a = (pk * evolved).trace().real() / pk.trace().real();
        if (std::abs(a) < 1e-14) a = 0.0;
        m(i, k) = a;
        expansion += a * pk;
      }
      residual = std::max(residual, max_abs(evolved - expansion));
      diagonal_defect = std::max(diagonal_defect, std::abs(m(i, i)));
    }
    coeff.push_back(std::move(m));
  }
  return coeff;
}

RateMatrix scaled_rates(const ClosureReport& report, const std::vector<double>& gammas_a,
                        const std::vector<double>& gammas_b) {
  if (gammas_a.size() != report.alpha.size() || gammas_b.size() != report.beta.size()) {
    throw ConfigError("rate_coefficients: one rate per channel required");
  }
  RateMatrix rates;
  for (std::size_t j = 0; j < report.alpha.size(); ++j) {
    rates.a.push_back(gammas_a[j] * report.alpha[j]);
  }
  for (std::size_t j = 0; j < report.beta.size(); ++j) {
    rates.b.push_back(gammas_b[j] * report.beta[j]);
  }
  return rates;
}

}  // namespace

ProjectorSet::ProjectorSet(std::vector<Matrix> projectors) : p_(std::move(projectors)) {
  if (p_.empty()) {
    throw ConfigError("ProjectorSet: empty set");
  }
  dim_ = p_.front().rows();
  Matrix sum = Matrix::Zero(dim_, dim_);
  for (std::size_t i = 0; i < p_.size(); ++i) {
    const Matrix& pi = p_[i];
    if (pi.rows() != dim_ || pi.cols() != dim_) {
      throw ConfigError("ProjectorSet: mixed dimensions");
    }
    if (hermiticity_defect(pi) > kStructureTol || max_abs(pi * pi - pi) > kStructureTol) {
      throw ConfigError("ProjectorSet: element is not a projector");
    }
    if (pi.trace().real() < 1.0 - 1e-9) {
      throw ConfigError("ProjectorSet: zero-rank element");
    }
    for (std::size_t j = i + 1; j < p_.size(); ++j) {
      if (max_abs(pi * p_[j]) > kStructureTol) {
        throw ConfigError("ProjectorSet: elements are not mutually orthogonal");
      }
    }
    sum += pi;
  }
  if (max_abs(sum - Matrix::Identity(dim_, dim_)) > kStructureTol) {
    throw ConfigError("ProjectorSet: set is not complete");
  }
}

ProjectorSet qubit_minus_plus_projectors() {
  return ProjectorSet({qubit_operator(QubitOp::ProjMinus), qubit_operator(QubitOp::ProjPlus)});
}

ProjectorSet qubit_plus_minus_projectors() {
  return ProjectorSet({qubit_operator(QubitOp::ProjPlus), qubit_operator(QubitOp::ProjMinus)});
}

ProjectorSet qubit_x_projectors() {
  return ProjectorSet({qubit_operator(QubitOp::ProjXPlus), qubit_operator(QubitOp::ProjXMinus)});
}

ProjectorSet trivial_projectors(Index dim) {
  return ProjectorSet({Matrix::Identity(dim, dim)});
}

ClosureReport check_closure(const std::vector<DissipativeChannel>& channels_a,
                            const std::vector<DissipativeChannel>& channels_b,
                            const ProjectorSet& proj_a, const ProjectorSet& proj_b,
                            double tolerance) {
  ClosureReport report;
  report.alpha = expansion_coefficients(channels_a, proj_a, report.residual,
                                        report.diagonal_defect);
  report.beta = expansion_coefficients(channels_b, proj_b, report.residual,
                                       report.diagonal_defect);
  if (proj_a.size() == 1 || proj_b.size() == 1) {
    report.verdict = ClosureVerdict::DegenerateUnconstrained;
  } else if (report.residual <= tolerance && report.diagonal_defect <= tolerance) {
    report.verdict = ClosureVerdict::Classical;
  } else {
    report.verdict = ClosureVerdict::NonClassical;
  }
  report.classical = report.verdict == ClosureVerdict::Classical;
  return report;
}

RateMatrix rate_coefficients(const ClosureReport& report, const std::vector<double>& gammas_a,
                             const std::vector<double>& gammas_b) {
  if (report.verdict != ClosureVerdict::Classical) {
    throw ToleranceError("rate_coefficients: closure verdict is not Classical");
  }
  return scaled_rates(report, gammas_a, gammas_b);
}

RateMatrix rate_coefficients_unchecked(const ClosureReport& report,
                                       const std::vector<double>& gammas_a,
                                       const std::vector<double>& gammas_b) {
  return scaled_rates(report, gammas_a, gammas_b);
}

ConditionalStateSet conditional_states(const DensityMatrix& rho, const ProjectorSet& proj_a,
                                       const ProjectorSet& proj_b) {
  const Index da = proj_a.dim();
  const Index db = proj_b.dim();
  if (rho.dim() != da * db) {
    throw ConfigError("conditional_states: state dimension does not match projector sets");
  }
  const Matrix ida = Matrix::Identity(da, da);
  const Matrix idb = Matrix::Identity(db, db);

  ConditionalStateSet set;
  for (const Matrix& q : proj_b.projectors()) {
    const Matrix gate = kron(ida, q);
    set.states_a.push_back(partial_trace(gate * rho.matrix() * gate, Subsystem::A, da, db));
  }
  for (const Matrix& p : proj_a.projectors()) {
    const Matrix gate = kron(p, idb);
    set.states_b.push_back(partial_trace(gate * rho.matrix() * gate, Subsystem::B, da, db));
  }

  const auto nb = static_cast<Index>(proj_b.size());
  const auto na = static_cast<Index>(proj_a.size());
  set.occupations_p = RealMatrix::Zero(nb, na);
  set.occupations_q = RealMatrix::Zero(na, nb);
  for (Index i = 0; i < nb; ++i) {
    for (Index j = 0; j < na; ++j) {
      set.occupations_p(i, j) = clamp_occupation(
          (set.states_a[static_cast<std::size_t>(i)] * proj_a[static_cast<std::size_t>(j)])
              .trace()
              .real());
    }
  }
  for (Index i = 0; i < na; ++i) {
    for (Index j = 0; j < nb; ++j) {
      set.occupations_q(i, j) = clamp_occupation(
          (set.states_b[static_cast<std::size_t>(i)] * proj_b[static_cast<std::size_t>(j)])
              .trace()
              .real());
    }
  }
  return set;
}

ClassicalReduction classical_reduction(const BipartiteModel& model, const ProjectorSet& proj_a,
                                       const ProjectorSet& proj_b) {
  validate(model);
  if (proj_a.dim() != model.dim_a || proj_b.dim() != model.dim_b) {
    throw ConfigError("classical_reduction: projector sets do not match the model dimensions");
  }
  // The conditional-state equations carry no Hamiltonian term, so a driven
  // model has no classical reduction of this form.
  if (max_abs(model.hamiltonian) > 1e-12) {
    throw ConfigError("classical_reduction: model must be undriven (zero Hamiltonian)");
  }
  ClosureReport report = check_closure(model.channels_a, model.channels_b, proj_a, proj_b);
  if (report.verdict != ClosureVerdict::Classical) {
    throw ToleranceError("classical_reduction: model is not classical over these projectors");
  }

  std::vector<double> gammas_a_ch, gammas_b_ch;
  for (const auto& ch : model.channels_a) gammas_a_ch.push_back(ch.rate);
  for (const auto& ch : model.channels_b) gammas_b_ch.push_back(ch.rate);
  const RateMatrix by_channel = rate_coefficients(report, gammas_a_ch, gammas_b_ch);

  ClassicalReduction red{proj_a, proj_b, {}, {}, {}, {}, {}};
  const std::size_t na = proj_a.size();
  const std::size_t nb = proj_b.size();
  red.ops_a.assign(nb, Matrix::Zero(model.dim_a, model.dim_a));
  red.gammas_a.assign(nb, 0.0);
  red.ops_b.assign(na, Matrix::Zero(model.dim_b, model.dim_b));
  red.gammas_b.assign(na, 0.0);
  red.rates.a.assign(nb, RealMatrix::Zero(static_cast<Index>(na), static_cast<Index>(na)));
  red.rates.b.assign(na, RealMatrix::Zero(static_cast<Index>(nb), static_cast<Index>(nb)));

  auto find_label = [](const Matrix& constraint, const ProjectorSet& proj) {
    for (std::size_t i = 0; i < proj.size(); ++i) {
      if (max_abs(constraint - proj[i]) <= kStructureTol) return i;
    }
    throw ConfigError("classical_reduction: channel constraint is not a partner projector");
  };

  std::vector<bool> taken_a(nb, false), taken_b(na, false);
  for (std::size_t j = 0; j < model.channels_a.size(); ++j) {
    const std::size_t label = find_label(model.channels_a[j].constraint, proj_b);
    if (taken_a[label]) {
      throw ConfigError("classical_reduction: two A channels share a constraint label");
    }
    taken_a[label] = true;
    red.ops_a[label] = model.channels_a[j].op;
    red.gammas_a[label] = model.channels_a[j].rate;
    red.rates.a[label] = by_channel.a[j];
  }
  for (std::size_t j = 0; j < model.channels_b.size(); ++j) {
    const std::size_t label = find_label(model.channels_b[j].constraint, proj_a);
    if (taken_b[label]) {
      throw ConfigError("classical_reduction: two B channels share a constraint label");
    }
    taken_b[label] = true;
    red.ops_b[label] = model.channels_b[j].op;
    red.gammas_b[label] = model.channels_b[j].rate;
    red.rates.b[label] = by_channel.b[j];
  }
  return red;
}

std::vector<ConditionalStateSet> integrate_rate_equations(const ConditionalStateSet& initial,
                                                          const ClassicalReduction& reduction,
                                                          const std::vector<double>& times) {
  require_times(times);
  const Index da = reduction.proj_a.dim();
  const Index db = reduction.proj_b.dim();
  const auto na = static_cast<Index>(reduction.proj_a.size());
  const auto nb = static_cast<Index>(reduction.proj_b.size());
  if (static_cast<Index>(initial.states_a.size()) != nb ||
      static_cast<Index>(initial.states_b.size()) != na) {
    throw ConfigError("integrate_rate_equations: decomposition does not match the reduction");
  }

  // Stacked generator for the A-side conditional states, one d^2 block per
  // partner label.
  auto stacked_generator = [](const std::vector<Matrix>& ops, const std::vector<double>& gammas,
                              const std::vector<RealMatrix>& cross_rates,
                              const ProjectorSet& own_proj, Index d, Index n_self) {
    const Index block = d * d;
    Matrix g = Matrix::Zero(n_self * block, n_self * block);
    const Matrix id = Matrix::Identity(d, d);
    for (Index i = 0; i < n_self; ++i) {
      g.block(i * block, i * block, block, block) +=
          gammas[static_cast<std::size_t>(i)] *
          lindblad_dissipator(ops[static_cast<std::size_t>(i)]);
      for (Index j = 0; j < n_self; ++j) {
        for (std::size_t k = 0; k < own_proj.size(); ++k) {
          const Matrix& pk = own_proj[k];
          const double gain = cross_rates[k](i, j);
          if (gain != 0.0) {
            g.block(i * block, j * block, block, block) +=
                gain * kron(pk.transpose(), pk);
          }
          const double loss = cross_rates[k](j, i);
          if (loss != 0.0) {
            g.block(i * block, i * block, block, block) -=
                0.5 * loss * (kron(id, pk) + kron(pk.transpose(), id));
          }
        }
      }
    }
    return g;
  };

  SegmentStepper<Complex> step_a(stacked_generator(reduction.ops_a, reduction.gammas_a,
                                                   reduction.rates.b, reduction.proj_a, da, nb));
  SegmentStepper<Complex> step_b(stacked_generator(reduction.ops_b, reduction.gammas_b,
                                                   reduction.rates.a, reduction.proj_b, db, na));

  Vector va(nb * da * da), vb(na * db * db);
  for (Index i = 0; i < nb; ++i) {
    va.segment(i * da * da, da * da) = vectorize(initial.states_a[static_cast<std::size_t>(i)]);
  }
  for (Index i = 0; i < na; ++i) {
    vb.segment(i * db * db, db * db) = vectorize(initial.states_b[static_cast<std::size_t>(i)]);
  }

  std::vector<ConditionalStateSet> out;
  out.reserve(times.size());
  double prev = 0.0;
  for (double t : times) {
    step_a.advance(va, t - prev);
    step_b.advance(vb, t - prev);
    prev = t;

    ConditionalStateSet set;
    double total_a = 0.0, total_b = 0.0;
    for (Index i = 0; i < nb; ++i) {
      Matrix s = unvectorize(va.segment(i * da * da, da * da));
      if (hermiticity_defect(s) > 1e-9) {
        throw ToleranceError("integrate_rate_equations: conditional state lost Hermiticity");
      }
      s = (s + s.adjoint().eval()) / 2.0;
      total_a += s.trace().real();
      set.states_a.push_back(std::move(s));
    }
    for (Index i = 0; i < na; ++i) {
      Matrix s = unvectorize(vb.segment(i * db * db, db * db));
      if (hermiticity_defect(s) > 1e-9) {
        throw ToleranceError("integrate_rate_equations: conditional state lost Hermiticity");
      }
      s = (s + s.adjoint().eval()) / 2.0;
      total_b += s.trace().real();
      set.states_b.push_back(std::move(s));
    }
    if (std::abs(total_a - 1.0) > 1e-9 || std::abs(total_b - 1.0) > 1e-9) {
      throw ToleranceError("integrate_rate_equations: total probability drifted");
    }

    set.occupations_p = RealMatrix::Zero(nb, na);
    set.occupations_q = RealMatrix::Zero(na, nb);
    for (Index i = 0; i < nb; ++i) {
      for (Index j = 0; j < na; ++j) {
        set.occupations_p(i, j) = clamp_occupation(
            (set.states_a[static_cast<std::size_t>(i)] * reduction.proj_a[static_cast<std::size_t>(j)])
                .trace()
                .real());
      }
    }
    for (Index i = 0; i < na; ++i) {
      for (Index j = 0; j < nb; ++j) {
        set.occupations_q(i, j) = clamp_occupation(
            (set.states_b[static_cast<std::size_t>(i)] * reduction.proj_b[static_cast<std::size_t>(j)])
                .trace()
                .real());
      }
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<RealMatrix> classical_occupations(const RateMatrix& rates,
                                              const RealMatrix& initial_p,
                                              const std::vector<double>& times) {
  require_times(times);
  const Index nb = initial_p.rows();
  const Index na = initial_p.cols();
  if (static_cast<Index>(rates.a.size()) != nb || static_cast<Index>(rates.b.size()) != na) {
    throw ConfigError("classical_occupations: rates must be label-aligned to initial_p");
  }
  double total = 0.0;
  for (Index i = 0; i < nb; ++i) {
    for (Index j = 0; j < na; ++j) total += clamp_occupation(initial_p(i, j));
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw ConfigError("classical_occupations: initial occupations must sum to 1");
  }

  const auto idx = [na](Index i, Index j) { return i * na + j; };
  RealMatrix gen = RealMatrix::Zero(nb * na, nb * na);
  for (Index i = 0; i < nb; ++i) {
    for (Index j = 0; j < na; ++j) {
      for (Index k = 0; k < na; ++k) {
        gen(idx(i, j), idx(i, k)) += rates.a[static_cast<std::size_t>(i)](j, k);
        gen(idx(i, j), idx(i, j)) -= rates.a[static_cast<std::size_t>(i)](k, j);
      }
      for (Index k = 0; k < nb; ++k) {
        gen(idx(i, j), idx(k, j)) += rates.b[static_cast<std::size_t>(j)](i, k);
        gen(idx(i, j), idx(i, j)) -= rates.b[static_cast<std::size_t>(j)](k, i);
      }
    }
  }

  SegmentStepper<double> step(std::move(gen));
  RealVector v(nb * na);
  for (Index i = 0; i < nb; ++i) {
    for (Index j = 0; j < na; ++j) v[idx(i, j)] = std::max(initial_p(i, j), 0.0);
  }

  std::vector<RealMatrix> out;
  out.reserve(times.size());
  double prev = 0.0;
  for (double t : times) {
    step.advance(v, t - prev);
    prev = t;
    RealMatrix p(nb, na);
    for (Index i = 0; i < nb; ++i) {
      for (Index j = 0; j < na; ++j) p(i, j) = clamp_occupation(v[idx(i, j)]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace kclind
