#include "kclind/model.hpp"

#include <cmath>
#include <sstream>

namespace kclind {

namespace {

constexpr double kStructureTol = 1e-12;

const Complex kI{0.0, 1.0};

Matrix identity2() { return Matrix::Identity(2, 2); }

void require_projector(const Matrix& p) {
  if (p.rows() != p.cols()) {
    throw ConfigError("constraint is not square");
  }
  if (hermiticity_defect(p) > kStructureTol || max_abs(p * p - p) > kStructureTol) {
    throw ConfigError("constraint is not a projector (P^2 = P = P^dag violated)");
  }
}

}  // namespace

Matrix qubit_operator(QubitOp op) {
  Matrix m = Matrix::Zero(2, 2);
  switch (op) {
    case QubitOp::Identity:
      return identity2();
    case QubitOp::SigmaMinus:
      m(1, 0) = 1.0;
      return m;
    case QubitOp::SigmaPlus:
      m(0, 1) = 1.0;
      return m;
    case QubitOp::SigmaX:
      m(0, 1) = m(1, 0) = 1.0;
      return m;
    case QubitOp::SigmaY:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      return m;
    case QubitOp::SigmaZ:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      return m;
    case QubitOp::ProjPlus:
      m(0, 0) = 1.0;
      return m;
    case QubitOp::ProjMinus:
      m(1, 1) = 1.0;
      return m;
    case QubitOp::ProjXPlus:
      m.setConstant(0.5);
      return m;
    case QubitOp::ProjXMinus:
      m(0, 0) = m(1, 1) = 0.5;
      m(0, 1) = m(1, 0) = -0.5;
      return m;
  }
  throw ConfigError("qubit_operator: unknown tag");
}

DissipativeChannel::DissipativeChannel(Matrix op_, double rate_, Matrix constraint_)
    : op(std::move(op_)), rate(rate_), constraint(std::move(constraint_)) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw ConfigError("channel rate must be finite and >= 0");
  }
  if (op.rows() != op.cols() || !all_finite(op)) {
    throw ConfigError("channel operator must be square and finite");
  }
  require_projector(constraint);
}

void validate(const BipartiteModel& model) {
  if (model.dim_a < 1 || model.dim_b < 1) {
    throw ConfigError("model dimensions must be positive");
  }
  const Index d = model.dim_a * model.dim_b;
  if (model.hamiltonian.rows() != d || model.hamiltonian.cols() != d) {
    throw ConfigError("Hamiltonian dimension does not match dim_a*dim_b");
  }
  if (hermiticity_defect(model.hamiltonian) > kStructureTol) {
    throw ConfigError("Hamiltonian is not Hermitian");
  }
  for (const auto& ch : model.channels_a) {
    if (ch.op.rows() != model.dim_a || ch.constraint.rows() != model.dim_b) {
      throw ConfigError("A-channel dimensions do not match the model");
    }
  }
  for (const auto& ch : model.channels_b) {
    if (ch.op.rows() != model.dim_b || ch.constraint.rows() != model.dim_a) {
      throw ConfigError("B-channel dimensions do not match the model");
    }
  }
}

Superoperator build_liouvillian(const BipartiteModel& model) {
  validate(model);
  const Index d = model.dim_a * model.dim_b;
  const Matrix id = Matrix::Identity(d, d);
  const Matrix& h = model.hamiltonian;

  Matrix l = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& ch : model.channels_a) {
    l += ch.rate * lindblad_dissipator(kron(ch.op, ch.constraint));
  }
  for (const auto& ch : model.channels_b) {
    l += ch.rate * lindblad_dissipator(kron(ch.constraint, ch.op));
  }
  return Superoperator(std::move(l));
}

BipartiteModel build_two_qubit_model(const TwoQubitConfig& config) {
  Matrix gate;
  switch (config.constraint) {
    case ConstraintKind::None:
      gate = identity2();
      break;
    case ConstraintKind::MinusMinus:
      gate = qubit_operator(QubitOp::ProjMinus);
      break;
    case ConstraintKind::PlusPlus:
      gate = qubit_operator(QubitOp::ProjPlus);
      break;
    case ConstraintKind::XBasis:
      gate = qubit_operator(QubitOp::ProjXPlus);
      break;
  }

  const Matrix sx = qubit_operator(QubitOp::SigmaX);
  const Matrix sz = qubit_operator(QubitOp::SigmaZ);
  const Matrix id = identity2();

  BipartiteModel model;
  model.hamiltonian = 0.5 * config.omega_a * kron(sx, id) +
                      0.5 * config.omega_b * kron(id, sx) +
                      0.5 * config.detuning * (kron(sz, id) - kron(id, sz));
  model.channels_a.emplace_back(qubit_operator(QubitOp::SigmaMinus), config.gamma_a, gate);
  model.channels_b.emplace_back(qubit_operator(QubitOp::SigmaMinus), config.gamma_b, gate);
  return model;
}

DensityMatrix bloch_state(const BlochParams& p) {
  if (std::abs(p.lambda) > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "bloch_state: |lambda| = " << std::abs(p.lambda) << " exceeds 1";
    throw ConfigError(msg.str());
  }
  const double ct = std::cos(p.theta);
  const double st = std::sin(p.theta);
  Matrix n(2, 2);
  n(0, 0) = ct;
  n(1, 1) = -ct;
  n(0, 1) = st * std::exp(-kI * p.phi);
  n(1, 0) = st * std::exp(kI * p.phi);
  return DensityMatrix(0.5 * (identity2() + p.lambda * n));
}

DensityMatrix product_state(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

Vector bell_vector(Bell which) {
  Vector v = Vector::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  switch (which) {
    case Bell::PhiPlus:
      v(0) = s;
      v(3) = s;
      break;
    case Bell::PhiMinus:
      v(0) = -s;
      v(3) = s;
      break;
    case Bell::PsiPlus:
      v(1) = s;
      v(2) = s;
      break;
    case Bell::PsiMinus:
      v(1) = -s;
      v(2) = s;
      break;
  }
  return v;
}

DensityMatrix bell_state(Bell which) { return DensityMatrix::pure(bell_vector(which)); }

Matrix collective_basis_unitary() {
  Matrix u = Matrix::Zero(4, 4);
  const double s = 1.0 / std::sqrt(2.0);
  u(0, 0) = 1.0;                 // |++>
  u(1, 1) = s;                   // |Psi+>
  u(2, 1) = s;
  u(1, 2) = -s;                  // |Psi->
  u(2, 2) = s;
  u(3, 3) = 1.0;                 // |-->
  return u;
}

Matrix to_collective_basis(const Matrix& m) {
  const Matrix u = collective_basis_unitary();
  return u.adjoint() * m * u;
}

Matrix from_collective_basis(const Matrix& m) {
  const Matrix u = collective_basis_unitary();
  return u * m * u.adjoint();
}

}  // namespace kclind
