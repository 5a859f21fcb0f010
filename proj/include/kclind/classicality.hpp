#pragma once

#include <vector>

#include "kclind/model.hpp"

namespace kclind {

// Complete orthogonal projector set on one subsystem: P_i P_j = delta_ij P_i,
// sum_i P_i = I, each within 1e-12.
class ProjectorSet {
public:
  explicit ProjectorSet(std::vector<Matrix> projectors);

  const std::vector<Matrix>& projectors() const { return p_; }
  const Matrix& operator[](std::size_t i) const { return p_[i]; }
  std::size_t size() const { return p_.size(); }
  Index dim() const { return dim_; }

private:
  std::vector<Matrix> p_;
  Index dim_;
};

// {|-><-|, |+><+|} — label 0 is the lower state.
ProjectorSet qubit_minus_plus_projectors();
// {|+><+|, |-><-|} — label 0 is the upper state.
ProjectorSet qubit_plus_minus_projectors();
// {|x+><x+|, |x-><x-|}.
ProjectorSet qubit_x_projectors();
// The single-projector set {I_dim}.
ProjectorSet trivial_projectors(Index dim);

enum class ClosureVerdict {
  Classical,     // every jump operator maps the partner-visible projector
                 // algebra into itself, with vanishing diagonal
  NonClassical,  // closure fails or a diagonal coefficient survives
  // The single-projector set {I} closes trivially but carries no
  // classical structure; flagged instead of being called classical.
  DegenerateUnconstrained,
};

// Closure data for the condition A_j^dag P_i A_j = sum_k alpha^j_{ik} P_k.
// alpha[j](i, k) is the coefficient of P_k in the expansion for channel j and
// projector P_i; the extraction is alpha^j_{ik} = Tr[P_k A_j^dag P_i A_j] /
// Tr[P_k]. Read alpha(i, k) as a transition weight into label i from label k.
struct ClosureReport {
  ClosureVerdict verdict = ClosureVerdict::NonClassical;
  bool classical = false;
  std::vector<RealMatrix> alpha;  // one per A-channel, size nA x nA
  std::vector<RealMatrix> beta;   // one per B-channel, size nB x nB
  double residual = 0.0;          // worst deviation from the expansion
  double diagonal_defect = 0.0;   // largest |alpha_ii| or |beta_ii|
};

ClosureReport check_closure(const std::vector<DissipativeChannel>& channels_a,
                            const std::vector<DissipativeChannel>& channels_b,
                            const ProjectorSet& proj_a, const ProjectorSet& proj_b,
                            double tolerance = 1e-10);

// Rate products a^k_{ij} = gamma_A^k alpha^k_{ij} and b^k_{ij} = gamma_B^k
// beta^k_{ij}. The channel index k keeps whatever indexing the report used
// (per-channel here, per-partner-label after alignment).
struct RateMatrix {
  std::vector<RealMatrix> a;
  std::vector<RealMatrix> b;
};

// Throws ToleranceError unless the report's verdict is Classical.
RateMatrix rate_coefficients(const ClosureReport& report,
                             const std::vector<double>& gammas_a,
                             const std::vector<double>& gammas_b);

// Same products without the verdict gate, for probing what the classical
// machinery predicts when closure in fact fails.
RateMatrix rate_coefficients_unchecked(const ClosureReport& report,
                                       const std::vector<double>& gammas_a,
                                       const std::vector<double>& gammas_b);

// Conditional decomposition of a joint state: states_a[i] = Tr_B[(I (x) Q_i)
// rho (I (x) Q_i)] is subnormalized (its trace is the probability of finding
// B in label i), and symmetrically for states_b. occupations_p(i, j) =
// p_j^i = Tr[states_a[i] P_j]; occupations_q(i, j) = q_j^i = Tr[states_b[i]
// Q_j] = p_i^j.
struct ConditionalStateSet {
  std::vector<Matrix> states_a;
  std::vector<Matrix> states_b;
  RealMatrix occupations_p;
  RealMatrix occupations_q;
};

ConditionalStateSet conditional_states(const DensityMatrix& rho,
                                       const ProjectorSet& proj_a,
                                       const ProjectorSet& proj_b);

// The classical reduction of a closed (classical) model: channels re-indexed
// by the partner label their constraint selects, rate products aligned the
// same way. ops_a[i]/gammas_a[i] is the A jump active while B occupies label
// i (zero operator and rate when no channel is gated there).
struct ClassicalReduction {
  ProjectorSet proj_a;
  ProjectorSet proj_b;
  std::vector<Matrix> ops_a;
  std::vector<double> gammas_a;
  std::vector<Matrix> ops_b;
  std::vector<double> gammas_b;
  RateMatrix rates;  // rates.a[k]: k is a B label; rates.b[k]: k is an A label
};

// Runs check_closure on the model's channels and aligns everything by label.
// Throws ToleranceError when the verdict is not Classical, ConfigError when
// a constraint matches no projector of the partner set or two channels share
// one.
ClassicalReduction classical_reduction(const BipartiteModel& model,
                                       const ProjectorSet& proj_a,
                                       const ProjectorSet& proj_b);

// Integrates the coupled conditional-state equations
//   d/dt rho_A^(i) = gamma_A^i D[A_i](rho_A^(i))
//                    + sum_{j,k} b^k_{ij} P_k rho_A^(j) P_k
//                    - 1/2 sum_{j,k} b^k_{ji} {P_k, rho_A^(i)}
// (and the mirrored B system) from the given decomposition.
std::vector<ConditionalStateSet> integrate_rate_equations(
    const ConditionalStateSet& initial, const ClassicalReduction& reduction,
    const std::vector<double>& times);

// Classical master equation for the occupations p_j^i (B label i, A label j):
//   d/dt p_j^i = sum_k [a^i_{jk} p_k^i - a^i_{kj} p_j^i]
//              + sum_k [b^j_{ik} p_j^k - b^j_{ki} p_j^i],
// with label-aligned rates (as produced by classical_reduction). initial_p
// is nB x nA. Occupation dust below -1e-12 is clamped; anything more
// negative throws.
std::vector<RealMatrix> classical_occupations(const RateMatrix& rates,
                                              const RealMatrix& initial_p,
                                              const std::vector<double>& times);

}  // namespace kclind
