#include <doctest.h>

#include <cmath>
#include <vector>

#include "kclind/correlations.hpp"
#include "kclind/model.hpp"
#include "kclind/propagator.hpp"
#include "test_util.hpp"

using namespace kclind;
using testutil::max_abs_diff;
using testutil::random_density;
using testutil::random_unitary;
using testutil::rng;

namespace {

double h2(double p) {
    double s = 0.0;
    for (double x : {p, 1.0 - p}) {
        if (x > 1e-15) s -= x * std::log2(x);
    }
    return s;
}

// X-matrix with corner populations/coherence (p, c) and no middle block —
// the stationary family of the constrained model.
DensityMatrix corner_state(double p, Complex c) {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = p;
    m(3, 3) = 1.0 - p;
    m(0, 3) = c;
    m(3, 0) = std::conj(c);
    return DensityMatrix(m);
}

DensityMatrix werner(double w) {
    Matrix m = w * bell_state(Bell::PsiMinus).matrix() +
               (1.0 - w) * 0.25 * Matrix::Identity(4, 4);
    return DensityMatrix(m);
}

// Brute-force measurement minimization on a dense angular grid; independent
// of (and much slower than) the library optimizer.
double dense_grid_conditional_entropy(const DensityMatrix& rho, int n_theta, int n_phi,
                                      MeasuredSide side = MeasuredSide::B) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_theta; ++i) {
        const double theta = M_PI * i / (n_theta - 1.0);
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * M_PI * j / n_phi;
            best = std::min(best, conditional_entropy(rho, {theta, phi}, side));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("concurrence is pinned on Bell, product, and Werner states") {
    for (Bell which : {Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus}) {
        CHECK(concurrence(bell_state(which)) == doctest::Approx(1.0).epsilon(1e-10));
    }
    DensityMatrix prod = product_state(bloch_state({0.8, 1.2, 0.3}), bloch_state({0.5, 0.7, 2.0}));
    CHECK(concurrence(prod) < 1e-8);
    CHECK(concurrence(DensityMatrix::maximally_mixed(4)) == 0.0);

    // Werner family: C = max(0, (3w - 1)/2).
    CHECK(concurrence(werner(0.9)) == doctest::Approx(0.85).epsilon(1e-9));
    CHECK(concurrence(werner(0.5)) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(concurrence(werner(1.0 / 3.0)) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(concurrence(werner(0.2)) == 0.0);
}

TEST_CASE("corner X-states have concurrence 2|c| and the pinned flip spectrum") {
    std::mt19937& gen = rng();
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 8; ++trial) {
        const double p = unit(gen);
        const double cap = std::sqrt(p * (1.0 - p));
        const double mag = cap * unit(gen);
        const Complex c = mag * std::exp(Complex(0, angle(gen)));
        DensityMatrix rho = corner_state(p, c);
        CHECK(std::abs(concurrence(rho) - 2.0 * mag) < 1e-8);

        // Spin-flip spectrum {(sqrt(p(1-p)) +- |c|)^2, 0, 0} via public
        // primitives, independent of the concurrence routine.
        Matrix yy = kron(qubit_operator(QubitOp::SigmaY), qubit_operator(QubitOp::SigmaY));
        Matrix flipped = yy * rho.matrix().conjugate() * yy;
        Matrix root = psd_sqrt(rho.matrix());
        Eigensystem es = hermitian_eigensystem(Matrix(root * flipped * root), 1e-9);
        RealVector eigs = es.values.cwiseMax(0.0);
        CHECK(std::abs(eigs[3] - (cap + mag) * (cap + mag)) < 1e-9);
        CHECK(std::abs(eigs[2] - (cap - mag) * (cap - mag)) < 1e-9);
        CHECK(std::abs(eigs[1]) < 1e-9);
        CHECK(std::abs(eigs[0]) < 1e-9);
    }
}

TEST_CASE("general X-state concurrence matches the two-branch closed form") {
    std::mt19937& gen = rng();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        double d0 = 0.1 + unit(gen), d1 = 0.1 + unit(gen);
        double d2 = 0.1 + unit(gen), d3 = 0.1 + unit(gen);
        const double norm = d0 + d1 + d2 + d3;
        d0 /= norm;
        d1 /= norm;
        d2 /= norm;
        d3 /= norm;
        const Complex c = 0.9 * std::sqrt(d0 * d3) * std::exp(Complex(0, unit(gen)));
        const Complex b = 0.9 * std::sqrt(d1 * d2) * std::exp(Complex(0, unit(gen)));
        Matrix m = Matrix::Zero(4, 4);
        m(0, 0) = d0;
        m(1, 1) = d1;
        m(2, 2) = d2;
        m(3, 3) = d3;
        m(0, 3) = c;
        m(3, 0) = std::conj(c);
        m(1, 2) = b;
        m(2, 1) = std::conj(b);
        const double expected = 2.0 * std::max({0.0, std::abs(c) - std::sqrt(d1 * d2),
                                                std::abs(b) - std::sqrt(d0 * d3)});
        CHECK(concurrence(DensityMatrix(m)) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("entropy and mutual information have their textbook values") {
    CHECK(entropy(bell_state(Bell::PhiPlus)) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(entropy(DensityMatrix::maximally_mixed(4)) == doctest::Approx(2.0).epsilon(1e-12));
    const double lambda = 0.62;
    CHECK(entropy(bloch_state({lambda, 0.9, 0.2})) ==
          doctest::Approx(h2(0.5 * (1.0 + lambda))).epsilon(1e-12));

    DensityMatrix prod = product_state(bloch_state({0.7, 1.0, 0.0}), bloch_state({0.4, 2.0, 1.0}));
    CHECK(mutual_information(prod) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(mutual_information(bell_state(Bell::PsiPlus)) == doctest::Approx(2.0).epsilon(1e-10));

    Matrix cc = Matrix::Zero(4, 4);
    cc(0, 0) = 0.5;
    cc(3, 3) = 0.5;
    CHECK(mutual_information(DensityMatrix(cc)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("conditional entropy vanishes where measurement reveals everything") {
    Matrix cc = Matrix::Zero(4, 4);
    cc(0, 0) = 0.5;
    cc(3, 3) = 0.5;
    DensityMatrix classical(cc);
    CHECK(conditional_entropy(classical, {0.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
    // Measuring along x instead leaves A fully mixed.
    CHECK(conditional_entropy(classical, {M_PI / 2, 0.0}) == doctest::Approx(1.0).epsilon(1e-10));

    // Any measurement on one half of a pure state leaves pure conditionals.
    for (double theta : {0.3, 1.2, 2.8}) {
        CHECK(conditional_entropy(bell_state(Bell::PhiMinus), {theta, 1.1}) ==
              doctest::Approx(0.0).epsilon(1e-9));
    }

    // Side A vs side B on an asymmetric product state.
    DensityMatrix prod = product_state(bloch_state({1.0, 0.0, 0.0}), bloch_state({0.0, 0.0, 0.0}));
    CHECK(conditional_entropy(prod, {0.0, 0.0}, MeasuredSide::B) ==
          doctest::Approx(0.0).epsilon(1e-10));
    CHECK(conditional_entropy(prod, {0.0, 0.0}, MeasuredSide::A) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("classical correlation and discord reproduce closed-form families") {
    // Product states carry no correlations of either kind.
    DensityMatrix prod = product_state(bloch_state({0.8, 0.8, 0.8}), bloch_state({0.3, 2.1, 0.0}));
    CHECK(classical_correlation(prod).value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(discord(prod).value == doctest::Approx(0.0).epsilon(1e-9));

    // Bell states: I = 2, Q = D = 1.
    OptimizedCorrelation bell_q = classical_correlation(bell_state(Bell::PhiMinus));
    CHECK(bell_q.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(discord(bell_state(Bell::PhiMinus)).value == doctest::Approx(1.0).epsilon(1e-8));

    // Classically correlated mixture: all correlation is classical.
    Matrix cc = Matrix::Zero(4, 4);
    cc(0, 0) = 0.5;
    cc(3, 3) = 0.5;
    CHECK(classical_correlation(DensityMatrix(cc)).value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(discord(DensityMatrix(cc)).value == doctest::Approx(0.0).epsilon(1e-8));

    // Werner family: Q = sum_{s=+-} (1+s w)/2 log2(1+s w), D = I - Q.
    for (double w : {0.3, 0.5, 0.8}) {
        const double q_expected =
            0.5 * (1.0 - w) * std::log2(1.0 - w) + 0.5 * (1.0 + w) * std::log2(1.0 + w);
        const double s_joint = -((1.0 + 3.0 * w) / 4.0) * std::log2((1.0 + 3.0 * w) / 4.0) -
                               3.0 * ((1.0 - w) / 4.0) * std::log2((1.0 - w) / 4.0);
        const double i_expected = 2.0 - s_joint;
        DensityMatrix rho = werner(w);
        CHECK(classical_correlation(rho).value == doctest::Approx(q_expected).epsilon(1e-6));
        CHECK(discord(rho).value == doctest::Approx(i_expected - q_expected).epsilon(1e-6));
    }
}

TEST_CASE("optimizer matches a dense independent grid on X-states") {
    std::vector<DensityMatrix> states;
    states.push_back(corner_state(0.25, Complex(-0.25, 0.0)));
    states.push_back(corner_state(0.4, Complex(0.1, 0.15)));
    states.push_back(werner(0.6));
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 0.35;
    m(1, 1) = 0.2;
    m(2, 2) = 0.15;
    m(3, 3) = 0.3;
    m(0, 3) = Complex(0.05, 0.1);
    m(3, 0) = std::conj(m(0, 3));
    m(1, 2) = Complex(0.08, -0.02);
    m(2, 1) = std::conj(m(1, 2));
    states.push_back(DensityMatrix(m));

    for (const DensityMatrix& rho : states) {
        const double brute = dense_grid_conditional_entropy(rho, 257, 256);
        DensityMatrix reduced = partial_trace(rho, Subsystem::A, 2, 2);
        const double q_brute = entropy(reduced) - brute;
        OptimizedCorrelation opt = classical_correlation(rho);
        // The grid resolves the angle to ~6e-3, so its minimum can sit a few
        // 1e-5 above the true one; the refined optimizer must never be worse.
        CHECK(std::abs(opt.value - q_brute) < 5e-4);
        CHECK(opt.value >= q_brute - 1e-10);
    }
}

TEST_CASE("Q + D = I by construction and report fields are consistent") {
    DensityMatrix rho = corner_state(0.3, Complex(0.2, -0.25));
    CorrelationReport rep = correlation_report(rho);
    CHECK(rep.classical + rep.discord == doctest::Approx(rep.mutual_information).epsilon(1e-12));
    CHECK(rep.concurrence == doctest::Approx(concurrence(rho)).epsilon(1e-12));
    CHECK(rep.entropy_ab == doctest::Approx(entropy(rho)).epsilon(1e-12));
    CHECK(rep.entropy_a ==
          doctest::Approx(entropy(partial_trace(rho, Subsystem::A, 2, 2))).epsilon(1e-12));
    CHECK(rep.entropy_b ==
          doctest::Approx(entropy(partial_trace(rho, Subsystem::B, 2, 2))).epsilon(1e-12));
    CHECK(rep.classical == doctest::Approx(classical_correlation(rho).value).epsilon(1e-12));
}

TEST_CASE("all measures are invariant under local unitaries") {
    std::mt19937& gen = rng();
    DensityMatrix rho{random_density(4, gen)};
    CorrelationReport base = correlation_report(rho);
    for (int trial = 0; trial < 2; ++trial) {
        Matrix u = random_unitary(2, gen);
        Matrix v = random_unitary(2, gen);
        Matrix w = kron(u, v);
        DensityMatrix rotated{Matrix(w * rho.matrix() * w.adjoint())};
        CorrelationReport rot = correlation_report(rotated);
        CHECK(rot.concurrence == doctest::Approx(base.concurrence).epsilon(1e-9));
        CHECK(rot.mutual_information == doctest::Approx(base.mutual_information).epsilon(1e-9));
        CHECK(rot.classical == doctest::Approx(base.classical).epsilon(1e-6));
        CHECK(rot.discord == doctest::Approx(base.discord).epsilon(1e-6));
    }
}

TEST_CASE("stationary-family identities: Q = S_A and D = S_A - S_AB, zero iff c = 0") {
    // c = 0: diagonal corner state, no discord, classical = marginal entropy.
    CorrelationReport diag = correlation_report(corner_state(0.3, Complex(0, 0)));
    CHECK(diag.discord == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(diag.classical == doctest::Approx(diag.entropy_a).epsilon(1e-9));

    // |c| > 0: both identities hold and the discord is strictly positive.
    for (const Complex c : {Complex(0.1, 0.0), Complex(0.05, -0.08)}) {
        CorrelationReport rep = correlation_report(corner_state(0.3, c));
        CHECK(rep.classical == doctest::Approx(rep.entropy_a).epsilon(1e-6));
        CHECK(rep.discord == doctest::Approx(rep.entropy_a - rep.entropy_ab).epsilon(1e-6));
        CHECK(rep.discord > 1e-4);
    }
}

TEST_CASE("correlation measures reject non-two-qubit inputs") {
    CHECK_THROWS_AS(concurrence(DensityMatrix::maximally_mixed(3)), ConfigError);
    CHECK_THROWS_AS(mutual_information(DensityMatrix::maximally_mixed(9)), ConfigError);
    CHECK_THROWS_AS(conditional_entropy(DensityMatrix::maximally_mixed(2), {0, 0}), ConfigError);
}
