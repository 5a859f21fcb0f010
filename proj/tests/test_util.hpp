#pragma once

// Shared helpers for the unit suites: seeded random matrices, states, and
// unitaries so every run is reproducible.

#include <random>

#include <Eigen/QR>

#include "kclind/algebra.hpp"

namespace testutil {

using kclind::Complex;
using kclind::Index;
using kclind::Matrix;
using kclind::Vector;

inline std::mt19937& rng() {
    static std::mt19937 gen(20240817u);
    return gen;
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937& gen) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = Complex(dist(gen), dist(gen));
    }
    return m;
}

inline Matrix random_hermitian(Index dim, std::mt19937& gen) {
    Matrix g = random_matrix(dim, dim, gen);
    return Matrix(0.5 * (g + g.adjoint()));
}

// Random full-rank density matrix, rho = G G^dag / Tr[G G^dag].
inline Matrix random_density(Index dim, std::mt19937& gen) {
    Matrix g = random_matrix(dim, dim, gen);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    return rho;
}

// Haar-ish random unitary from the QR decomposition with phase fixing.
inline Matrix random_unitary(Index dim, std::mt19937& gen) {
    Matrix g = random_matrix(dim, dim, gen);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < dim; ++i) {
        Complex d = r(i, i);
        q.col(i) *= d / std::abs(d);
    }
    return q;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testutil
