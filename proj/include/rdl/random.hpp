#pragma once

// Seeded random fixtures: Hermitian/PSD/density operators, unitaries, and
// channels. Used by the property suites and tests; all draws go through
// CounterRng so fixtures are reproducible across platforms.

#include <cmath>
#include <vector>

#include "rdl/operator.hpp"
#include "rdl/rng.hpp"

namespace rdl {

inline Matrix random_ginibre(CounterRng& rng, int rows, int cols) {
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    return g;
}

inline HermitianOperator random_hermitian(CounterRng& rng, int dim) {
    const Matrix g = random_ginibre(rng, dim, dim);
    return HermitianOperator(0.5 * (g + g.adjoint().eval()));
}

// Haar-distributed unitary via QR of a Ginibre matrix with phase fix.
inline Matrix random_unitary(CounterRng& rng, int dim) {
    const Matrix g = random_ginibre(rng, dim, dim);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < dim; ++i) {
        const Complex d = r(i, i);
        q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : Complex(1, 0));
    }
    return q;
}

// PSD operator with unit trace scale: G G^dag normalized so tr = target.
inline HermitianOperator random_psd(CounterRng& rng, int dim, double target_trace = 1.0) {
    const Matrix g = random_ginibre(rng, dim, dim);
    Matrix w = g * g.adjoint();
    w *= target_trace / w.trace().real();
    return HermitianOperator(std::move(w));
}

inline DensityOperator random_density(CounterRng& rng, int dim) {
    return DensityOperator(random_psd(rng, dim, 1.0).entries());
}

inline DensityOperator random_pure(CounterRng& rng, int dim) {
    Eigen::VectorXcd psi(dim);
    for (int i = 0; i < dim; ++i) psi[i] = Complex(rng.gaussian(), rng.gaussian());
    psi.normalize();
    return DensityOperator((psi * psi.adjoint()).eval());
}

// Positive definite with eigenvalues log-uniform in [1/sqrt(cond), sqrt(cond)]
// scaled to unit largest eigenvalue, so the condition number never exceeds
// `max_condition`.
inline HermitianOperator random_pd(CounterRng& rng, int dim, double max_condition = 1e4) {
    const Matrix u = random_unitary(rng, dim);
    RealVector eigs(dim);
    const double half_span = 0.5 * std::log(max_condition);
    for (int i = 0; i < dim; ++i) eigs[i] = std::exp(rng.uniform(-half_span, half_span));
    eigs /= eigs.maxCoeff();
    Matrix m = u * eigs.asDiagonal().toDenseMatrix().cast<Complex>() * u.adjoint();
    return HermitianOperator(std::move(m));
}

// Simultaneously diagonal pair in a common random basis. The spectra are
// reported in the shared eigenbasis order (p[i] and q[i] share a vector).
struct CommutingPair {
    DensityOperator first;
    DensityOperator second;
    RealVector p;
    RealVector q;
};

inline CommutingPair random_commuting_pair(CounterRng& rng, int dim) {
    const Matrix u = random_unitary(rng, dim);
    RealVector p(dim), q(dim);
    double sp = 0, sq = 0;
    for (int i = 0; i < dim; ++i) {
        p[i] = rng.uniform(0.05, 1.0);
        q[i] = rng.uniform(0.05, 1.0);
        sp += p[i];
        sq += q[i];
    }
    p /= sp;
    q /= sq;
    Matrix mp = u * p.asDiagonal().toDenseMatrix().cast<Complex>() * u.adjoint();
    Matrix mq = u * q.asDiagonal().toDenseMatrix().cast<Complex>() * u.adjoint();
    return {DensityOperator(std::move(mp)), DensityOperator(std::move(mq)), p, q};
}

}  // namespace rdl
