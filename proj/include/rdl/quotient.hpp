#pragma once

// Two matrix divisions and the quantities built directly on them. The
// standard (sandwiched) division B^{-1/2} A B^{-1/2}, and the log-derivative
// quotient
//
//     A / B = integral over [0, inf) of (lambda+B)^{-1} A (lambda+B)^{-1},
//
// i.e. the Frechet derivative of the matrix logarithm at B in direction A.
// Both coincide with A B^{-1} in the commuting case. The log-derivative
// quotient additionally satisfies A/(A+B) <= A/B, which is what makes the
// decoders downstream analyzable.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "rdl/operator.hpp"

namespace rdl {

namespace detail {

// Relative positive-definiteness check for divisors of the log quotient.
inline void require_pd_divisor(const RealVector& eigs, const char* who) {
    const double top = std::max(eigs.maxCoeff(), tol::tiny_floor);
    if (eigs.minCoeff() <= 1e-14 * top)
        throw SingularDivisor(std::string(who) + ": divisor is not positive definite");
}

}  // namespace detail

// U ((U^dag S U) .* K) U^dag where K is the first divided-difference kernel
// of f on the eigenvalues: K_ij = (f(a_i)-f(a_j))/(a_i-a_j), with the
// midpoint derivative df((a_i+a_j)/2) once |a_i-a_j| <= cluster_rel * scale.
// Entries where both eigenvalues sit at or below `zero_cutoff` are dropped
// (support restriction for kernels singular at 0). This is the linear map
// S -> tr-adjoint of the Frechet derivative of f; the kernel is symmetric,
// so the map is its own trace adjoint.
inline Matrix divided_difference_transform(const SpectralDecomposition& es, const Matrix& s,
                                           const ScalarFn& f, const ScalarFn& df,
                                           double zero_cutoff = -1.0) {
    const int n = static_cast<int>(es.eigenvalues.size());
    const Matrix rotated = es.eigenvectors.adjoint() * s * es.eigenvectors;
    Matrix scaled(n, n);
    std::vector<double> fv(n);
    for (int i = 0; i < n; ++i) fv[i] = f(es.eigenvalues[i]);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double a = es.eigenvalues[i], b = es.eigenvalues[j];
            if (zero_cutoff >= 0 && std::abs(a) <= zero_cutoff && std::abs(b) <= zero_cutoff) {
                scaled(i, j) = 0;
                continue;
            }
            const double scale = std::max({std::abs(a), std::abs(b), tol::tiny_floor});
            double k;
            if (std::abs(a - b) <= tol::cluster_rel * scale)
                k = df(0.5 * (a + b));
            else
                k = (fv[i] - fv[j]) / (a - b);
            scaled(i, j) = rotated(i, j) * k;
        }
    }
    return es.eigenvectors * scaled * es.eigenvectors.adjoint();
}

// B^{-1/2} A B^{-1/2}.
inline HermitianOperator standard_division(const HermitianOperator& a,
                                           const HermitianOperator& b) {
    if (a.dim() != b.dim()) throw InvalidInput("standard_division: dimension mismatch");
    const SpectralDecomposition eb = spectral_decompose(b);
    if (eb.eigenvalues.minCoeff() <= 1e-10)
        throw SingularDivisor("standard_division: divisor min eigenvalue <= 1e-10");
    const SpectralDecomposition ea = spectral_decompose(a);
    const double scale = std::max(ea.eigenvalues.cwiseAbs().maxCoeff(), tol::tiny_floor);
    if (ea.eigenvalues.minCoeff() < -tol::psd_slack * scale)
        throw InvalidInput("standard_division: numerator is not PSD");
    RealVector inv_sqrt = eb.eigenvalues.cwiseSqrt().cwiseInverse();
    const Matrix bms =
        eb.eigenvectors * inv_sqrt.asDiagonal().toDenseMatrix().cast<Complex>() *
        eb.eigenvectors.adjoint();
    Matrix out = bms * a.entries() * bms;
    return HermitianOperator(0.5 * (out + out.adjoint().eval()), a.factors());
}

// Log-derivative quotient via the divided-difference kernel of ln at B.
inline HermitianOperator log_quotient(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) throw InvalidInput("log_quotient: dimension mismatch");
    const SpectralDecomposition eb = spectral_decompose(b);
    detail::require_pd_divisor(eb.eigenvalues, "log_quotient");
    Matrix out = divided_difference_transform(
        eb, a.entries(), [](double t) { return std::log(t); },
        [](double t) { return 1.0 / t; });
    return HermitianOperator(0.5 * (out + out.adjoint().eval()), a.factors());
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

}  // namespace detail

// Quadrature oracle for the quotient. Substituting lambda = t/(1-t) turns the
// half-line integral into
//
//     integral over [0,1] of (t + (1-t) B)^{-1} A (t + (1-t) B)^{-1} dt,
//
// a rational integrand whose sharp features sit near the endpoints when B is
// ill-conditioned (scale ~ smallest/largest eigenvalue). A composite 8-point
// Gauss-Legendre rule over `panels` subintervals, dyadically graded towards
// both endpoints, resolves those layers at any condition number. Resolvents
// are inverted directly (LU), independent of the spectral path taken by
// log_quotient.
inline HermitianOperator log_quotient_quadrature(const HermitianOperator& a,
                                                 const HermitianOperator& b, int panels) {
    if (a.dim() != b.dim()) throw InvalidInput("log_quotient_quadrature: dimension mismatch");
    if (panels < 1) throw InvalidInput("log_quotient_quadrature: panels must be positive");
    {
        const SpectralDecomposition eb = spectral_decompose(b);
        detail::require_pd_divisor(eb.eigenvalues, "log_quotient_quadrature");
    }
    std::vector<double> breaks{0.0, 1.0};
    const int per_side = std::max(1, panels / 2);
    double step = 0.5;
    for (int k = 0; k < per_side - 1 && step > 1e-17; ++k, step *= 0.5) {
        breaks.push_back(step);
        breaks.push_back(1.0 - step);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::vector<double> nodes, weights;
    detail::gauss_legendre(8, nodes, weights);
    const int dim = a.dim();
    Matrix acc = Matrix::Zero(dim, dim);
    const Matrix eye = Matrix::Identity(dim, dim);
    for (size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double lo = breaks[p], hi = breaks[p + 1];
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (size_t k = 0; k < nodes.size(); ++k) {
            const double t = mid + half * nodes[k];
            const double w = half * weights[k];
            const Matrix resolvent =
                (t * eye + (1.0 - t) * b.entries()).partialPivLu().solve(eye);
            acc += w * (resolvent * a.entries() * resolvent);
        }
    }
    return HermitianOperator(0.5 * (acc + acc.adjoint().eval()), a.factors());
}

// Collision divergence log2 tr[A (A/B)] with B inverted on its support; +inf
// when supp(A) is not contained in supp(B).
inline double collision_divergence(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) throw InvalidInput("collision_divergence: dimension mismatch");
    const Matrix v = support_basis(b);
    const double leakage = a.trace() - (v.adjoint() * a.entries() * v).trace().real();
    const double scale = std::max(std::abs(a.trace()), tol::tiny_floor);
    if (leakage > tol::support_rel * scale && v.cols() < a.dim())
        return std::numeric_limits<double>::infinity();
    const HermitianOperator ar((v.adjoint() * a.entries() * v).eval());
    const HermitianOperator br((v.adjoint() * b.entries() * v).eval());
    const double q = real_inner(ar.entries(), log_quotient(ar, br).entries());
    return std::log2(q);
}

// Signed margin of the quotient dominance A/(A+B) <= A/B: the maximum
// eigenvalue of A/(A+B) - A/B, which should never exceed numerical noise.
inline double check_quotient_dominance(const HermitianOperator& a, const HermitianOperator& b) {
    const HermitianOperator lhs = log_quotient(a, a + b);
    const HermitianOperator rhs = log_quotient(a, b);
    return max_eigenvalue(lhs - rhs);
}

struct DiscriminationBound {
    double lhs;  // tr[A (B/(A+B))], the quotient-measurement error mass
    double rhs;  // (tr[A+B] - ||A-B||_1) / 2, the optimal-test error mass
};

// One-shot binary discrimination bound: lhs <= rhs. Operators are compressed
// to the joint support when A+B is singular.
inline DiscriminationBound cheng_gap(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) throw InvalidInput("cheng_gap: dimension mismatch");
    const HermitianOperator sum = a + b;
    const Matrix v = support_basis(sum);
    Matrix ar = v.adjoint() * a.entries() * v;
    Matrix br = v.adjoint() * b.entries() * v;
    const HermitianOperator ac(0.5 * (ar + ar.adjoint().eval()));
    const HermitianOperator bc(0.5 * (br + br.adjoint().eval()));
    const double lhs = real_inner(ac.entries(), log_quotient(bc, ac + bc).entries());
    const double rhs = 0.5 * (sum.trace() - trace_norm(a - b));
    return {lhs, rhs};
}

}  // namespace rdl
