#pragma once

// The divergence family: Umegaki relative entropy, Petz and sandwiched Renyi
// divergences, and the measured Renyi divergence computed through its
// variational program
//
//     Q_meas = inf over Y > 0 of  alpha tr[rho Y^-r] + (1-alpha) tr[sigma Y],
//
// with r = (1-alpha)/alpha. Y is parameterized as exp(H) over Hermitian H so
// the feasible set is unconstrained; gradients use the divided-difference
// kernel of exp. All divergences are reported in bits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "rdl/operator.hpp"
#include "rdl/quotient.hpp"

namespace rdl {

struct RenyiOrder {
    double alpha;

    explicit RenyiOrder(double a) : alpha(a) {
        if (!(a >= 0.5)) throw InvalidInput("RenyiOrder: alpha must be at least 1/2");
    }
    double r() const { return (1.0 - alpha) / alpha; }
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// supp(a) contained in supp(b), judged by the mass of a outside b's support.
inline bool support_contained(const HermitianOperator& a, const HermitianOperator& b) {
    const Matrix v = support_basis(b);
    if (v.cols() == a.dim()) return true;
    const double leakage = a.trace() - (v.adjoint() * a.entries() * v).trace().real();
    return leakage <= tol::support_rel * std::max(std::abs(a.trace()), 1.0);
}

inline double umegaki(const DensityOperator& rho, const DensityOperator& sigma) {
    if (!support_contained(rho.op(), sigma.op())) return kInfinity;
    const HermitianOperator diff = mlog2(rho.op()) - mlog2(sigma.op());
    return real_inner(rho.entries(), diff.entries());
}

// tr[rho^alpha sigma^(1-alpha)]; +inf for alpha > 1 on support violation.
inline double petz_q(const HermitianOperator& rho, const HermitianOperator& sigma,
                     double alpha) {
    if (alpha <= 0 || alpha == 1) throw InvalidInput("petz_q: alpha must be in (0,1) or > 1");
    if (alpha > 1 && !support_contained(rho, sigma)) return kInfinity;
    return real_inner(mpow(rho, alpha).entries(), mpow(sigma, 1.0 - alpha).entries());
}

// tr[(sigma^s rho sigma^s)^alpha] with s = (1-alpha)/(2 alpha).
inline double sandwiched_q(const HermitianOperator& rho, const HermitianOperator& sigma,
                           double alpha) {
    if (alpha <= 0 || alpha == 1)
        throw InvalidInput("sandwiched_q: alpha must be in (0,1) or > 1");
    if (alpha > 1 && !support_contained(rho, sigma)) return kInfinity;
    const HermitianOperator t = mpow(sigma, (1.0 - alpha) / (2.0 * alpha));
    Matrix sandwiched = t.entries() * rho.entries() * t.entries();
    const HermitianOperator core(0.5 * (sandwiched + sandwiched.adjoint().eval()));
    const RealVector eigs = spectral_decompose(core).eigenvalues;
    double q = 0;
    for (double lambda : eigs)
        if (lambda > 0) q += std::pow(lambda, alpha);
    return q;
}

// D = log2(Q) / (alpha - 1), with the conventions at Q = 0 and Q = inf.
inline double renyi_d_from_q(double q, double alpha) {
    if (std::isinf(q)) return kInfinity;
    if (q <= 0) return alpha < 1 ? kInfinity : -kInfinity;
    return std::log2(q) / (alpha - 1.0);
}

inline double petz_divergence(const DensityOperator& rho, const DensityOperator& sigma,
                              double alpha) {
    return renyi_d_from_q(petz_q(rho.op(), sigma.op(), alpha), alpha);
}

inline double sandwiched_divergence(const DensityOperator& rho, const DensityOperator& sigma,
                                    double alpha) {
    return renyi_d_from_q(sandwiched_q(rho.op(), sigma.op(), alpha), alpha);
}

struct VariationalSolution {
    double value = 0;              // the optimized Q
    HermitianOperator witness;     // optimal Y = exp(H)
    Matrix log_witness;            // H, kept for warm starts
    int iterations = 0;
    double gradient_norm = 0;
};

struct VariationalConvergenceError : ConvergenceError {
    VariationalConvergenceError(const std::string& what, VariationalSolution sol)
        : ConvergenceError(what, sol.value), best(std::move(sol)) {}
    VariationalSolution best;
};

struct VariationalOptions {
    int max_iters = 5000;
    double grad_tol = 1e-9;
    double armijo_c = 1e-4;
    std::optional<Matrix> initial_log_witness;
    bool throw_on_max_iters = true;
};

// Objective f(H) = alpha tr[rho exp(-r H)] + (1-alpha) tr[sigma exp(H)] and,
// when requested, its (Hermitian) Euclidean gradient.
inline double measured_objective(const HermitianOperator& rho, const HermitianOperator& sigma,
                                 double alpha, const Matrix& log_witness,
                                 Matrix* gradient = nullptr) {
    const double r = (1.0 - alpha) / alpha;
    const SpectralDecomposition es = spectral_decompose(HermitianOperator(log_witness));
    const Matrix rho_rot = es.eigenvectors.adjoint() * rho.entries() * es.eigenvectors;
    const Matrix sigma_rot = es.eigenvectors.adjoint() * sigma.entries() * es.eigenvectors;
    double value = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
        value += alpha * rho_rot(i, i).real() * std::exp(-r * es.eigenvalues[i]);
        value += (1.0 - alpha) * sigma_rot(i, i).real() * std::exp(es.eigenvalues[i]);
    }
    if (gradient) {
        const Matrix grad_rho = divided_difference_transform(
            es, rho.entries(), [r](double t) { return std::exp(-r * t); },
            [r](double t) { return -r * std::exp(-r * t); });
        const Matrix grad_sigma = divided_difference_transform(
            es, sigma.entries(), [](double t) { return std::exp(t); },
            [](double t) { return std::exp(t); });
        Matrix g = alpha * grad_rho + (1.0 - alpha) * grad_sigma;
        *gradient = 0.5 * (g + g.adjoint().eval());
    }
    return value;
}

// Commuting-case optimum used as the descent start: pinch rho by sigma's
// eigenbasis and take log (rho_pinched / sigma)^alpha on the joint eigenbasis.
inline Matrix measured_initial_log_witness(const HermitianOperator& rho,
                                           const HermitianOperator& sigma, double alpha) {
    const SpectralDecomposition es = spectral_decompose(sigma);
    const Matrix rho_rot = es.eigenvectors.adjoint() * rho.entries() * es.eigenvectors;
    const int dim = rho.dim();
    const double delta = 1e-12;
    Matrix log_local = Matrix::Zero(dim, dim);
    for (const auto& [b, e] : eigenvalue_clusters(es.eigenvalues)) {
        const int width = e - b;
        Eigen::SelfAdjointEigenSolver<Matrix> block(rho_rot.block(b, b, width, width));
        const double q = std::max(es.eigenvalues.segment(b, width).mean(), 0.0);
        RealVector h(width);
        for (int k = 0; k < width; ++k) {
            const double p = std::max(block.eigenvalues()[k], 0.0);
            h[k] = alpha * (std::log(p + delta) - std::log(q + delta));
        }
        log_local.block(b, b, width, width) =
            block.eigenvectors() * h.asDiagonal().toDenseMatrix().cast<Complex>() *
            block.eigenvectors().adjoint();
    }
    Matrix h0 = es.eigenvectors * log_local * es.eigenvectors.adjoint();
    return 0.5 * (h0 + h0.adjoint().eval());
}

// Variational program for the measured Renyi Q. Gradient descent with
// Armijo backtracking on the unconstrained log-witness parameterization.
inline VariationalSolution measured_q(const HermitianOperator& rho,
                                      const HermitianOperator& sigma, double alpha,
                                      const VariationalOptions& opts = {}) {
    if (!(alpha >= 0.5 && alpha < 1.0))
        throw InvalidInput("measured_q: alpha must lie in [1/2, 1)");
    if (rho.dim() != sigma.dim()) throw InvalidInput("measured_q: dimension mismatch");

    Matrix h = opts.initial_log_witness ? *opts.initial_log_witness
                                        : measured_initial_log_witness(rho, sigma, alpha);
    Matrix gradient;
    double value = measured_objective(rho, sigma, alpha, h, &gradient);
    double grad_norm = gradient.norm();

    // Barzilai-Borwein step seeds with a non-monotone Armijo backtracking
    // safeguard (reference value = worst of the last few iterates).
    Matrix prev_h, prev_gradient;
    std::vector<double> recent{value};
    double step = 1.0;
    int iter = 0;
    for (; iter < opts.max_iters && grad_norm > opts.grad_tol; ++iter) {
        if (iter > 0) {
            const Matrix dh = h - prev_h;
            const Matrix dg = gradient - prev_gradient;
            const double num = real_inner(dh, dg);
            const double den = real_inner(dg, dg);
            if (num > 0 && den > 0) step = std::clamp(num / den, 1e-12, 1e8);
        }
        const double reference = *std::max_element(recent.begin(), recent.end());
        bool accepted = false;
        Matrix trial;
        double trial_value = 0;
        while (step >= 1e-18) {
            trial = h - step * gradient;
            trial_value = measured_objective(rho, sigma, alpha, trial, nullptr);
            if (std::isfinite(trial_value) &&
                trial_value <= reference - opts.armijo_c * step * grad_norm * grad_norm) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // at the numerical floor of the line search
        prev_h = std::move(h);
        prev_gradient = gradient;
        h = std::move(trial);
        value = measured_objective(rho, sigma, alpha, h, &gradient);
        grad_norm = gradient.norm();
        recent.push_back(value);
        if (recent.size() > 8) recent.erase(recent.begin());
    }

    VariationalSolution sol{value, mexp(HermitianOperator(h)), h, iter, grad_norm};
    if (grad_norm > opts.grad_tol && opts.throw_on_max_iters)
        throw VariationalConvergenceError(
            "measured_q: gradient norm " + std::to_string(grad_norm) + " after " +
                std::to_string(iter) + " iterations",
            sol);
    return sol;
}

inline double measured_divergence(const DensityOperator& rho, const DensityOperator& sigma,
                                  double alpha, const VariationalOptions& opts = {}) {
    return renyi_d_from_q(measured_q(rho.op(), sigma.op(), alpha, opts).value, alpha);
}

namespace detail {

inline double binary_measured_term(double p, double q, double alpha) {
    if (p <= 0 || q <= 0) return 0.0;
    return std::exp(alpha * std::log(p) + (1.0 - alpha) * std::log(q));
}

}  // namespace detail

// Brute-force qubit oracle: minimum of sum_j (tr rho L_j)^alpha
// (tr sigma L_j)^(1-alpha) over rank-one projective measurements
// {P(theta,phi), 1-P(theta,phi)}, a (theta, phi) grid refined by
// golden-section sweeps around the grid optimum.
inline double measured_q_qubit_oracle(const DensityOperator& rho, const DensityOperator& sigma,
                                      double alpha, int grid) {
    if (rho.dim() != 2 || sigma.dim() != 2)
        throw UnsupportedDimension("measured_q_qubit_oracle: dimension must be 2");
    if (!(alpha >= 0.5 && alpha < 1.0))
        throw InvalidInput("measured_q_qubit_oracle: alpha must lie in [1/2, 1)");
    if (grid < 2) throw InvalidInput("measured_q_qubit_oracle: grid too small");

    const Matrix& r = rho.entries();
    const Matrix& s = sigma.entries();
    auto q_of = [&](double theta, double phi) {
        const double nx = std::sin(theta) * std::cos(phi);
        const double ny = std::sin(theta) * std::sin(phi);
        const double nz = std::cos(theta);
        Matrix proj(2, 2);
        proj(0, 0) = 0.5 * (1 + nz);
        proj(1, 1) = 0.5 * (1 - nz);
        proj(0, 1) = 0.5 * Complex(nx, -ny);
        proj(1, 0) = 0.5 * Complex(nx, ny);
        const double p = (r * proj).trace().real();
        const double q = (s * proj).trace().real();
        return detail::binary_measured_term(p, q, alpha) +
               detail::binary_measured_term(1 - p, 1 - q, alpha);
    };

    double best = kInfinity, best_theta = 0, best_phi = 0;
    for (int i = 0; i < grid; ++i) {
        const double theta = M_PI * (i + 0.5) / grid;
        for (int j = 0; j < grid; ++j) {
            const double phi = 2.0 * M_PI * j / grid;
            const double q = q_of(theta, phi);
            if (q < best) {
                best = q;
                best_theta = theta;
                best_phi = phi;
            }
        }
    }

    // Alternating golden-section refinement around the grid optimum.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto golden = [&](auto f, double lo, double hi) {
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 60 && (hi - lo) > 1e-10; ++it) {
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = f(x2);
            }
        }
        return 0.5 * (lo + hi);
    };
    const double dtheta = M_PI / grid, dphi = 2.0 * M_PI / grid;
    for (int sweep = 0; sweep < 3; ++sweep) {
        best_theta = golden([&](double t) { return q_of(t, best_phi); },
                            best_theta - dtheta, best_theta + dtheta);
        best_phi = golden([&](double p) { return q_of(best_theta, p); },
                          best_phi - dphi, best_phi + dphi);
        best = std::min(best, q_of(best_theta, best_phi));
    }
    return best;
}

}  // namespace rdl
