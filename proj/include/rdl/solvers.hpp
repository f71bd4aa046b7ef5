#pragma once

// Concave maximization over the set of density operators, used for every
// sigma-program in the library. Frank-Wolfe is the backbone: the linear
// oracle is one eigen-decomposition (top eigenvector of the gradient), so
// feasibility is automatic. Phases:
//
//   1. plain Frank-Wolfe with step 2/(k+2);
//   2. Frank-Wolfe with away steps (atoms re-anchored from the eigenbasis of
//      the current iterate) and golden-section line search;
//   3. an exponentiated-gradient polish that squeezes the final digits when
//      the optimum lies in the interior, where Frank-Wolfe alone zigzags.
//
// The duality gap max_s <G, s - sigma> certifies convergence for concave
// objectives; supergradients of nonsmooth (pointwise-min) objectives keep the
// certificate valid up to the active-set tolerance.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "rdl/errors.hpp"
#include "rdl/operator.hpp"

namespace rdl {

// Evaluate the objective at sigma; fill the (super)gradient when requested.
using DensityObjective = std::function<double(const Matrix&, Matrix*)>;

struct DensitySolveOptions {
    int max_iters = 2000;       // Frank-Wolfe iterations (both phases)
    int plain_steps = 100;      // phase-1 length
    int polish_iters = 400;     // exponentiated-gradient budget
    double gap_tol = 1e-7;
    double mix_eps = 1e-12;     // strict-positivity mixing after each step
    bool throw_on_max_iters = false;
    std::optional<Matrix> initial_sigma;
};

struct DensitySolveResult {
    Matrix sigma;
    double value = 0;
    double gap = 0;
    int iterations = 0;
};

namespace detail {

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         int iters = 40) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters && (hi - lo) > 1e-12; ++it) {
        if (f1 >= f2) {
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
}

inline Matrix mixed_with_identity(const Matrix& sigma, double eps) {
    const int d = static_cast<int>(sigma.rows());
    Matrix out = (1.0 - eps) * sigma + (eps / d) * Matrix::Identity(d, d);
    out = 0.5 * (out + out.adjoint().eval());
    return out / out.trace().real();
}

}  // namespace detail

inline DensitySolveResult maximize_over_density(int dim, const DensityObjective& objective,
                                                const DensitySolveOptions& opts = {}) {
    Matrix sigma = opts.initial_sigma ? detail::mixed_with_identity(*opts.initial_sigma,
                                                                    opts.mix_eps)
                                      : Matrix::Identity(dim, dim) / dim;
    Matrix gradient;
    double value = objective(sigma, &gradient);
    double gap = std::numeric_limits<double>::infinity();
    int iterations = 0;

    Matrix best_sigma = sigma;
    double best_value = value;

    auto fw_atom_and_gap = [&](const Matrix& grad) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(grad);
        const int top = dim - 1;
        Eigen::VectorXcd v = es.eigenvectors().col(top);
        const double lmax = es.eigenvalues()[top];
        return std::pair<Matrix, double>{(v * v.adjoint()).eval(),
                                         lmax - (grad * sigma).trace().real()};
    };

    for (int k = 0; k < opts.max_iters; ++k, ++iterations) {
        auto [atom, fw_gap] = fw_atom_and_gap(gradient);
        gap = fw_gap;
        if (value > best_value) {
            best_value = value;
            best_sigma = sigma;
        }
        if (gap <= opts.gap_tol) break;

        Matrix direction;
        double gamma_max = 1.0;
        if (k < opts.plain_steps) {
            direction = atom - sigma;
            const double gamma = std::min(1.0, 2.0 / (k + 2.0));
            sigma = detail::mixed_with_identity(sigma + gamma * direction, opts.mix_eps);
            value = objective(sigma, &gradient);
            continue;
        }

        // Away candidate from the exact eigen-decomposition of the iterate.
        Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
        int away_idx = -1;
        double away_score = std::numeric_limits<double>::infinity();
        for (int i = 0; i < dim; ++i) {
            if (es.eigenvalues()[i] < 1e-11) continue;
            const double score =
                (es.eigenvectors().col(i).adjoint() * gradient * es.eigenvectors().col(i))(0)
                    .real();
            if (score < away_score) {
                away_score = score;
                away_idx = i;
            }
        }
        const double grad_dot_sigma = (gradient * sigma).trace().real();
        const double away_gap = grad_dot_sigma - away_score;
        if (away_idx >= 0 && away_gap > fw_gap) {
            const Eigen::VectorXcd v = es.eigenvectors().col(away_idx);
            const Matrix away_atom = v * v.adjoint();
            const double w = es.eigenvalues()[away_idx];
            direction = sigma - away_atom;
            gamma_max = (w < 1.0 - 1e-12) ? w / (1.0 - w) : 1.0;
        } else {
            direction = atom - sigma;
        }

        const double gamma = detail::golden_max(
            [&](double g) {
                const Matrix trial =
                    detail::mixed_with_identity(sigma + g * direction, opts.mix_eps);
                return objective(trial, nullptr);
            },
            0.0, gamma_max, 30);
        sigma = detail::mixed_with_identity(sigma + gamma * direction, opts.mix_eps);
        value = objective(sigma, &gradient);
    }

    if (value > best_value) {
        best_value = value;
        best_sigma = sigma;
    }

    // Exponentiated-gradient polish.
    if (gap > opts.gap_tol) {
        sigma = best_sigma;
        value = objective(sigma, &gradient);
        double step = 1.0;
        for (int k = 0; k < opts.polish_iters; ++k, ++iterations) {
            auto [atom, fw_gap] = fw_atom_and_gap(gradient);
            gap = fw_gap;
            if (gap <= opts.gap_tol) break;
            const Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
            const Matrix log_sigma =
                es.eigenvectors() *
                es.eigenvalues().array().max(1e-300).log().matrix().asDiagonal()
                    .toDenseMatrix().cast<Complex>() *
                es.eigenvectors().adjoint();
            bool accepted = false;
            while (step > 1e-14) {
                Matrix z = log_sigma + step * gradient;
                z = 0.5 * (z + z.adjoint().eval());
                const Eigen::SelfAdjointEigenSolver<Matrix> ez(z);
                RealVector shifted =
                    (ez.eigenvalues().array() - ez.eigenvalues().maxCoeff()).exp();
                shifted /= shifted.sum();
                Matrix trial = ez.eigenvectors() *
                               shifted.asDiagonal().toDenseMatrix().cast<Complex>() *
                               ez.eigenvectors().adjoint();
                trial = detail::mixed_with_identity(trial, opts.mix_eps);
                const double trial_value = objective(trial, nullptr);
                if (std::isfinite(trial_value) && trial_value >= value) {
                    sigma = std::move(trial);
                    value = objective(sigma, &gradient);
                    step = std::min(step * 1.6, 1e6);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
        }
        if (value > best_value) {
            best_value = value;
            best_sigma = sigma;
        }
    }

    DensitySolveResult result{best_sigma, best_value, gap, iterations};
    if (gap > opts.gap_tol && opts.throw_on_max_iters)
        throw ConvergenceError("maximize_over_density: duality gap " + std::to_string(gap) +
                                   " above tolerance after " + std::to_string(iterations) +
                                   " iterations",
                               best_value);
    return result;
}

// Euclidean projection onto the probability simplex.
inline RealVector project_simplex(RealVector v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumulative = 0, theta = 0;
    int support = 0;
    for (int i = 0; i < n; ++i) {
        cumulative += u[i];
        const double candidate = (cumulative - 1.0) / (i + 1);
        if (u[i] - candidate > 0) {
            support = i + 1;
            theta = candidate;
        }
    }
    (void)support;
    for (int i = 0; i < n; ++i) v[i] = std::max(v[i] - theta, 0.0);
    return v;
}

}  // namespace rdl
