#pragma once

// Classical-quantum channels, Renyi mutual informations and divergence radii
// for the Petz / sandwiched / measured families, n-copy measured quantities,
// and the purification-based duality identities. All sigma-programs run on
// the shared density-matrix Frank-Wolfe solver; for alpha < 1 minimizing the
// divergence over sigma is the same as maximizing the concave map
// sigma -> Q(. || rho_A x sigma).

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rdl/operator.hpp"
#include "rdl/quotient.hpp"
#include "rdl/rng.hpp"
#include "rdl/renyi.hpp"
#include "rdl/solvers.hpp"

namespace rdl {

struct CQChannel {
    std::vector<std::string> alphabet;
    std::vector<DensityOperator> states;

    CQChannel(std::vector<std::string> labels, std::vector<DensityOperator> letter_states)
        : alphabet(std::move(labels)), states(std::move(letter_states)) {
        if (states.empty()) throw InvalidInput("CQChannel: needs at least one letter");
        if (alphabet.size() != states.size())
            throw InvalidInput("CQChannel: alphabet/states size mismatch");
        for (const auto& s : states)
            if (s.dim() != states.front().dim())
                throw InvalidInput("CQChannel: letter states must share one dimension");
    }

    int letters() const { return static_cast<int>(states.size()); }
    int dim() const { return states.front().dim(); }

    DensityOperator average_state(const RealVector& probs) const {
        Matrix acc = Matrix::Zero(dim(), dim());
        for (int x = 0; x < letters(); ++x) acc += probs[x] * states[x].entries();
        return DensityOperator(std::move(acc));
    }
};

struct InputDistribution {
    RealVector probs;

    explicit InputDistribution(RealVector p) : probs(std::move(p)) {
        if (probs.size() == 0) throw InvalidInput("InputDistribution: empty");
        if (probs.minCoeff() < 0) throw InvalidInput("InputDistribution: negative entry");
        if (std::abs(probs.sum() - 1.0) > 1e-12)
            throw InvalidInput("InputDistribution: probabilities must sum to 1");
    }

    static InputDistribution uniform(int n) {
        return InputDistribution(RealVector::Constant(n, 1.0 / n));
    }
};

enum class DivergenceKind { petz, sandwiched, measured };

inline const char* to_string(DivergenceKind kind) {
    switch (kind) {
        case DivergenceKind::petz: return "petz";
        case DivergenceKind::sandwiched: return "sandwiched";
        case DivergenceKind::measured: return "measured";
    }
    return "?";
}

// rho_XB = sum_x P(x) |x><x| (x) rho_x, factors [|X|, d].
inline DensityOperator joint_state(const CQChannel& w, const InputDistribution& p) {
    if (p.probs.size() != w.letters())
        throw InvalidInput("joint_state: distribution size does not match alphabet");
    const int m = w.letters(), d = w.dim();
    Matrix out = Matrix::Zero(m * d, m * d);
    for (int x = 0; x < m; ++x)
        out.block(x * d, x * d, d, d) = p.probs[x] * w.states[x].entries();
    return DensityOperator(HermitianOperator(std::move(out), {m, d}));
}

namespace detail {

// Clamped eigenvalue power without the support cutoff: solver objectives use
// this on the (strictly positive, mixed) sigma so values and gradients stay
// consistent near the boundary.
inline Matrix raw_power(const SpectralDecomposition& es, double p) {
    RealVector mapped(es.eigenvalues.size());
    for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i)
        mapped[i] = es.eigenvalues[i] > 0 ? std::pow(es.eigenvalues[i], p) : 0.0;
    Matrix out = es.eigenvectors * mapped.asDiagonal().toDenseMatrix().cast<Complex>() *
                 es.eigenvectors.adjoint();
    return 0.5 * (out + out.adjoint().eval());
}

// Contract the A legs of a Hermitian C on A(x)B against rho_A:
// result(b,b') = sum_{a,a'} rho_A(a',a) C((a,b),(a',b')).
inline Matrix contract_first_factor(const Matrix& c, const Matrix& rho_a, int da, int db) {
    Matrix out = Matrix::Zero(db, db);
    for (int b = 0; b < db; ++b)
        for (int bp = 0; bp < db; ++bp) {
            Complex sum = 0;
            for (int a = 0; a < da; ++a)
                for (int ap = 0; ap < da; ++ap)
                    sum += rho_a(ap, a) * c(a * db + b, ap * db + bp);
            out(b, bp) = sum;
        }
    return 0.5 * (out + out.adjoint().eval());
}

// Per-letter Q(rho_x || sigma) evaluations and sigma-gradients for one kind,
// with warm-started variational witnesses for the measured family.
class LetterQ {
public:
    LetterQ(DivergenceKind kind, double alpha, std::vector<HermitianOperator> states)
        : kind_(kind), alpha_(alpha), states_(std::move(states)) {
        if (kind_ == DivergenceKind::petz)
            for (const auto& s : states_) petz_powers_.push_back(mpow(s, alpha_));
        warm_.resize(states_.size());
    }

    int letters() const { return static_cast<int>(states_.size()); }

    // Values for every letter; gradients only for the requested subset.
    void evaluate(const Matrix& sigma, std::vector<double>& q_values,
                  std::vector<Matrix>* gradients, const std::vector<bool>* want_grad) {
        const int n = letters();
        q_values.assign(n, 0.0);
        if (gradients) gradients->assign(n, Matrix());
        const HermitianOperator sig(sigma);
        switch (kind_) {
            case DivergenceKind::petz: {
                const SpectralDecomposition es = spectral_decompose(sig);
                const Matrix spow = raw_power(es, 1.0 - alpha_);
                for (int x = 0; x < n; ++x) {
                    q_values[x] = real_inner(petz_powers_[x].entries(), spow);
                    if (gradients && (!want_grad || (*want_grad)[x])) {
                        const double a = alpha_;
                        (*gradients)[x] = divided_difference_transform(
                            es, petz_powers_[x].entries(),
                            [a](double t) { return std::pow(t, 1.0 - a); },
                            [a](double t) { return (1.0 - a) * std::pow(t, -a); },
                            noise_cutoff(es.eigenvalues));
                    }
                }
                break;
            }
            case DivergenceKind::sandwiched: {
                const SpectralDecomposition es = spectral_decompose(sig);
                const double s = (1.0 - alpha_) / (2.0 * alpha_);
                const Matrix t_m = raw_power(es, s);
                for (int x = 0; x < n; ++x) {
                    Matrix core = t_m * states_[x].entries() * t_m;
                    const HermitianOperator core_op(0.5 * (core + core.adjoint().eval()));
                    const SpectralDecomposition ec = spectral_decompose(core_op);
                    double q = 0;
                    for (double lambda : ec.eigenvalues)
                        if (lambda > 0) q += std::pow(lambda, alpha_);
                    q_values[x] = q;
                    if (gradients && (!want_grad || (*want_grad)[x])) {
                        const HermitianOperator xpow = mpow(core_op, alpha_ - 1.0);
                        const Matrix sx = states_[x].entries() * t_m * xpow.entries() +
                                          xpow.entries() * t_m * states_[x].entries();
                        const double a = alpha_;
                        (*gradients)[x] =
                            a * divided_difference_transform(
                                    es, 0.5 * (sx + sx.adjoint().eval()),
                                    [s](double t) { return std::pow(t, s); },
                                    [s](double t) { return s * std::pow(t, s - 1.0); },
                                    noise_cutoff(es.eigenvalues));
                    }
                }
                break;
            }
            case DivergenceKind::measured: {
                for (int x = 0; x < n; ++x) {
                    VariationalOptions vopts;
                    vopts.throw_on_max_iters = false;
                    vopts.grad_tol = inner_grad_tol;
                    if (warm_[x]) vopts.initial_log_witness = warm_[x];
                    const VariationalSolution sol =
                        measured_q(states_[x], sig, alpha_, vopts);
                    warm_[x] = sol.log_witness;
                    q_values[x] = sol.value;
                    if (gradients && (!want_grad || (*want_grad)[x]))
                        (*gradients)[x] = (1.0 - alpha_) * sol.witness.entries();
                }
                break;
            }
        }
    }

    double inner_grad_tol = 1e-9;

private:
    DivergenceKind kind_;
    double alpha_;
    std::vector<HermitianOperator> states_;
    std::vector<HermitianOperator> petz_powers_;
    std::vector<std::optional<Matrix>> warm_;
};

}  // namespace detail

struct SigmaSolution {
    double value = 0;   // divergence value in bits
    double q_value = 0; // optimized Q
    DensityOperator sigma_opt;
    double gap = 0;
    int iterations = 0;
};

struct MutualInfoOptions {
    DensitySolveOptions sigma;
    double inner_grad_tol = 1e-9;  // measured-family witness tolerance
};

// Weighted-ensemble sigma program: maximize sum_x w_x Q(rho_x || sigma).
// This is the inner program of every cq-channel quantity; the weights are an
// input distribution or active-set weights.
inline SigmaSolution cq_sigma_solve(const CQChannel& w, const RealVector& weights, double alpha,
                                    DivergenceKind kind, const MutualInfoOptions& opts = {}) {
    std::vector<HermitianOperator> states;
    for (const auto& s : w.states) states.push_back(s.op());
    detail::LetterQ letter_q(kind, alpha, std::move(states));
    letter_q.inner_grad_tol = opts.inner_grad_tol;
    const int n = letter_q.letters();

    DensityObjective objective = [&](const Matrix& sigma, Matrix* grad) {
        std::vector<double> q_values;
        std::vector<Matrix> gradients;
        std::vector<bool> want(n);
        for (int x = 0; x < n; ++x) want[x] = grad && weights[x] > 0;
        letter_q.evaluate(sigma, q_values, grad ? &gradients : nullptr, &want);
        double total = 0;
        for (int x = 0; x < n; ++x) total += weights[x] * q_values[x];
        if (grad) {
            Matrix g = Matrix::Zero(sigma.rows(), sigma.cols());
            for (int x = 0; x < n; ++x)
                if (weights[x] > 0) g += weights[x] * gradients[x];
            *grad = g;
        }
        return total;
    };
    const DensitySolveResult res = maximize_over_density(w.dim(), objective, opts.sigma);
    return SigmaSolution{renyi_d_from_q(res.value, alpha), res.value,
                         DensityOperator(res.sigma), res.gap, res.iterations};
}

// Renyi mutual information of a bipartite state with factors [dA, dB]:
// min over sigma_B of D(rho_AB || rho_A x sigma_B), returned in bits together
// with the optimizing sigma.
inline SigmaSolution mutual_info(const DensityOperator& rho_ab, double alpha,
                                 DivergenceKind kind, const MutualInfoOptions& opts = {}) {
    if (rho_ab.factors().size() != 2)
        throw InvalidInput("mutual_info: state must carry factors [dA, dB]");
    if (!(alpha >= 0.5 && alpha < 1.0))
        throw InvalidInput("mutual_info: alpha must lie in [1/2, 1)");
    const int da = rho_ab.factors()[0], db = rho_ab.factors()[1];
    const HermitianOperator rho_a = partial_trace(rho_ab.op(), {0});
    const Matrix rho_a_m = rho_a.entries();

    std::optional<Matrix> warm_witness;
    DensityObjective objective;
    switch (kind) {
        case DivergenceKind::petz: {
            // Q = tr[M sigma^(1-alpha)] with M the rho_A-weighted contraction
            // of rho^alpha.
            const HermitianOperator rho_pow = mpow(rho_ab.op(), alpha);
            const HermitianOperator a_half = mpow(rho_a, (1.0 - alpha) / 2.0);
            const Matrix lifted =
                tensor(a_half, identity_operator(db)).entries();
            Matrix m_full = lifted * rho_pow.entries() * lifted;
            const HermitianOperator m_b =
                partial_trace(HermitianOperator(0.5 * (m_full + m_full.adjoint().eval()),
                                                {da, db}),
                              {1});
            objective = [alpha, m_b](const Matrix& sigma, Matrix* grad) {
                const SpectralDecomposition es = spectral_decompose(HermitianOperator(sigma));
                const double q = real_inner(m_b.entries(), detail::raw_power(es, 1.0 - alpha));
                if (grad) {
                    *grad = divided_difference_transform(
                        es, m_b.entries(),
                        [alpha](double t) { return std::pow(t, 1.0 - alpha); },
                        [alpha](double t) { return (1.0 - alpha) * std::pow(t, -alpha); },
                        noise_cutoff(es.eigenvalues));
                }
                return q;
            };
            break;
        }
        case DivergenceKind::sandwiched: {
            const double s = (1.0 - alpha) / (2.0 * alpha);
            objective = [alpha, s, da, db, rho_a_m, &rho_ab](const Matrix& sigma,
                                                             Matrix* grad) {
                const HermitianOperator tau(
                    tensor(HermitianOperator(rho_a_m), HermitianOperator(sigma)).entries());
                const SpectralDecomposition et = spectral_decompose(tau);
                const double cutoff = noise_cutoff(et.eigenvalues);
                const Matrix t_m = detail::raw_power(et, s);
                Matrix core = t_m * rho_ab.entries() * t_m;
                const HermitianOperator core_op(0.5 * (core + core.adjoint().eval()));
                double q = 0;
                for (double lambda : spectral_decompose(core_op).eigenvalues)
                    if (lambda > 0) q += std::pow(lambda, alpha);
                if (grad) {
                    const HermitianOperator xpow = mpow(core_op, alpha - 1.0);
                    const Matrix sx = rho_ab.entries() * t_m * xpow.entries() +
                                      xpow.entries() * t_m * rho_ab.entries();
                    const Matrix c = divided_difference_transform(
                        et, 0.5 * (sx + sx.adjoint().eval()),
                        [s](double t) { return std::pow(t, s); },
                        [s](double t) { return s * std::pow(t, s - 1.0); }, cutoff);
                    *grad = alpha * detail::contract_first_factor(c, rho_a_m, da, db);
                }
                return q;
            };
            break;
        }
        case DivergenceKind::measured: {
            objective = [alpha, da, db, rho_a_m, &rho_ab, &warm_witness, &opts](
                            const Matrix& sigma, Matrix* grad) {
                VariationalOptions vopts;
                vopts.throw_on_max_iters = false;
                vopts.grad_tol = opts.inner_grad_tol;
                if (warm_witness) vopts.initial_log_witness = warm_witness;
                const HermitianOperator second(
                    tensor(HermitianOperator(rho_a_m), HermitianOperator(sigma)).entries());
                const VariationalSolution sol =
                    measured_q(rho_ab.op(), second, alpha, vopts);
                warm_witness = sol.log_witness;
                if (grad)
                    *grad = (1.0 - alpha) *
                            detail::contract_first_factor(sol.witness.entries(), rho_a_m, da,
                                                          db);
                return sol.value;
            };
            break;
        }
    }

    const DensitySolveResult res = maximize_over_density(db, objective, opts.sigma);
    return SigmaSolution{renyi_d_from_q(res.value, alpha), res.value,
                         DensityOperator(res.sigma), res.gap, res.iterations};
}

// Divergence radius: min over sigma of max_x D(rho_x || sigma), solved as
// max over sigma of min_x Q(rho_x || sigma) with an active-set supergradient
// (letters within 1e-8 of the min share weight equally).
inline SigmaSolution divergence_radius(const CQChannel& w, double alpha, DivergenceKind kind,
                                       const MutualInfoOptions& opts = {}) {
    if (!(alpha >= 0.5 && alpha < 1.0) && !(kind == DivergenceKind::petz && alpha > 0 && alpha < 1))
        throw InvalidInput("divergence_radius: alpha out of range");
    std::vector<HermitianOperator> states;
    for (const auto& s : w.states) states.push_back(s.op());
    detail::LetterQ letter_q(kind, alpha, std::move(states));
    letter_q.inner_grad_tol = opts.inner_grad_tol;
    const int n = letter_q.letters();

    DensityObjective objective = [&](const Matrix& sigma, Matrix* grad) {
        std::vector<double> q_values;
        std::vector<Matrix> gradients;
        letter_q.evaluate(sigma, q_values, grad ? &gradients : nullptr, nullptr);
        const double min_q = *std::min_element(q_values.begin(), q_values.end());
        if (grad) {
            Matrix g = Matrix::Zero(sigma.rows(), sigma.cols());
            int active = 0;
            for (int x = 0; x < n; ++x)
                if (q_values[x] <= min_q + 1e-8) {
                    g += gradients[x];
                    ++active;
                }
            *grad = g / active;
        }
        return min_q;
    };
    const DensitySolveResult res = maximize_over_density(w.dim(), objective, opts.sigma);
    return SigmaSolution{renyi_d_from_q(res.value, alpha), res.value,
                         DensityOperator(res.sigma), res.gap, res.iterations};
}

struct ChannelMutualInfo {
    double value = 0;    // bits
    double q_value = 0;  // min over P of max over sigma of the weighted Q
    InputDistribution p_opt;
    SigmaSolution inner;
};

struct PMaxOptions {
    MutualInfoOptions sigma;
    MutualInfoOptions scan_sigma;  // looser settings for grid/refinement scans
    int refine_iters = 120;
    int grid_resolution = 16;
    int random_starts = 4;

    PMaxOptions() {
        scan_sigma.sigma.gap_tol = 1e-6;
        scan_sigma.sigma.max_iters = 600;
        scan_sigma.sigma.polish_iters = 200;
        scan_sigma.inner_grad_tol = 1e-8;
    }
};

// Channel mutual information: max over P of the mutual information of the
// joint state, which for alpha < 1 is the convex program
// min over P of S(P) = max_sigma sum_x P(x) Q(rho_x || sigma).
inline ChannelMutualInfo channel_mutual_info(const CQChannel& w, double alpha,
                                             DivergenceKind kind, const PMaxOptions& opts = {}) {
    const int n = w.letters();
    if (n > 8) throw InvalidInput("channel_mutual_info: alphabet capped at 8 letters");

    auto scan_value = [&](const RealVector& p) {
        return cq_sigma_solve(w, p, alpha, kind, opts.scan_sigma).q_value;
    };

    RealVector best_p = RealVector::Constant(n, 1.0 / n);
    double best_s = scan_value(best_p);

    // Coarse simplex grid (enumerated for tiny alphabets, sampled otherwise).
    std::vector<RealVector> starts;
    const int res = opts.grid_resolution;
    if (n == 2) {
        for (int k = 0; k <= res; ++k) {
            RealVector p(2);
            p << static_cast<double>(k) / res, static_cast<double>(res - k) / res;
            starts.push_back(p);
        }
    } else if (n == 3) {
        for (int i = 0; i <= res; ++i)
            for (int j = 0; i + j <= res; ++j) {
                RealVector p(3);
                p << static_cast<double>(i) / res, static_cast<double>(j) / res,
                    static_cast<double>(res - i - j) / res;
                starts.push_back(p);
            }
    } else {
        CounterRng rng(2024, 77);
        for (int k = 0; k < opts.random_starts; ++k) {
            RealVector p(n);
            for (int x = 0; x < n; ++x) p[x] = -std::log(1.0 - rng.next_double());
            starts.push_back(p / p.sum());
        }
    }
    for (const auto& p : starts) {
        const double s = scan_value(p);
        if (s < best_s) {
            best_s = s;
            best_p = p;
        }
    }

    if (n == 2) {
        // 1-D convex problem: golden-section on the first weight.
        const double t_star = detail::golden_max(
            [&](double t) {
                RealVector p(2);
                p << t, 1.0 - t;
                return -scan_value(p);
            },
            std::max(0.0, best_p[0] - 1.5 / res), std::min(1.0, best_p[0] + 1.5 / res), 36);
        RealVector p(2);
        p << t_star, 1.0 - t_star;
        if (scan_value(p) < best_s) best_p = p;
    } else {
        // Projected subgradient descent on S(P); subgradient = per-letter Q
        // at the optimizing sigma.
        RealVector p = best_p;
        for (int k = 0; k < opts.refine_iters; ++k) {
            const SigmaSolution sol = cq_sigma_solve(w, p, alpha, kind, opts.scan_sigma);
            std::vector<HermitianOperator> states;
            for (const auto& s : w.states) states.push_back(s.op());
            detail::LetterQ letter_q(kind, alpha, std::move(states));
            std::vector<double> q_values;
            letter_q.evaluate(sol.sigma_opt.entries(), q_values, nullptr, nullptr);
            RealVector g(n);
            double s_here = 0;
            for (int x = 0; x < n; ++x) {
                g[x] = q_values[x];
                s_here += p[x] * q_values[x];
            }
            if (s_here < best_s) {
                best_s = s_here;
                best_p = p;
            }
            const double eta = 0.5 / std::sqrt(static_cast<double>(k + 1));
            p = project_simplex(p - eta * g / std::max(g.cwiseAbs().maxCoeff(), 1e-12));
        }
    }

    const SigmaSolution inner = cq_sigma_solve(w, best_p, alpha, kind, opts.sigma);
    return ChannelMutualInfo{renyi_d_from_q(inner.q_value, alpha), inner.q_value,
                             InputDistribution(best_p), inner};
}

struct RadiusMiCheck {
    double radius = 0;
    double cmi = 0;
    double gap = 0;
};

inline RadiusMiCheck check_radius_equals_mi(const CQChannel& w, double alpha,
                                            DivergenceKind kind, const PMaxOptions& opts = {}) {
    MutualInfoOptions radius_opts = opts.sigma;
    const double radius = divergence_radius(w, alpha, kind, radius_opts).value;
    const double cmi = channel_mutual_info(w, alpha, kind, opts).value;
    return RadiusMiCheck{radius, cmi, std::abs(radius - cmi)};
}

// (1/n) * measured mutual information of rho_AB^(x)n with the A legs grouped
// in front; n-copy dimensions are capped by the global ceiling.
inline double n_copy_measured_mi(const DensityOperator& rho_ab, double alpha, int n,
                                 const MutualInfoOptions& opts = {}) {
    if (rho_ab.factors().size() != 2)
        throw InvalidInput("n_copy_measured_mi: state must carry factors [dA, dB]");
    if (n < 1 || n > 3) throw InvalidInput("n_copy_measured_mi: n must be 1..3");
    const int da = rho_ab.factors()[0], db = rho_ab.factors()[1];
    double joint_dim = 1;
    for (int k = 0; k < n; ++k) joint_dim *= da * db;
    if (joint_dim > tol::dim_ceiling)
        throw SizeError("n_copy_measured_mi: (dA*dB)^n exceeds the dimension ceiling");

    HermitianOperator power = rho_ab.op();
    for (int k = 1; k < n; ++k) power = tensor(power, rho_ab.op());
    // Legs are (A1,B1,...,An,Bn); bring all A legs to the front.
    std::vector<int> perm;
    for (int k = 0; k < n; ++k) perm.push_back(2 * k);
    for (int k = 0; k < n; ++k) perm.push_back(2 * k + 1);
    HermitianOperator grouped = permute_factors(power, perm);
    int da_n = 1, db_n = 1;
    for (int k = 0; k < n; ++k) {
        da_n *= da;
        db_n *= db;
    }
    const DensityOperator regrouped(grouped.entries(), {da_n, db_n});
    return mutual_info(regrouped, alpha, DivergenceKind::measured, opts).value / n;
}

// Closed form for the Petz mutual information of a cq state:
// max_sigma tr[M sigma^(1-alpha)] = (tr[M^(1/alpha)])^alpha at
// sigma* = M^(1/alpha)/tr, with M = sum_x P(x) rho_x^alpha  (Hoelder).
inline double cq_petz_mutual_info_q(const CQChannel& w, const InputDistribution& p,
                                    double alpha) {
    Matrix m = Matrix::Zero(w.dim(), w.dim());
    for (int x = 0; x < w.letters(); ++x)
        m += p.probs[x] * mpow(w.states[x].op(), alpha).entries();
    const HermitianOperator m_op(0.5 * (m + m.adjoint().eval()));
    return std::pow(mpow(m_op, 1.0 / alpha).trace(), alpha);
}

struct DualityCheck {
    double lhs1 = 0, rhs1 = 0;  // sigma-minimized Petz MI vs sandwiched dual
    double lhs2 = 0, rhs2 = 0;  // fixed-sigma Petz divergence vs Petz dual
};

// Purification-based duality identities. The purification is
// |rho> = sum_x sqrt(P(x)) |x>_X |x>_X' (sqrt(rho_x) (x) 1) |Omega>_BC,
// and both right-hand sides evaluate divergences against the non-normalized
// operator rho_X^(-1) (x) rho_X'C.
inline DualityCheck duality_identities(const CQChannel& w, const InputDistribution& p,
                                       double alpha) {
    if (!(alpha > 0.5 && alpha < 1.0))
        throw InvalidInput("duality_identities: alpha must lie in (1/2, 1)");
    const int m = w.letters(), d = w.dim();
    if (p.probs.size() != m) throw InvalidInput("duality_identities: size mismatch");
    if (p.probs.minCoeff() <= 0)
        throw InvalidInput("duality_identities: zero-probability letter (rho_X not invertible)");
    if (static_cast<long>(m) * m * d * d > tol::dim_ceiling)
        throw SizeError("duality_identities: purified system exceeds the dimension ceiling");

    // Purified vector on X (x) X' (x) B (x) C.
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(m * m * d * d);
    for (int x = 0; x < m; ++x) {
        const Matrix root = mpow(w.states[x].op(), 0.5).entries();
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) {
                const long idx = ((static_cast<long>(x) * m + x) * d + b) * d + c;
                psi[idx] = std::sqrt(p.probs[x]) * root(b, c);
            }
    }
    const HermitianOperator purified((psi * psi.adjoint()).eval(),
                                     std::vector<int>{m, m, d, d});
    const HermitianOperator rho_xxc = partial_trace(purified, {0, 1, 3});
    const HermitianOperator rho_xc = partial_trace(rho_xxc, {1, 2});

    RealVector inv_p(m);
    for (int x = 0; x < m; ++x) inv_p[x] = 1.0 / p.probs[x];
    const HermitianOperator rho_x_inv(
        inv_p.cast<Complex>().asDiagonal().toDenseMatrix(), std::vector<int>{m});
    const HermitianOperator second = tensor(rho_x_inv, rho_xc);

    const double inv_alpha = 1.0 / alpha;
    DualityCheck out;
    out.lhs1 = renyi_d_from_q(cq_petz_mutual_info_q(w, p, alpha), alpha);
    out.rhs1 = -renyi_d_from_q(sandwiched_q(rho_xxc, second, inv_alpha), inv_alpha);

    const DensityOperator rho_xb = joint_state(w, p);
    RealVector pv = p.probs;
    const HermitianOperator rho_x(pv.cast<Complex>().asDiagonal().toDenseMatrix(),
                                  std::vector<int>{m});
    const HermitianOperator product = tensor(rho_x, w.average_state(p.probs).op());
    const double beta = 2.0 - inv_alpha;
    out.lhs2 = renyi_d_from_q(petz_q(rho_xb.op(), product, beta), beta);
    out.rhs2 = -renyi_d_from_q(petz_q(rho_xxc, second, inv_alpha), inv_alpha);
    return out;
}

}  // namespace rdl
