#include "rdl/renyi.hpp"

#include <cmath>

#include "rdl/random.hpp"
#include "test_support.hpp"

using namespace rdl;
using namespace rdl::test;

namespace {

DensityOperator plus_state() {
    Matrix m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    return DensityOperator(m);
}

double witness_objective(const HermitianOperator& rho, const HermitianOperator& sigma,
                         double alpha, const HermitianOperator& y) {
    const double r = (1.0 - alpha) / alpha;
    return alpha * real_inner(rho.entries(), mpow(y, -r).entries()) +
           (1.0 - alpha) * real_inner(sigma.entries(), y.entries());
}

}  // namespace

TEST_CASE("umegaki relative entropy") {
    CounterRng rng(101, 0);
    const DensityOperator rho = random_density(rng, 3);
    CHECK(umegaki(rho, rho) == Catch::Approx(0.0).margin(1e-10));

    CHECK(umegaki(DensityOperator(diag2(1, 0)), DensityOperator(0.5 * Matrix::Identity(2, 2))) ==
          Catch::Approx(1.0).epsilon(1e-10));

    CHECK(std::isinf(umegaki(plus_state(), DensityOperator(diag2(1, 0)))));
}

TEST_CASE("petz q closed forms") {
    CounterRng rng(103, 0);
    const DensityOperator rho = random_density(rng, 3);
    for (double alpha : {0.5, 0.75, 0.9})
        CHECK(petz_q(rho.op(), rho.op(), alpha) == Catch::Approx(1.0).margin(1e-10));

    const DensityOperator pure(diag2(1, 0));
    const DensityOperator mixed(0.5 * Matrix::Identity(2, 2));
    CHECK(petz_q(pure.op(), mixed.op(), 0.5) == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(petz_divergence(pure, mixed, 0.5) == Catch::Approx(1.0).epsilon(1e-12));

    const auto pair = random_commuting_pair(rng, 3);
    for (double alpha : {0.6, 0.9}) {
        double classical = 0;
        for (int i = 0; i < 3; ++i)
            classical += std::pow(pair.p[i], alpha) * std::pow(pair.q[i], 1 - alpha);
        CHECK(petz_q(pair.first.op(), pair.second.op(), alpha) ==
              Catch::Approx(classical).margin(1e-9));
    }
}

TEST_CASE("sandwiched q") {
    CounterRng rng(107, 0);
    const DensityOperator rho = random_density(rng, 3);
    CHECK(sandwiched_q(rho.op(), rho.op(), 0.7) == Catch::Approx(1.0).margin(1e-10));

    const auto [a, b, pv, qv] = random_commuting_pair(rng, 4);
    for (double alpha : {0.5, 0.8})
        CHECK(sandwiched_q(a.op(), b.op(), alpha) ==
              Catch::Approx(petz_q(a.op(), b.op(), alpha)).margin(1e-10));

    // Non-commuting pairs separate the two divergences.
    for (int rep = 0; rep < 5; ++rep) {
        const DensityOperator x = random_density(rng, 2);
        const DensityOperator y = random_density(rng, 2);
        const double d_sand = sandwiched_divergence(x, y, 0.7);
        const double d_petz = petz_divergence(x, y, 0.7);
        CHECK(d_sand <= d_petz + 1e-10);
        CHECK(d_petz - d_sand >= 1e-9);
    }
}

TEST_CASE("measured q on fixed inputs") {
    CounterRng rng(109, 0);
    const DensityOperator rho = random_density(rng, 3);
    const auto same = measured_q(rho.op(), rho.op(), 0.7);
    CHECK(same.value == Catch::Approx(1.0).margin(1e-8));
    CHECK(frobenius_distance(same.witness.entries(), Matrix::Identity(3, 3)) < 1e-4);

    const auto commuting =
        measured_q(HermitianOperator(diag2(0.9, 0.1)),
                   HermitianOperator(0.5 * Matrix::Identity(2, 2)), 0.5);
    CHECK(commuting.value ==
          Catch::Approx(std::sqrt(0.45) + std::sqrt(0.05)).margin(1e-9));
    CHECK(renyi_d_from_q(commuting.value, 0.5) == Catch::Approx(0.321928).margin(1e-6));
    CHECK(commuting.gradient_norm <= 1e-9);
}

TEST_CASE("measured q matches the qubit oracle") {
    CounterRng rng(113, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const DensityOperator rho = random_density(rng, 2);
        const DensityOperator sigma = random_density(rng, 2);
        for (double alpha : {0.5, 0.75}) {
            const double variational = measured_q(rho.op(), sigma.op(), alpha).value;
            const double oracle = measured_q_qubit_oracle(rho, sigma, alpha, 180);
            CHECK(variational == Catch::Approx(oracle).margin(1e-4));
        }
    }
}

TEST_CASE("qubit oracle self-consistency") {
    CounterRng rng(127, 0);
    const DensityOperator rho = random_density(rng, 2);
    CHECK(measured_q_qubit_oracle(rho, rho, 0.6, 90) == Catch::Approx(1.0).margin(1e-10));

    const DensityOperator da(diag2(0.8, 0.2));
    const DensityOperator db(diag2(0.3, 0.7));
    const double classical =
        std::pow(0.8, 0.6) * std::pow(0.3, 0.4) + std::pow(0.2, 0.6) * std::pow(0.7, 0.4);
    CHECK(measured_q_qubit_oracle(da, db, 0.6, 90) == Catch::Approx(classical).margin(1e-8));

    for (int rep = 0; rep < 5; ++rep) {
        const DensityOperator x = random_density(rng, 2);
        const DensityOperator y = random_density(rng, 2);
        const double coarse = measured_q_qubit_oracle(x, y, 0.7, 180);
        const double fine = measured_q_qubit_oracle(x, y, 0.7, 720);
        CHECK(std::abs(coarse - fine) <= 1e-5);
    }

    CHECK_THROWS_AS(measured_q_qubit_oracle(random_density(rng, 3), random_density(rng, 3),
                                            0.6, 90),
                    UnsupportedDimension);
}

TEST_CASE("divergence ordering chain and commuting collapse") {
    CounterRng rng(131, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const int dim = 2 + static_cast<int>(rng.next_index(2));
        const DensityOperator rho = random_density(rng, dim);
        const DensityOperator sigma = random_density(rng, dim);
        for (double alpha : {0.5, 0.6, 0.75, 0.9}) {
            const double d_meas = measured_divergence(rho, sigma, alpha);
            const double d_sand = sandwiched_divergence(rho, sigma, alpha);
            const double d_petz = petz_divergence(rho, sigma, alpha);
            CHECK(d_meas <= d_sand + 1e-6);
            CHECK(d_sand <= d_petz + 1e-9);
        }
    }
    for (int rep = 0; rep < 10; ++rep) {
        const auto [a, b, pv, qv] = random_commuting_pair(rng, 3);
        const double d_meas = measured_divergence(a, b, 0.75);
        const double d_petz = petz_divergence(a, b, 0.75);
        const double d_sand = sandwiched_divergence(a, b, 0.75);
        CHECK(std::abs(d_meas - d_petz) <= 1e-6);
        CHECK(std::abs(d_sand - d_petz) <= 1e-10);
    }
}

TEST_CASE("variational gradient agrees with finite differences") {
    CounterRng rng(137, 0);
    const double step = 1e-5;
    for (int rep = 0; rep < 5; ++rep) {
        const DensityOperator rho = random_density(rng, 3);
        const DensityOperator sigma = random_density(rng, 3);
        const HermitianOperator h0 = random_hermitian(rng, 3);
        Matrix grad;
        measured_objective(rho.op(), sigma.op(), 0.7, h0.entries(), &grad);
        for (int dir = 0; dir < 4; ++dir) {
            const HermitianOperator delta = random_hermitian(rng, 3);
            const double forward = measured_objective(
                rho.op(), sigma.op(), 0.7, h0.entries() + step * delta.entries());
            const double backward = measured_objective(
                rho.op(), sigma.op(), 0.7, h0.entries() - step * delta.entries());
            const double numeric = (forward - backward) / (2 * step);
            const double analytic = real_inner(grad, delta.entries());
            CHECK(std::abs(numeric - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)));
        }
    }
}

TEST_CASE("variational objective is convex in the witness") {
    CounterRng rng(139, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const DensityOperator rho = random_density(rng, 3);
        const DensityOperator sigma = random_density(rng, 3);
        const HermitianOperator y0 = random_pd(rng, 3);
        const HermitianOperator y1 = random_pd(rng, 3);
        const double t = rng.uniform(0.1, 0.9);
        const HermitianOperator yt = (1 - t) * y0 + t * y1;
        const double f0 = witness_objective(rho.op(), sigma.op(), 0.6, y0);
        const double f1 = witness_objective(rho.op(), sigma.op(), 0.6, y1);
        const double ft = witness_objective(rho.op(), sigma.op(), 0.6, yt);
        CHECK(ft <= (1 - t) * f0 + t * f1 + 1e-9);
    }
}

TEST_CASE("data processing under pinching") {
    CounterRng rng(149, 0);
    for (int rep = 0; rep < 5; ++rep) {
        const DensityOperator rho = random_density(rng, 3);
        const DensityOperator sigma = random_density(rng, 3);
        const HermitianOperator ref = random_hermitian(rng, 3);
        const DensityOperator rho_p(pinch(rho.op(), ref).entries());
        const DensityOperator sigma_p(pinch(sigma.op(), ref).entries());
        for (double alpha : {0.6, 0.9}) {
            CHECK(petz_divergence(rho_p, sigma_p, alpha) <=
                  petz_divergence(rho, sigma, alpha) + 1e-8);
            CHECK(sandwiched_divergence(rho_p, sigma_p, alpha) <=
                  sandwiched_divergence(rho, sigma, alpha) + 1e-8);
            CHECK(measured_divergence(rho_p, sigma_p, alpha) <=
                  measured_divergence(rho, sigma, alpha) + 1e-8);
        }
    }
}

TEST_CASE("scaling the second argument shifts the divergence") {
    CounterRng rng(151, 0);
    const DensityOperator rho = random_density(rng, 2);
    const DensityOperator sigma = random_density(rng, 2);
    const double c = 1.7;
    for (double alpha : {0.6, 0.8}) {
        const double base_petz = renyi_d_from_q(petz_q(rho.op(), sigma.op(), alpha), alpha);
        const double scaled_petz =
            renyi_d_from_q(petz_q(rho.op(), c * sigma.op(), alpha), alpha);
        CHECK(scaled_petz == Catch::Approx(base_petz - std::log2(c)).margin(1e-8));

        const double base_sand =
            renyi_d_from_q(sandwiched_q(rho.op(), sigma.op(), alpha), alpha);
        const double scaled_sand =
            renyi_d_from_q(sandwiched_q(rho.op(), c * sigma.op(), alpha), alpha);
        CHECK(scaled_sand == Catch::Approx(base_sand - std::log2(c)).margin(1e-8));

        const double base_meas =
            renyi_d_from_q(measured_q(rho.op(), sigma.op(), alpha).value, alpha);
        const double scaled_meas =
            renyi_d_from_q(measured_q(rho.op(), c * sigma.op(), alpha).value, alpha);
        CHECK(scaled_meas == Catch::Approx(base_meas - std::log2(c)).margin(1e-8));
    }
}

TEST_CASE("non-convergence carries the best iterate") {
    CounterRng rng(157, 0);
    const DensityOperator rho = random_density(rng, 3);
    const DensityOperator sigma = random_density(rng, 3);
    VariationalOptions opts;
    opts.max_iters = 1;
    opts.grad_tol = 1e-15;
    try {
        measured_q(rho.op(), sigma.op(), 0.7, opts);
        FAIL("expected VariationalConvergenceError");
    } catch (const VariationalConvergenceError& e) {
        CHECK(e.best.value > 0);
        CHECK(min_eigenvalue(e.best.witness) > 0);
    }
}
