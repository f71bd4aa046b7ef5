#include "rdl/channel.hpp"

#include <cmath>

#include "rdl/random.hpp"
#include "test_support.hpp"

using namespace rdl;
using namespace rdl::test;

namespace {

CQChannel bsc_channel(double flip) {
    return CQChannel({"0", "1"},
                     {DensityOperator(diag2(1 - flip, flip)), DensityOperator(diag2(flip, 1 - flip))});
}

CQChannel orthogonal_pure_channel() {
    return CQChannel({"0", "1"}, {DensityOperator(diag2(1, 0)), DensityOperator(diag2(0, 1))});
}

CQChannel random_qubit_channel(CounterRng& rng, int letters = 2, int dim = 2) {
    std::vector<std::string> labels;
    std::vector<DensityOperator> states;
    for (int x = 0; x < letters; ++x) {
        labels.push_back(std::to_string(x));
        states.push_back(random_density(rng, dim));
    }
    return CQChannel(labels, states);
}

// Classical binary Renyi divergence radius at uniform center for symmetric
// binary channels: 1 - H_alpha(p) in bits.
double symmetric_binary_radius(double flip, double alpha) {
    const double h = (1.0 / (1.0 - alpha)) *
                     std::log2(std::pow(flip, alpha) + std::pow(1 - flip, alpha));
    return 1.0 - h;
}

// Brute force over diagonal sigma on a refined grid: classical mutual
// information oracle for commuting channels.
double diagonal_sigma_oracle(const CQChannel& w, const RealVector& p, double alpha) {
    const int d = w.dim();
    REQUIRE(d == 2);
    std::vector<RealVector> spectra;
    for (const auto& s : w.states) {
        RealVector diag(d);
        for (int i = 0; i < d; ++i) diag[i] = s.entries()(i, i).real();
        spectra.push_back(diag);
    }
    auto weighted_q = [&](double t) {
        double total = 0;
        for (int x = 0; x < w.letters(); ++x) {
            const double q0 = std::pow(spectra[x][0], alpha) * std::pow(t, 1 - alpha);
            const double q1 = std::pow(spectra[x][1], alpha) * std::pow(1 - t, 1 - alpha);
            total += p[x] * (q0 + q1);
        }
        return total;
    };
    double best_t = 0.5, best = weighted_q(0.5);
    for (int k = 0; k <= 2000; ++k) {
        const double t = k / 2000.0;
        const double v = weighted_q(t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    const double lo = std::max(0.0, best_t - 1e-3), hi = std::min(1.0, best_t + 1e-3);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    for (int it = 0; it < 80; ++it) {
        const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        if (weighted_q(x1) >= weighted_q(x2))
            b = x2;
        else
            a = x1;
    }
    return renyi_d_from_q(weighted_q(0.5 * (a + b)), alpha);
}

}  // namespace

TEST_CASE("joint state structure") {
    CounterRng rng(211, 0);
    const DensityOperator rho0 = random_density(rng, 3);
    const CQChannel single({"a"}, {rho0});
    const auto js = joint_state(single, InputDistribution::uniform(1));
    CHECK(js.factors() == std::vector<int>{1, 3});
    CHECK(frobenius_distance(js.entries(), rho0.entries()) < 1e-14);

    const auto orthogonal = joint_state(orthogonal_pure_channel(), InputDistribution::uniform(2));
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = 0.5;
    expected(3, 3) = 0.5;
    CHECK(frobenius_distance(orthogonal.entries(), expected) < 1e-14);

    const CQChannel w = random_qubit_channel(rng, 3, 2);
    RealVector p(3);
    p << 0.5, 0.3, 0.2;
    const auto state = joint_state(w, InputDistribution(p));
    const auto marginal = partial_trace(state.op(), {1});
    CHECK(frobenius_distance(marginal.entries(), w.average_state(p).entries()) <= 1e-12);
}

TEST_CASE("mutual information vanishes on product states") {
    CounterRng rng(223, 0);
    const DensityOperator a = random_density(rng, 2);
    const DensityOperator b = random_density(rng, 2);
    const DensityOperator product(tensor(a.op(), b.op()).entries(), {2, 2});
    for (DivergenceKind kind :
         {DivergenceKind::petz, DivergenceKind::sandwiched, DivergenceKind::measured}) {
        const auto sol = mutual_info(product, 0.7, kind);
        CHECK(sol.value == Catch::Approx(0.0).margin(2e-6));
        CHECK(frobenius_distance(sol.sigma_opt.entries(), b.entries()) < 2e-3);
    }
}

TEST_CASE("cq mutual information matches the diagonal-sigma oracle") {
    const CQChannel w = bsc_channel(0.1);
    RealVector p(2);
    p << 0.4, 0.6;
    for (DivergenceKind kind :
         {DivergenceKind::petz, DivergenceKind::sandwiched, DivergenceKind::measured}) {
        const auto sol = mutual_info(joint_state(w, InputDistribution(p)), 0.5, kind);
        const double oracle = diagonal_sigma_oracle(w, p, 0.5);
        CHECK(sol.value == Catch::Approx(oracle).margin(2e-5));
    }
}

TEST_CASE("petz mutual information agrees with its closed form") {
    CounterRng rng(227, 0);
    for (int rep = 0; rep < 3; ++rep) {
        const CQChannel w = random_qubit_channel(rng);
        RealVector p(2);
        p << 0.35, 0.65;
        const InputDistribution dist(p);
        for (double alpha : {0.6, 0.8}) {
            const double closed = renyi_d_from_q(cq_petz_mutual_info_q(w, dist, alpha), alpha);
            const auto fw =
                mutual_info(joint_state(w, dist), alpha, DivergenceKind::petz);
            CHECK(fw.value == Catch::Approx(closed).margin(1e-5));
        }
    }
}

TEST_CASE("solver self-consistency from independent starts") {
    CounterRng rng(229, 0);
    Matrix bell = Matrix::Zero(4, 4);
    for (int i : {0, 3})
        for (int j : {0, 3}) bell(i, j) = 0.5;
    const DensityOperator mes(bell, {2, 2});

    MutualInfoOptions opts_a;
    MutualInfoOptions opts_b;
    opts_b.sigma.initial_sigma = random_density(rng, 2).entries();
    const auto run_a = mutual_info(mes, 0.5, DivergenceKind::sandwiched, opts_a);
    const auto run_b = mutual_info(mes, 0.5, DivergenceKind::sandwiched, opts_b);
    CHECK(std::abs(run_a.value - run_b.value) <= 1e-6);
}

TEST_CASE("divergence radius fixed points") {
    CounterRng rng(233, 0);
    const DensityOperator rho0 = random_density(rng, 2);
    const CQChannel copies({"a", "b"}, {rho0, rho0});
    for (DivergenceKind kind :
         {DivergenceKind::petz, DivergenceKind::sandwiched, DivergenceKind::measured}) {
        const auto sol = divergence_radius(copies, 0.7, kind);
        CHECK(sol.value == Catch::Approx(0.0).margin(2e-6));
    }

    for (DivergenceKind kind :
         {DivergenceKind::petz, DivergenceKind::sandwiched, DivergenceKind::measured}) {
        const auto bsc = divergence_radius(bsc_channel(0.1), 0.5, kind);
        CHECK(bsc.value == Catch::Approx(symmetric_binary_radius(0.1, 0.5)).margin(2e-5));
    }

    for (double alpha : {0.5, 0.75, 0.9})
        for (DivergenceKind kind :
             {DivergenceKind::petz, DivergenceKind::sandwiched, DivergenceKind::measured}) {
            const auto sol = divergence_radius(orthogonal_pure_channel(), alpha, kind);
            CHECK(sol.value == Catch::Approx(1.0).margin(2e-5));
        }
}

TEST_CASE("radius is monotone in alpha and ordered across kinds") {
    CounterRng rng(239, 0);
    const CQChannel w = random_qubit_channel(rng);
    std::map<DivergenceKind, std::vector<double>> values;
    for (DivergenceKind kind :
         {DivergenceKind::petz, DivergenceKind::sandwiched, DivergenceKind::measured}) {
        for (double alpha : {0.5, 0.6, 0.75, 0.9})
            values[kind].push_back(divergence_radius(w, alpha, kind).value);
        for (size_t i = 1; i < values[kind].size(); ++i)
            CHECK(values[kind][i] >= values[kind][i - 1] - 1e-6);
    }
    for (size_t i = 0; i < 4; ++i) {
        CHECK(values[DivergenceKind::measured][i] <=
              values[DivergenceKind::sandwiched][i] + 1e-3);
        CHECK(values[DivergenceKind::sandwiched][i] <= values[DivergenceKind::petz][i] + 1e-3);
    }
}

TEST_CASE("channel mutual information solves the P side") {
    CounterRng rng(241, 0);
    const DensityOperator rho0 = random_density(rng, 2);
    const CQChannel single({"a"}, {rho0});
    CHECK(channel_mutual_info(single, 0.7, DivergenceKind::sandwiched).value ==
          Catch::Approx(0.0).margin(1e-6));

    const auto orth = channel_mutual_info(orthogonal_pure_channel(), 0.6,
                                          DivergenceKind::sandwiched);
    CHECK(orth.value == Catch::Approx(1.0).margin(1e-4));
    CHECK(orth.p_opt.probs[0] == Catch::Approx(0.5).margin(1e-2));

    const auto bsc_mi = channel_mutual_info(bsc_channel(0.1), 0.5, DivergenceKind::sandwiched);
    const auto bsc_radius = divergence_radius(bsc_channel(0.1), 0.5, DivergenceKind::sandwiched);
    CHECK(std::abs(bsc_mi.value - bsc_radius.value) <= 1e-4);
}

TEST_CASE("radius equals channel mutual information") {
    CounterRng rng(251, 0);
    for (int rep = 0; rep < 2; ++rep) {
        const CQChannel w = random_qubit_channel(rng);
        for (double alpha : {0.5, 0.75}) {
            const auto sand = check_radius_equals_mi(w, alpha, DivergenceKind::sandwiched);
            CHECK(sand.gap <= 1e-4);
            const auto meas = check_radius_equals_mi(w, alpha, DivergenceKind::measured);
            CHECK(meas.gap <= 1e-3);
        }
    }
}

TEST_CASE("saddle point consistency at the solved pair") {
    CounterRng rng(257, 0);
    const CQChannel w = random_qubit_channel(rng);
    const double alpha = 0.6;
    const auto cmi = channel_mutual_info(w, alpha, DivergenceKind::sandwiched);
    const auto radius = divergence_radius(w, alpha, DivergenceKind::sandwiched);
    double worst = -1e30, average = 0;
    for (int x = 0; x < w.letters(); ++x) {
        const double dx = renyi_d_from_q(
            sandwiched_q(w.states[x].op(), radius.sigma_opt.op(), alpha), alpha);
        worst = std::max(worst, dx);
        average += cmi.p_opt.probs[x] * dx;
    }
    CHECK(worst - average <= 1e-3);
}

TEST_CASE("n-copy measured mutual information") {
    CounterRng rng(263, 0);
    const DensityOperator a = random_density(rng, 2);
    const DensityOperator b = random_density(rng, 2);
    const DensityOperator product(tensor(a.op(), b.op()).entries(), {2, 2});
    CHECK(n_copy_measured_mi(product, 0.7, 2) == Catch::Approx(0.0).margin(5e-5));

    const DensityOperator joint(random_density(rng, 4).entries(), {2, 2});
    const double single = mutual_info(joint, 0.7, DivergenceKind::measured).value;
    CHECK(n_copy_measured_mi(joint, 0.7, 1) == Catch::Approx(single).margin(1e-6));

    const double two_copy = n_copy_measured_mi(joint, 0.7, 2);
    const double sandwiched = mutual_info(joint, 0.7, DivergenceKind::sandwiched).value;
    CHECK(two_copy <= sandwiched + 1e-3);
    CHECK(two_copy >= single - 1e-3);

    CHECK_THROWS_AS(n_copy_measured_mi(DensityOperator(random_density(rng, 9).entries(), {3, 3}),
                                       0.7, 2),
                    SizeError);
}

TEST_CASE("duality identities") {
    CounterRng rng(269, 0);

    // Pure-state letters.
    const CQChannel pure_channel({"0", "1"},
                                 {random_pure(rng, 2), random_pure(rng, 2)});
    const auto pure_check =
        duality_identities(pure_channel, InputDistribution::uniform(2), 0.7);
    CHECK(pure_check.lhs2 == Catch::Approx(pure_check.rhs2).margin(1e-6));

    // Commuting channel: the first identity closes.
    const auto commuting = duality_identities(bsc_channel(0.15), InputDistribution::uniform(2), 0.7);
    CHECK(commuting.lhs1 == Catch::Approx(commuting.rhs1).margin(1e-6));
    CHECK(commuting.lhs2 == Catch::Approx(commuting.rhs2).margin(1e-6));

    // Random qubit channels.
    for (int rep = 0; rep < 3; ++rep) {
        const CQChannel w = random_qubit_channel(rng);
        const auto check = duality_identities(w, InputDistribution::uniform(2), 0.7);
        CHECK(check.lhs1 == Catch::Approx(check.rhs1).margin(1e-6));
        CHECK(check.lhs2 == Catch::Approx(check.rhs2).margin(1e-6));
    }

    RealVector degenerate(2);
    degenerate << 1.0, 0.0;
    CHECK_THROWS_AS(duality_identities(bsc_channel(0.1), InputDistribution(degenerate), 0.7),
                    InvalidInput);
}
