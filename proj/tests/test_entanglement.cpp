#include <catch2/catch_amalgamated.hpp>

#include <qres/entanglement.hpp>

#include "support.hpp"

using namespace qres;
using qres::testing::random_channel;
using qres::testing::random_complex;
using qres::testing::random_density;
using qres::testing::random_pure_state;

TEST_CASE("pure-state concurrence") {
    REQUIRE(concurrence_pure(bell_phi_plus()) == Catch::Approx(1.0));
    Vec prod = Vec::Zero(4);
    prod(1) = 1.0;
    REQUIRE(concurrence_pure(PureState(prod, {2, 2})) == 0.0);
    for (double theta : {0.1, 0.4, 1.0, 1.4}) {
        Vec v = Vec::Zero(4);
        v(0) = std::cos(theta);
        v(3) = std::sin(theta);
        REQUIRE(concurrence_pure(PureState(v, {2, 2})) ==
                Catch::Approx(std::abs(std::sin(2 * theta))).margin(1e-12));
    }
    REQUIRE_THROWS_AS(concurrence_pure(random_pure(4, 1, {4})), DimensionError);
}

TEST_CASE("Wootters concurrence") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        auto psi = random_pure_state(4, rng, {2, 2});
        REQUIRE(concurrence(psi.density()) ==
                Catch::Approx(concurrence_pure(psi)).margin(1e-9));
    }
    // Werner family: C = max(0, (3 mu - 1)/2)
    auto phi = bell_phi_plus().density();
    for (double mu : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
        DensityMatrix werner(mu * phi.matrix() + (1 - mu) * Mat::Identity(4, 4) / 4.0, {2, 2});
        REQUIRE(concurrence(werner) ==
                Catch::Approx(std::max(0.0, (3 * mu - 1) / 2)).margin(1e-10));
    }
    Mat diag = Mat::Zero(4, 4);
    diag(0, 0) = diag(3, 3) = 0.5;
    REQUIRE(concurrence(DensityMatrix(diag, {2, 2})) == 0.0);
}

TEST_CASE("entanglement of formation") {
    REQUIRE(eof_from_concurrence(1.0) == Catch::Approx(1.0));
    REQUIRE(eof_from_concurrence(0.0) == Catch::Approx(0.0).margin(1e-12));
    // scalar oracle: h((1+sqrt(3)/2)/2) evaluated directly
    const double x = (1.0 + std::sqrt(0.75)) / 2.0;
    const double oracle = -x * std::log2(x) - (1 - x) * std::log2(1 - x);
    REQUIRE(oracle == Catch::Approx(0.354578902665).margin(1e-9));
    REQUIRE(eof_from_concurrence(0.5) == Catch::Approx(oracle).margin(1e-6));
    REQUIRE(eof(bell_phi_plus().density()) == Catch::Approx(1.0));
}

TEST_CASE("G-concurrence") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        auto psi = random_pure_state(4, rng, {2, 2});
        REQUIRE(g_concurrence_pure(psi) == Catch::Approx(concurrence_pure(psi)).margin(1e-10));
    }
    for (int d : {2, 3, 4}) REQUIRE(g_concurrence_pure(max_entangled(d)) == Catch::Approx(1.0));

    Vec v = Vec::Zero(9);  // rank-2 state of two qutrits
    v(0) = std::sqrt(0.5);
    v(4) = std::sqrt(0.5);
    REQUIRE(g_concurrence_pure(PureState(v, {3, 3})) == Catch::Approx(0.0).margin(1e-12));

    REQUIRE_THROWS_AS(g_concurrence_pure(random_pure_state(6, rng, {2, 3})), DimensionError);
}

TEST_CASE("SL invariance of G-concurrence") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 2);
        auto psi = random_pure_state(d * d, rng, {d, d});
        Mat a = random_complex(d, d, rng);
        Mat b = random_complex(d, d, rng);
        if (std::abs(a.determinant()) < 1e-3 || std::abs(b.determinant()) < 1e-3) continue;
        Vec phi = Vec::Zero(d * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l)
                        phi(i * d + j) += a(i, k) * b(j, l) * psi.amplitudes()(k * d + l);
        const double n = phi.norm();
        // homogeneity normalizes the transformed state
        const double lhs = n * n * g_concurrence_pure(PureState(phi / n, {d, d}));
        const double dets = std::pow(std::abs(a.determinant() * b.determinant()), 2.0 / d);
        const double rhs = dets * g_concurrence_pure(psi);
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-8 * std::max(1.0, rhs)));
    }
}

TEST_CASE("quality factor of named channels") {
    for (double gamma : {0.25, 0.5, 0.75}) {
        REQUIRE(quality_factor(amplitude_damping(gamma)).value ==
                Catch::Approx(std::sqrt(1 - gamma)).margin(1e-9));
        REQUIRE(quality_factor(phase_damping(gamma)).value ==
                Catch::Approx(std::sqrt(1 - gamma)).margin(1e-9));
    }
    REQUIRE(quality_factor(amplitude_damping(0.36)).value == Catch::Approx(0.8).margin(1e-9));
    REQUIRE(quality_factor(phase_damping(0.19)).value == Catch::Approx(0.9).margin(1e-9));

    std::mt19937_64 rng(4);
    auto u = qres::testing::random_unitary(2, rng);
    REQUIRE(quality_factor(unitary_channel(u, {2})).value == Catch::Approx(1.0).margin(1e-9));
    auto u3 = qres::testing::random_unitary(3, rng);
    REQUIRE(quality_factor(unitary_channel(u3, {3})).value == Catch::Approx(1.0).margin(1e-9));

    // full dephasing breaks all entanglement
    auto dephaser = EinselectionSpec::computational({2}).channel();
    REQUIRE(quality_factor(dephaser).value == Catch::Approx(0.0).margin(1e-9));

    // mixed Choi states beyond two qubits are out of scope
    REQUIRE_THROWS_AS(quality_factor(depolarizing(0.5, {3})), UnsupportedError);
}

TEST_CASE("entanglement evolution factorization") {
    std::mt19937_64 rng(5);
    auto id = identity_channel({2});
    auto psi0 = random_pure_state(4, rng, {2, 2});
    REQUIRE(evolved_g_concurrence(id, psi0) ==
            Catch::Approx(concurrence_pure(psi0)).margin(1e-10));

    REQUIRE(evolved_g_concurrence(amplitude_damping(0.5), bell_phi_plus()) ==
            Catch::Approx(std::sqrt(0.5)).margin(1e-9));

    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_real_distribution<double> u(0, 1);
        const double gamma = u(rng);
        auto psi = random_pure_state(4, rng, {2, 2});
        REQUIRE(evolved_g_concurrence(amplitude_damping(gamma), psi) ==
                Catch::Approx(std::sqrt(1 - gamma) * concurrence_pure(psi)).margin(1e-8));
    }

    // factorization for arbitrary qubit channels
    for (int trial = 0; trial < 200; ++trial) {
        auto s = random_channel(2, 1 + static_cast<int>(rng() % 3), rng);
        auto psi = random_pure_state(4, rng, {2, 2});
        const double lhs = evolved_g_concurrence(s, psi);
        const double rhs = quality_factor(s).value * concurrence_pure(psi);
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-8));
    }
}

TEST_CASE("mixed-state and two-sided bounds") {
    std::mt19937_64 rng(6);
    auto id = identity_channel({2});
    for (int trial = 0; trial < 200; ++trial) {
        auto s = random_channel(2, 2, rng);
        auto rho = random_density(4, rng, {2, 2});
        const double evolved = concurrence(effective_state(rho, s, id));
        REQUIRE(evolved <= quality_factor(s).value * concurrence(rho) + 1e-8);
    }
    for (int trial = 0; trial < 200; ++trial) {
        auto sa = random_channel(2, 2, rng);
        auto sb = random_channel(2, 2, rng);
        auto rho = random_density(4, rng, {2, 2});
        const double evolved = concurrence(effective_state(rho, sa, sb));
        REQUIRE(evolved <=
                quality_factor(sa).value * quality_factor(sb).value * concurrence(rho) + 1e-8);
    }
}

TEST_CASE("effective state under product restrictions") {
    std::mt19937_64 rng(7);
    auto rho = random_density(4, rng, {2, 2});
    auto id = identity_channel({2});
    REQUIRE(max_abs(effective_state(rho, id, id).matrix() - rho.matrix()) < 1e-12);

    // one-sided amplitude damping on |Psi+>
    const double gamma = 0.4;
    auto eff = effective_state(bell_psi_plus().density(), amplitude_damping(gamma), id);
    REQUIRE(concurrence(eff) == Catch::Approx(std::sqrt(1 - gamma)).margin(1e-9));

    // two-sided dephasing of |Phi+> leaves a classically correlated state
    auto dephaser = EinselectionSpec::computational({2}).channel();
    auto classical = effective_state(bell_phi_plus().density(), dephaser, dephaser);
    REQUIRE(concurrence(classical) == Catch::Approx(0.0).margin(1e-12));

    REQUIRE_THROWS_AS(effective_state(random_density(2, rng), id, id), DimensionError);
}

TEST_CASE("SSR block decomposition") {
    // single particle in two modes; local basis |0>, |1> carries 0 or 1 atoms
    LocalNumbers grading = {{0, 1}, {0, 1}};
    auto psi_plus = bell_psi_plus().density();
    auto dec = ssr_decompose(psi_plus, grading);
    REQUIRE(dec.blocks.size() == 2);
    for (const auto& block : dec.blocks) {
        REQUIRE(block.weight == Catch::Approx(0.5));
        REQUIRE(concurrence(block.state) == Catch::Approx(0.0).margin(1e-12));
        REQUIRE((block.pattern == std::vector<int>{1, 0} ||
                 block.pattern == std::vector<int>{0, 1}));
    }

    auto phi_plus = bell_phi_plus().density();
    auto dec2 = ssr_decompose(phi_plus, grading);
    REQUIRE(dec2.blocks.size() == 2);
    for (const auto& block : dec2.blocks) REQUIRE(block.weight == Catch::Approx(0.5));

    // reassembled blocks equal the dephased state
    std::mt19937_64 rng(8);
    auto rho = random_density(4, rng, {2, 2});
    auto dec3 = ssr_decompose(rho, grading);
    Mat rebuilt = Mat::Zero(4, 4);
    for (const auto& block : dec3.blocks) rebuilt += block.weight * block.state.matrix();
    REQUIRE(max_abs(rebuilt - ssr_dephase(rho, grading).matrix()) < 1e-12);

    // number-diagonal states are fixed points
    Mat diag = Mat::Zero(4, 4);
    diag(0, 0) = 0.3;
    diag(1, 1) = 0.2;
    diag(2, 2) = 0.4;
    diag(3, 3) = 0.1;
    DensityMatrix number_diag(diag, {2, 2});
    REQUIRE(max_abs(ssr_dephase(number_diag, grading).matrix() - diag) < 1e-14);

    REQUIRE_THROWS_AS(ssr_decompose(rho, LocalNumbers{{0, 1}}), ValidationError);
}

TEST_CASE("SSR effective entanglement") {
    LocalNumbers grading = {{0, 1}, {0, 1}};
    auto measure = [](const DensityMatrix& rho) { return concurrence(rho); };

    auto res = ssr_effective_entanglement(bell_psi_plus().density(), grading, measure);
    REQUIRE(res.value == Catch::Approx(0.0).margin(1e-12));
    REQUIRE_FALSE(res.is_upper_bound);

    // dual-rail qubits: every local basis state carries one particle, so the
    // single sector retains the full entanglement
    LocalNumbers dual_rail = {{1, 1}, {1, 1}};
    auto res2 = ssr_effective_entanglement(bell_phi_plus().density(), dual_rail, measure);
    REQUIRE(res2.value == Catch::Approx(1.0).margin(1e-12));

    // number-diagonal product state
    Mat prod = Mat::Zero(4, 4);
    prod(0, 0) = 1.0;
    auto res3 = ssr_effective_entanglement(DensityMatrix(prod, {2, 2}), grading, measure);
    REQUIRE(res3.value == Catch::Approx(0.0).margin(1e-12));

    // Eq. (4.7) linearity: blockwise measure of the einselected state
    std::mt19937_64 rng(9);
    auto psi = qres::testing::random_pure_state(4, rng, {2, 2});
    auto res4 = ssr_effective_entanglement(psi.density(), grading, measure);
    auto dec = ssr_decompose(ssr_dephase(psi.density(), grading), grading);
    double expect = 0.0;
    for (const auto& block : dec.blocks) expect += block.weight * measure(block.state);
    REQUIRE(res4.value == Catch::Approx(expect).margin(1e-12));

    // mixed inputs are flagged as upper bounds
    auto mixed = random_density(4, rng, {2, 2});
    REQUIRE(ssr_effective_entanglement(mixed, grading, measure).is_upper_bound);
}

TEST_CASE("BEC effective quality") {
    for (double sigma : {0.1, 0.5, 1.0}) {
        auto p = PhaseDistribution::wrapped_gaussian(0.3, sigma);
        REQUIRE(bec_effective_quality(p) ==
                Catch::Approx(std::exp(-sigma * sigma / 2)).margin(1e-6));
    }
    REQUIRE(bec_effective_quality(PhaseDistribution::uniform()) < 1e-10);
    auto two_phase = PhaseDistribution::point_mixture({{1.1, 0.5}, {1.1 + std::numbers::pi, 0.5}});
    REQUIRE(bec_effective_quality(two_phase) < 1e-14);

    // matches the quality factor of the induced channel
    auto p = PhaseDistribution::wrapped_gaussian(0.7, 0.5);
    const Complex g = g_from_phase_dist(p);
    REQUIRE(quality_factor(bec_effective_channel(g, 0.8)).value ==
            Catch::Approx(std::abs(g)).margin(1e-6));
    REQUIRE(quality_factor(bec_channel(g, 0.8)).value ==
            Catch::Approx(std::abs(g)).margin(1e-6));
}
