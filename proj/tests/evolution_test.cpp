#include "bloch_qst/evolution.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "bloch_qst/analytic.hpp"
#include "bloch_qst/taylor_propagator.hpp"
#include "bloch_qst/transfer.hpp"
#include "oracles.hpp"

using namespace bloch_qst;
using std::numbers::pi;

namespace {

LatticeState random_state(int first, int count) {
    std::normal_distribution<double> g;
    std::vector<complex> amps;
    for (int i = 0; i < count; ++i) amps.emplace_back(g(oracle::rng()), g(oracle::rng()));
    return LatticeState::normalized(first, std::move(amps));
}

/// Untruncated e^{-beta n^2} sampled over the whole chain.
LatticeState wide_gaussian(const ChainSpec& chain, double beta) {
    std::vector<complex> amps;
    for (int n = chain.left; n <= chain.right; ++n) amps.emplace_back(std::exp(-beta * n * n), 0.0);
    return LatticeState::normalized(chain.left, std::move(amps));
}

double max_difference(const LatticeState& a, const LatticeState& b) {
    double worst = 0.0;
    for (int n = std::min(a.first_site(), b.first_site()); n <= std::max(a.last_site(), b.last_site()); ++n)
        worst = std::max(worst, std::abs(a.amplitude(n) - b.amplitude(n)));
    return worst;
}

}  // namespace

TEST(Eigendecompose, TwoSiteSpectrum) {
    const auto s = eigendecompose(build_free_hamiltonian(ChainSpec{1.0, 0.0, 1.0, 0, 1, 0}));
    ASSERT_EQ(s.dimension(), 2u);
    EXPECT_NEAR(s.eigenvalues()[0], -0.25, 1e-15);
    EXPECT_NEAR(s.eigenvalues()[1], 0.25, 1e-15);
}

TEST(Eigendecompose, FreeChainClosedForm) {
    for (int c : {2, 7, 50, 161}) {
        const auto s = eigendecompose(build_free_hamiltonian(ChainSpec{1.4, 0.0, 1.0, -(c / 2), c - 1 - c / 2, 0}));
        for (int k = 1; k <= c; ++k)
            ASSERT_NEAR(s.eigenvalues()[static_cast<std::size_t>(k - 1)], -0.7 * std::cos(k * pi / (c + 1)), 1e-12);
    }
}

TEST(Eigendecompose, StrongTiltApproachesSiteEnergies) {
    // Delta / (F d) = 0.01
    const ChainSpec chain{0.01, 1.0, 1.0, -10, 10, 0};
    const auto s = eigendecompose(build_tilted_hamiltonian(chain));
    for (int i = 0; i < chain.site_count(); ++i)
        EXPECT_NEAR(s.eigenvalues()[static_cast<std::size_t>(i)], chain.left + i, 1e-4);
}

TEST(Eigendecompose, ReconstructionOrthonormalityAndSigns) {
    const ChainSpec chain{1.0, -1.0 / 40, 1.0, -20, 60, 40};
    const auto h = build_tilted_hamiltonian(chain);
    const auto s = eigendecompose(h);
    const auto& v = s.eigenvectors();
    const auto n = static_cast<Eigen::Index>(s.dimension());
    const auto dense = oracle::dense(h.diagonal, h.off_diagonal);
    Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(s.eigenvalues().data(), n);
    const Eigen::MatrixXd rebuilt = v * lambda.asDiagonal() * v.transpose();
    const Eigen::MatrixXd gram = v.transpose() * v;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            ASSERT_NEAR(rebuilt(i, j), dense[static_cast<std::size_t>(i * n + j)], 1e-10);
            ASSERT_NEAR(gram(i, j), i == j ? 1.0 : 0.0, 1e-10);
        }
    EXPECT_TRUE(std::is_sorted(s.eigenvalues().begin(), s.eigenvalues().end()));
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot = 0;
        v.col(k).cwiseAbs().maxCoeff(&pivot);
        EXPECT_GT(v(pivot, k), 0.0);
    }
    // deterministic
    const auto again = eigendecompose(h);
    EXPECT_EQ(again.eigenvectors(), v);
}

TEST(Evolve, TimeZeroIsIdentity) {
    const ChainSpec chain{1.0, 0.03, 1.0, -8, 12, 4};
    const auto psi = random_state(chain.left, chain.site_count());
    const auto h = build_tilted_hamiltonian(chain);
    EXPECT_LT(max_difference(evolve(psi, h, 0.0), psi), 1e-14);
    EXPECT_LT(max_difference(evolve_oracle(psi, h, 0.0), psi), 1e-16);
}

TEST(Evolve, EigenvectorOnlyPicksUpPhase) {
    const ChainSpec chain{1.0, -0.05, 1.0, -6, 9, 3};
    const auto h = build_tilted_hamiltonian(chain);
    const auto s = eigendecompose(h);
    const std::size_t k = 5;
    std::vector<complex> amps;
    for (int i = 0; i < chain.site_count(); ++i) amps.emplace_back(s.eigenvectors()(i, static_cast<Eigen::Index>(k)), 0.0);
    const LatticeState eigenstate = LatticeState::normalized(chain.left, amps);
    const double t = 13.7;
    const auto out = evolve(eigenstate, h, t);
    const complex phase = std::polar(1.0, -s.eigenvalues()[k] * t);
    for (int n = chain.left; n <= chain.right; ++n) EXPECT_NEAR(std::abs(out.amplitude(n) - phase * eigenstate.amplitude(n)), 0.0, 1e-12);
}

TEST(Evolve, DimensionMismatch) {
    const auto h = build_free_hamiltonian(ChainSpec{1.0, 0.0, 1.0, -5, 5, 0});
    EXPECT_THROW(evolve(LatticeState::localized(-5, 4, 0), h, 1.0), DimensionMismatch);
    EXPECT_THROW(evolve(LatticeState::localized(-4, 6, 0), h, 1.0), DimensionMismatch);
    EXPECT_THROW(evolve_oracle(LatticeState::localized(-4, 6, 0), h, 1.0), DimensionMismatch);
    EXPECT_THROW(evolve(LatticeState::localized(-5, 5, 0), h, -1.0), RangeError);
}

TEST(Evolve, FreeSharpStateMatchesConjugateBesselPropagator) {
    const ChainSpec chain{1.0, 0.0, 1.0, -100, 100, 0};
    const auto out = evolve(sharp_state(chain), build_free_hamiltonian(chain), 20.0);
    for (int n = chain.left; n <= chain.right; ++n) {
        const complex closed_form = free_propagator_element(n, 0, 20.0, 1.0);
        ASSERT_NEAR(std::abs(out.amplitude(n) - std::conj(closed_form)), 0.0, 1e-12) << "n=" << n;
        ASSERT_NEAR(std::abs(out.amplitude(n)), std::abs(closed_form), 1e-12) << "n=" << n;
    }
}

TEST(Evolve, FreeFirstOrderAmplitudeIsPositiveImaginary) {
    // <1|U(t)|0> = -i t <1|H|0> + O(t^2) = +i t Delta / 4
    const ChainSpec chain{1.0, 0.0, 1.0, -3, 3, 0};
    const auto out = evolve(sharp_state(chain), build_free_hamiltonian(chain), 1e-4);
    EXPECT_NEAR(out.amplitude(1).imag(), 0.25e-4, 1e-12);
    EXPECT_NEAR(out.amplitude(-1).imag(), 0.25e-4, 1e-12);
}

TEST(Evolve, TiltedSharpStateFollowsBesselEnvelope) {
    // |<n|U(t)|0>| = |J_n((Delta / (F d)) sin(F d t / 2))| for the tilted infinite chain
    const ChainSpec chain{1.0, -1.0 / 40, 1.0, -100, 100, 0};
    const auto h = build_tilted_hamiltonian(chain);
    const auto s = eigendecompose(h);
    const auto psi = sharp_state(chain);
    for (double t : {10.0, 60.0, 40 * pi, 200.0}) {
        const auto out = s.evolve(psi, t);
        const double x = (1.0 / chain.force) * std::sin(chain.force * t / 2);
        for (int n = chain.left; n <= chain.right; ++n)
            ASSERT_NEAR(std::abs(out.amplitude(n)), std::abs(bessel_j(n, x)), 1e-9) << "t=" << t << " n=" << n;
    }
}

TEST(Evolve, OracleAgreesOnRandomTiltedChains) {
    std::uniform_int_distribution<int> size_dist(16, 64);
    std::uniform_real_distribution<double> coupling_dist(0.5, 2.0), force_mag(0.02, 0.2), frac(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        const int size = size_dist(oracle::rng());
        const int left = -size / 3;
        const double force = (trial % 2 ? 1.0 : -1.0) * force_mag(oracle::rng());
        const ChainSpec chain{coupling_dist(oracle::rng()), force, 1.0, left, left + size - 1, 0};
        const auto h = build_tilted_hamiltonian(chain);
        const auto psi = random_state(chain.left, size);
        const double t = frac(oracle::rng()) * tilt_parameters(chain).bloch_period;
        EXPECT_LT(max_difference(evolve(psi, h, t), evolve_oracle(psi, h, t)), 1e-9);
    }
}

TEST(EvolveOracle, NormPreservedOverBlochPeriod) {
    const auto plan = plan_transfer(40, 0.01, 10);
    const auto out = evolve_oracle(truncated_gaussian(plan.gauss, plan.chain), build_tilted_hamiltonian(plan.chain),
                                   plan.tilt.bloch_period);
    EXPECT_NEAR(std::sqrt(out.squared_norm()), 1.0, 1e-12);
}

TEST(Observables, SharpState) {
    const ChainSpec chain{1.0, 0.0, 1.0, -4, 6, 0};
    const auto s = sharp_state(chain);
    const auto p = probability_profile(s);
    for (int n = chain.left; n <= chain.right; ++n) EXPECT_EQ(p[static_cast<std::size_t>(n - chain.left)], n == 0 ? 1.0 : 0.0);
    EXPECT_EQ(mean_position(s), 0.0);
}

TEST(Observables, ProfileIsDistribution) {
    const auto s = random_state(-7, 30);
    double sum = 0.0;
    for (double p : probability_profile(s)) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Observables, SymmetricGaussianHasZeroMean) {
    const ChainSpec chain{1.0, 0.0, 1.0, -40, 40, 0};
    EXPECT_NEAR(mean_position(wide_gaussian(chain, 0.01)), 0.0, 1e-12);
}

TEST(Observables, WideGaussianLandsAtForty) {
    // full Gaussian (no truncation), Delta = 1, F = -1/40, beta = 0.01
    const ChainSpec chain{1.0, -1.0 / 40, 1.0, -120, 160, 40};
    const auto out = evolve(wide_gaussian(chain, 0.01), build_tilted_hamiltonian(chain), 40 * pi);
    EXPECT_NEAR(mean_position(out), 40.0, 0.5);
    const auto p = probability_profile(out);
    const auto peak = chain.left + static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    EXPECT_NEAR(peak, 40, 1);
}

TEST(Trajectory, SingleTimeMatchesInitial) {
    const ChainSpec chain{1.0, -0.02, 1.0, -10, 30, 20};
    const auto psi = truncated_gaussian(TruncatedGaussianSpec(0.05, 4), chain);
    const std::vector<double> times{0.0};
    const auto traj = trajectory(psi, build_tilted_hamiltonian(chain), times);
    ASSERT_EQ(traj.records.size(), 1u);
    EXPECT_NEAR(traj.records[0].mean_position, mean_position(psi), 1e-13);
    const auto p0 = probability_profile(psi);
    for (std::size_t i = 0; i < p0.size(); ++i) EXPECT_NEAR(traj.records[0].probabilities[i], p0[i], 1e-14);
}

TEST(Trajectory, RejectsUnsortedTimes) {
    const ChainSpec chain{1.0, 0.0, 1.0, -3, 3, 0};
    const std::vector<double> times{1.0, 0.5};
    EXPECT_THROW(trajectory(sharp_state(chain), build_free_hamiltonian(chain), times), RangeError);
}

TEST(Trajectory, FreeGaussianSpreadsMonotonically) {
    const ChainSpec chain{1.0, 0.0, 1.0, -150, 150, 0};
    const auto psi = wide_gaussian(chain, 0.01);
    const auto h = build_free_hamiltonian(chain);
    const auto s = eigendecompose(h);
    double previous = position_variance(psi);
    for (double t : linear_grid(0.5, 40.0, 80)) {
        const double v = position_variance(s.evolve(psi, t));
        EXPECT_GT(v, previous) << "t=" << t;
        previous = v;
    }
}

TEST(Trajectory, UnitarityAndEnergyConservation) {
    const auto plan = plan_transfer(40, 0.01, 10);
    const auto h = build_tilted_hamiltonian(plan.chain);
    const auto psi = truncated_gaussian(plan.gauss, plan.chain);
    const double e0 = h.expectation(psi);
    const auto s = eigendecompose(h);
    for (double t : linear_grid(0.0, plan.tilt.bloch_period, 41)) {
        const auto out = s.evolve(psi, t);
        EXPECT_NEAR(std::sqrt(out.squared_norm()), 1.0, 1e-12);
        EXPECT_NEAR(h.expectation(out), e0, 1e-10);
    }
}

TEST(Trajectory, RevivalAfterOneBlochPeriod) {
    const auto plan = plan_transfer(40, 0.01, 16, 1.0, 1.0, PlanOptions{0, 64, 64, std::nullopt});
    const auto psi = truncated_gaussian(plan.gauss, plan.chain);
    const auto out = evolve(psi, build_tilted_hamiltonian(plan.chain), plan.tilt.bloch_period);
    EXPECT_GE(overlap_magnitude(psi, out), 0.999);
}

TEST(Trajectory, BreathingTailMatchesBesselAndStaysBounded) {
    const ChainSpec chain{1.0, -1.0 / 40, 1.0, -120, 120, 0};
    const auto s = eigendecompose(build_tilted_hamiltonian(chain));
    const auto psi = sharp_state(chain);
    // exact outside weight at T_B/2, where the envelope argument reaches Delta/|F| = 40
    double tail = 0.0;
    for (int k = 43; k <= 200; ++k) tail += 2.0 * bessel_j(k, 40.0) * bessel_j(k, 40.0);
    const auto half = s.evolve(psi, 40 * pi);
    EXPECT_NEAR(1.0 - window_probability(half, -42, 42), tail, 1e-9);
    // a few sites further out the weight is below 1e-3 for the whole period
    for (double t : linear_grid(0.0, 80 * pi, 201)) EXPECT_LT(1.0 - window_probability(s.evolve(psi, t), -46, 46), 1e-3);
}
