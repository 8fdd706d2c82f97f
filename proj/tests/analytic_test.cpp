#include "bloch_qst/analytic.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "bloch_qst/evolution.hpp"
#include "bloch_qst/transfer.hpp"
#include "oracles.hpp"

using namespace bloch_qst;
using std::numbers::pi;

TEST(Dispersion, BandCentreAndEdges) {
    EXPECT_DOUBLE_EQ(dispersion(0.0, 1.0), -0.5);
    EXPECT_DOUBLE_EQ(dispersion(pi, 1.0), 0.5);
    EXPECT_NEAR(dispersion(pi / 2, 1.0), 0.0, 1e-16);
    EXPECT_DOUBLE_EQ(dispersion(pi / 2.0, 1.0, 2.0), 0.5);  // kappa d = pi
}

TEST(Dispersion, RejectsOutsideBrillouinZone) {
    EXPECT_THROW(dispersion(pi + 1e-6, 1.0), RangeError);
    EXPECT_THROW(dispersion(-2.0, 1.0, 2.0), RangeError);
    EXPECT_THROW(group_velocity(4.0, 1.0), RangeError);
}

TEST(Dispersion, EvenAndZoneEdgesAgree) {
    for (double k = 0.0; k <= pi; k += 0.1) EXPECT_EQ(dispersion(k, 1.7, 1.0), dispersion(-k, 1.7, 1.0));
    EXPECT_NEAR(dispersion(pi, 1.7, 1.0), dispersion(-pi, 1.7, 1.0), 1e-15);
    EXPECT_THROW(dispersion(pi + 1e-6, 1.0, 1.0), RangeError);
}

TEST(GroupVelocity, ValuesAndMaximum) {
    EXPECT_EQ(group_velocity(0.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(group_velocity(pi / 2, 1.0, 1.0), 0.5);
    for (double k = -pi; k <= pi; k += 0.01) EXPECT_LE(group_velocity(k, 1.0), 0.5 + 1e-15);
}

TEST(GroupVelocity, IsSlopeOfDispersion) {
    const double h = 1e-5;
    for (double d : {0.5, 1.0, 1.5})
        for (double k = -pi / d + 2 * h; k < pi / d - 2 * h; k += 0.05) {
            // (d Delta / 2) sin(kappa d) is +dE/dkappa of E = -(Delta/2) cos(kappa d)
            const double slope = (dispersion(k + h, 1.3, d) - dispersion(k - h, 1.3, d)) / (2 * h);
            EXPECT_NEAR(slope, group_velocity(k, 1.3, d), 1e-8) << "k=" << k;
        }
}

TEST(GroupVelocity, SignChangesOnlyAtCentreAndEdges) {
    int changes = 0;
    double prev = group_velocity(-pi + 1e-3, 1.0);
    for (double k = -pi + 2e-3; k < pi; k += 1e-3) {
        const double v = group_velocity(k, 1.0);
        if ((v > 0) != (prev > 0)) {
            ++changes;
            EXPECT_NEAR(k, 0.0, 2e-3);
        }
        prev = v;
    }
    EXPECT_EQ(changes, 1);
}

TEST(FreePropagator, IdentityAtTimeZero) {
    EXPECT_EQ(free_propagator_element(3, 3, 0.0, 1.0), complex(1.0, 0.0));
    EXPECT_EQ(free_propagator_element(3, 4, 0.0, 1.0), complex(0.0, 0.0));
    EXPECT_THROW(free_propagator_element(0, 0, -1.0, 1.0), RangeError);
}

TEST(FreePropagator, UnitDistanceMatchesSeriesOracle) {
    // n' - n = 1, t Delta / 2 = 1  ->  i^-1 J_1(1)
    const complex u = free_propagator_element(0, 1, 2.0, 1.0);
    EXPECT_NEAR(u.real(), 0.0, 1e-16);
    EXPECT_NEAR(u.imag(), -oracle::bessel_series(1, 1.0), 1e-14);
    EXPECT_NEAR(u.imag(), -0.44005058574493351596, 1e-14);
}

TEST(FreePropagator, RowIsUnitary) {
    for (double t : {0.5, 7.4, 40.0, 150.0}) {
        double sum = 0.0;
        for (int k = -200; k <= 200; ++k) sum += std::norm(free_propagator_element(0, k, t, 1.0));
        EXPECT_NEAR(sum, 1.0, 1e-10) << "t=" << t;
    }
    double sum = 0.0;
    for (int k = -60; k <= 60; ++k) sum += std::norm(free_propagator_element(0, k, 7.4, 1.0));
    EXPECT_NEAR(sum, 1.0, 1e-12);  // x = 3.7
}

TEST(TiltParameters, QuarterForceValues) {
    const auto t = tilt_parameters(1.0, -1.0 / 40, 1.0);
    EXPECT_DOUBLE_EQ(t.gamma, -20.0);
    EXPECT_DOUBLE_EQ(t.displacement, 40.0);
    EXPECT_DOUBLE_EQ(t.oscillation_amplitude, 40.0);
    EXPECT_NEAR(t.bloch_period, 80 * pi, 1e-12);
    EXPECT_NEAR(t.half_period(), 40 * pi, 1e-12);
}

TEST(TiltParameters, AlgebraicInvariants) {
    for (double f : {-0.3, -1.0 / 60, 0.01, 0.25})
        for (double c : {0.5, 1.0, 2.0})
            for (double d : {0.7, 1.0}) {
                const auto t = tilt_parameters(c, f, d);
                EXPECT_NEAR(t.gamma * 2 * d * f, c, 1e-14);
                EXPECT_NEAR(t.bloch_period * t.bloch_frequency, 2 * pi, 1e-13);
                EXPECT_EQ(t.displacement, -2 * t.gamma);
                EXPECT_GT(t.bloch_period, 0.0);
            }
    const auto sixty = tilt_parameters(1.0, -1.0 / 60, 1.0);
    EXPECT_NEAR(sixty.gamma, -30.0, 1e-12);
    EXPECT_NEAR(sixty.displacement, 60.0, 1e-12);
}

TEST(TiltParameters, DoublingForceHalvesGammaAndPeriod) {
    const auto a = tilt_parameters(1.0, 0.02);
    const auto b = tilt_parameters(1.0, 0.04);
    EXPECT_NEAR(std::abs(b.gamma), std::abs(a.gamma) / 2, 1e-14);
    EXPECT_NEAR(b.bloch_period, a.bloch_period / 2, 1e-12);
}

TEST(TiltParameters, RejectsZeroForce) {
    EXPECT_THROW(tilt_parameters(1.0, 0.0), UntiltedChainError);
    EXPECT_THROW(tilt_parameters(ChainSpec{1.0, 0.0, 1.0, -2, 5, 3}), UntiltedChainError);
}

TEST(WannierStark, UntiltedGroundIsFlat) {
    TiltParameters flat;
    flat.force = 0.1;
    flat.gamma = 0.0;
    const auto ws = wannier_stark_state(0, flat, 1.0, 64);
    for (const auto& a : ws.amplitudes) {
        EXPECT_NEAR(a.real(), std::sqrt(1.0 / (2 * pi)), 1e-15);
        EXPECT_NEAR(a.imag(), 0.0, 1e-15);
    }
}

TEST(WannierStark, PurePhaseAndGrid) {
    const auto tilt = tilt_parameters(1.0, -1.0 / 40, 1.0);
    for (int m : {-3, 0, 1, 7}) {
        const auto ws = wannier_stark_state(m, tilt, 1.0);
        ASSERT_EQ(ws.kappa_grid.size(), static_cast<std::size_t>(kDefaultKappaGridSize));
        EXPECT_DOUBLE_EQ(ws.kappa_grid.front(), -pi);
        EXPECT_LT(ws.kappa_grid.back(), pi);
        for (const auto& a : ws.amplitudes) ASSERT_NEAR(std::abs(a), std::sqrt(1.0 / (2 * pi)), 1e-15);
    }
    EXPECT_THROW(wannier_stark_state(0, tilt, 1.0, 1), RangeError);
}

TEST(WannierStark, PhaseAtQuarterZone) {
    const auto tilt = tilt_parameters(1.0, -1.0 / 40, 1.0);  // gamma = -20
    const auto ws = wannier_stark_state(1, tilt, 1.0, 1024);
    const std::size_t j = 768;  // -pi + 768 * 2pi/1024 = pi/2
    ASSERT_NEAR(ws.kappa_grid[j], pi / 2, 1e-14);
    const double expected = std::remainder(-(pi / 2 - 20.0), 2 * pi);
    EXPECT_NEAR(std::remainder(std::arg(ws.amplitudes[j]) - expected, 2 * pi), 0.0, 1e-12);
}

TEST(WannierStark, LadderSpacing) {
    const auto tilt = tilt_parameters(1.0, 0.037, 1.3);
    for (int m = -5; m < 5; ++m)
        EXPECT_NEAR(wannier_stark_state(m + 1, tilt, 1.3, 8).energy - wannier_stark_state(m, tilt, 1.3, 8).energy,
                    1.3 * 0.037, 1e-15);
}

TEST(HalfPeriodProfile, ShiftedAlternatingEnvelope) {
    const TruncatedGaussianSpec gauss(0.01, 16);
    const auto tilt = tilt_parameters(1.0, -1.0 / 40);
    const auto profile = half_period_profile(gauss, tilt);
    EXPECT_EQ(profile.first_site(), 24);
    EXPECT_EQ(profile.last_site(), 56);
    EXPECT_NEAR(profile.squared_norm(), 1.0, 1e-12);
    int peak = profile.first_site();
    for (int n = profile.first_site(); n <= profile.last_site(); ++n) {
        if (std::abs(profile.amplitude(n)) > std::abs(profile.amplitude(peak))) peak = n;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        EXPECT_GT(sign * profile.amplitude(n).real(), 0.0);
    }
    EXPECT_EQ(peak, 40);
    // coincides with the normalized input envelope moved by 40
    for (int n = -16; n <= 16; ++n) EXPECT_NEAR(std::abs(profile.amplitude(n + 40)), gauss.amplitude(n), 1e-14);
}

TEST(HalfPeriodProfile, ZeroShiftKeepsCentre) {
    const TruncatedGaussianSpec gauss(0.05, 4, 0);
    TiltParameters none;
    none.gamma = 0.0;
    none.displacement = 0.0;
    const auto profile = half_period_profile(gauss, none);
    EXPECT_EQ(profile.first_site(), -4);
    for (int n = -4; n <= 4; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        EXPECT_NEAR(profile.amplitude(n).real(), sign * gauss.amplitude(n), 1e-15);
    }
}

TEST(HalfPeriodProfile, OverlapWithEvolvedPacket) {
    const auto plan = plan_transfer(40, 0.01, 16);
    const auto evolved = evolve(truncated_gaussian(plan.gauss, plan.chain), build_tilted_hamiltonian(plan.chain),
                                plan.transfer_time);
    const auto predicted = half_period_profile(plan.gauss, plan.tilt);
    EXPECT_GE(overlap_magnitude(predicted, evolved), 0.99);
}
