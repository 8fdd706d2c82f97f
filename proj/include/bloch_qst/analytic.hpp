#pragma once

// Closed-form results for the infinite chain: band structure, the Bessel
// free propagator, Wannier-Stark states and the half-period transfer law.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "bessel.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "gaussian.hpp"

namespace bloch_qst {

namespace detail {

inline void require_first_zone(double kappa, double spacing) {
    if (!(spacing > 0.0)) throw ChainError("spacing must be positive");
    if (!(std::abs(kappa * spacing) <= std::numbers::pi * (1.0 + 1e-14)))
        throw RangeError("quasi-momentum outside the first Brillouin zone");
}

/// i^k for integer k.
inline complex i_power(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace detail

/// E(kappa) = -(Delta/2) cos(kappa d)
inline double dispersion(double kappa, double coupling, double spacing = 1.0) {
    detail::require_first_zone(kappa, spacing);
    return -0.5 * coupling * std::cos(kappa * spacing);
}

/// v_g(kappa) = (d Delta / 2) sin(kappa d); the sign flips at the zone
/// centre and edges, which is what turns drift into Bloch oscillation.
inline double group_velocity(double kappa, double coupling, double spacing = 1.0) {
    detail::require_first_zone(kappa, spacing);
    return 0.5 * spacing * coupling * std::sin(kappa * spacing);
}

/// i^(n-n') J_{n'-n}(t Delta / 2), the closed-form free propagator. With the
/// -Delta/4 bond amplitude, exp(-i H_0 t) itself has elements i^(n-n') J_{n-n'},
/// the complex conjugate of this value; odd separations differ in sign.
inline complex free_propagator_element(int n, int n_prime, double t, double coupling) {
    if (!(t >= 0.0)) throw RangeError("propagation time must be non-negative");
    return detail::i_power(n - n_prime) * bessel_j(n_prime - n, 0.5 * t * coupling);
}

/// Quantities derived from a non-zero tilt.
struct TiltParameters {
    double coupling = 0.0;
    double force = 0.0;
    double spacing = 1.0;
    double gamma = 0.0;                  ///< Delta / (2 d F)
    double bloch_period = 0.0;           ///< T_B = 2 pi / (|F| d), always positive
    double bloch_frequency = 0.0;        ///< omega_B = |F| d
    double displacement = 0.0;           ///< -2 gamma, signed packet shift at T_B / 2
    double oscillation_amplitude = 0.0;  ///< 2 |gamma|

    [[nodiscard]] double half_period() const noexcept { return 0.5 * bloch_period; }
};

inline TiltParameters tilt_parameters(double coupling, double force, double spacing = 1.0) {
    if (force == 0.0) throw UntiltedChainError("Bloch period undefined for an untilted chain (F = 0)");
    if (!(coupling > 0.0) || !(spacing > 0.0) || !std::isfinite(force))
        throw ChainError("tilt needs positive coupling, positive spacing and finite force");
    TiltParameters t;
    t.coupling = coupling;
    t.force = force;
    t.spacing = spacing;
    t.gamma = coupling / (2.0 * spacing * force);
    t.bloch_frequency = std::abs(force) * spacing;
    t.bloch_period = 2.0 * std::numbers::pi / t.bloch_frequency;
    t.displacement = -2.0 * t.gamma;
    t.oscillation_amplitude = 2.0 * std::abs(t.gamma);
    return t;
}

inline TiltParameters tilt_parameters(const ChainSpec& chain) {
    chain.validate();
    return tilt_parameters(chain.coupling, chain.force, chain.spacing);
}

/// Momentum-space Wannier-Stark eigenfunction sampled on a uniform grid
/// over [-pi/d, pi/d).
struct WannierStarkState {
    int index = 0;
    std::vector<double> kappa_grid;
    std::vector<complex> amplitudes;
    double energy = 0.0;  ///< m d F
};

inline constexpr int kDefaultKappaGridSize = 1024;

/// Psi_m(kappa) = sqrt(d / 2pi) exp(-i [m kappa d + gamma sin(kappa d)])
inline WannierStarkState wannier_stark_state(int m, const TiltParameters& tilt, double spacing,
                                             int grid_size = kDefaultKappaGridSize) {
    if (grid_size < 2) throw RangeError("kappa grid needs at least two points");
    if (!(spacing > 0.0)) throw ChainError("spacing must be positive");
    WannierStarkState ws;
    ws.index = m;
    ws.energy = m * spacing * tilt.force;
    const double magnitude = std::sqrt(spacing / (2.0 * std::numbers::pi));
    const double step = 2.0 * std::numbers::pi / (spacing * grid_size);
    ws.kappa_grid.resize(static_cast<std::size_t>(grid_size));
    ws.amplitudes.resize(static_cast<std::size_t>(grid_size));
    for (int j = 0; j < grid_size; ++j) {
        const double kappa = -std::numbers::pi / spacing + j * step;
        const double phase = -(m * kappa * spacing + tilt.gamma * std::sin(kappa * spacing));
        ws.kappa_grid[static_cast<std::size_t>(j)] = kappa;
        ws.amplitudes[static_cast<std::size_t>(j)] = std::polar(magnitude, phase);
    }
    return ws;
}

/// Predicted packet at t = T_B/2: the input envelope shifted by -2 gamma with
/// alternating signs (-1)^n. The window is the truncation window moved by the
/// nearest integer shift; the envelope uses the exact shift. Amplitudes are
/// real, so compare with evolved states only after phase_aligned().
inline LatticeState half_period_profile(const TruncatedGaussianSpec& gauss, const TiltParameters& tilt) {
    const double shifted_center = gauss.center() + tilt.displacement;
    const int window_center = static_cast<int>(std::lround(shifted_center));
    const int first = window_center - gauss.delta();
    const int last = window_center + gauss.delta();
    std::vector<complex> amps;
    amps.reserve(static_cast<std::size_t>(last - first + 1));
    for (int n = first; n <= last; ++n) {
        const double offset = n - shifted_center;
        const double parity = (n % 2 == 0) ? 1.0 : -1.0;
        amps.emplace_back(parity * std::exp(-gauss.beta() * offset * offset), 0.0);
    }
    return LatticeState::normalized(first, std::move(amps));
}

}  // namespace bloch_qst
