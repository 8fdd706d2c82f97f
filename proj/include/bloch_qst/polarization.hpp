#pragma once

// A two-level polarization payload riding the lattice packet. The full
// Hamiltonian is H_f (x) I_P, so each polarization block evolves on its own.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/SVD>
#include <json.hpp>

#include "chain.hpp"
#include "errors.hpp"
#include "evolution.hpp"

namespace bloch_qst {

/// Qubit on span{|down>, |up>}; |up> is the +1 eigenstate of sigma_z.
class PolarizationQubit {
public:
    PolarizationQubit() = default;  // |down>
    PolarizationQubit(complex down, complex up) : down_(down), up_(up) {
        const double norm = std::sqrt(std::norm(down) + std::norm(up));
        if (!(std::abs(norm - 1.0) <= kNormTolerance)) throw NormError("polarization qubit is not normalized");
    }

    static PolarizationQubit normalized(complex down, complex up) {
        const double norm = std::sqrt(std::norm(down) + std::norm(up));
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NormError("cannot normalize a zero qubit");
        return {down / norm, up / norm};
    }

    [[nodiscard]] complex down() const noexcept { return down_; }
    [[nodiscard]] complex up() const noexcept { return up_; }
    [[nodiscard]] complex component(int s) const noexcept { return s == 0 ? down_ : up_; }

    /// (<sigma_x>, <sigma_y>, <sigma_z>)
    [[nodiscard]] std::array<double, 3> bloch_vector() const noexcept {
        const complex coherence = std::conj(up_) * down_;
        return {2.0 * coherence.real(), 2.0 * coherence.imag(), std::norm(up_) - std::norm(down_)};
    }

private:
    complex down_{1.0, 0.0};
    complex up_{};
};

/// |<a|b>|^2
inline double fidelity(const PolarizationQubit& a, const PolarizationQubit& b) {
    return std::norm(std::conj(a.down()) * b.down() + std::conj(a.up()) * b.up());
}

inline void to_json(nlohmann::json& j, const PolarizationQubit& q) {
    j = nlohmann::json::array({nlohmann::json::array({q.down().real(), q.down().imag()}),
                               nlohmann::json::array({q.up().real(), q.up().imag()})});
}

inline void from_json(const nlohmann::json& j, PolarizationQubit& q) {
    if (!j.is_array() || j.size() != 2) throw NormError("qubit JSON must be a pair of [re, im] arrays");
    auto component = [](const nlohmann::json& c) {
        if (!c.is_array() || c.size() != 2) throw NormError("qubit component must be [re, im]");
        return complex(c[0].get<double>(), c[1].get<double>());
    };
    q = PolarizationQubit(component(j[0]), component(j[1]));
}

/// Amplitudes a(n, s) stored at 2 (n - first_site) + s, s = 0 for down.
class PolarizedLatticeState {
public:
    PolarizedLatticeState(int first_site, std::vector<complex> amplitudes)
        : first_site_(first_site), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.empty() || amplitudes_.size() % 2 != 0)
            throw DimensionMismatch("polarized state needs two components per site");
        double sum = 0.0;
        for (const auto& a : amplitudes_) sum += std::norm(a);
        if (!(std::abs(std::sqrt(sum) - 1.0) <= kNormTolerance)) throw NormError("polarized state is not normalized");
    }

    [[nodiscard]] int first_site() const noexcept { return first_site_; }
    [[nodiscard]] std::size_t site_count() const noexcept { return amplitudes_.size() / 2; }
    [[nodiscard]] int last_site() const noexcept { return first_site_ + static_cast<int>(site_count()) - 1; }
    [[nodiscard]] std::span<const complex> amplitudes() const noexcept { return amplitudes_; }

    [[nodiscard]] complex amplitude(int site, int s) const noexcept {
        if (site < first_site_ || site > last_site()) return {};
        return amplitudes_[2 * static_cast<std::size_t>(site - first_site_) + static_cast<std::size_t>(s)];
    }

    /// Unnormalized block for one polarization value.
    [[nodiscard]] std::vector<complex> block(int s) const {
        std::vector<complex> out(site_count());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = amplitudes_[2 * i + static_cast<std::size_t>(s)];
        return out;
    }

    /// Position marginal sum_s |a(n, s)|^2.
    [[nodiscard]] std::vector<double> position_profile() const {
        std::vector<double> out(site_count());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(amplitudes_[2 * i]) + std::norm(amplitudes_[2 * i + 1]);
        return out;
    }

    /// rho_{s s'} = sum_n a(n, s) conj(a(n, s')) over [lo, hi].
    [[nodiscard]] std::array<complex, 4> reduced_density(int lo, int hi) const {
        std::array<complex, 4> rho{};
        for (int n = std::max(lo, first_site_); n <= std::min(hi, last_site()); ++n)
            for (int s = 0; s < 2; ++s)
                for (int r = 0; r < 2; ++r) rho[static_cast<std::size_t>(2 * s + r)] += amplitude(n, s) * std::conj(amplitude(n, r));
        return rho;
    }

    /// Schmidt coefficients across position x polarization, descending.
    [[nodiscard]] std::array<double, 2> schmidt_coefficients() const {
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(site_count()), 2);
        for (std::size_t i = 0; i < site_count(); ++i)
            for (int s = 0; s < 2; ++s) m(static_cast<Eigen::Index>(i), s) = amplitudes_[2 * i + static_cast<std::size_t>(s)];
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
        const auto& sv = svd.singularValues();
        return {sv[0], sv[1]};
    }

    [[nodiscard]] int schmidt_rank(double tolerance = 1e-10) const {
        return schmidt_coefficients()[1] > tolerance ? 2 : 1;
    }

private:
    int first_site_;
    std::vector<complex> amplitudes_;
};

/// |psi> (x) |s>
inline PolarizedLatticeState attach_polarization(const LatticeState& state, const PolarizationQubit& qubit) {
    std::vector<complex> amps;
    amps.reserve(2 * state.size());
    for (const auto& c : state.amplitudes()) {
        amps.push_back(c * qubit.down());
        amps.push_back(c * qubit.up());
    }
    return PolarizedLatticeState(state.first_site(), std::move(amps));
}

/// Evolves under h (x) I_P: each polarization block goes through evolve()
/// separately and is rescaled by its weight.
inline PolarizedLatticeState evolve_polarized(const PolarizedLatticeState& state, const HamiltonianMatrix& h, double t) {
    if (state.first_site() != h.first_site || state.site_count() != h.dimension())
        throw DimensionMismatch("polarized state and Hamiltonian cover different sites");
    std::vector<complex> out(2 * state.site_count());
    for (int s = 0; s < 2; ++s) {
        auto block = state.block(s);
        double weight = 0.0;
        for (const auto& a : block) weight += std::norm(a);
        if (weight == 0.0) continue;
        const double scale = std::sqrt(weight);
        for (auto& a : block) a /= scale;
        const auto evolved = evolve(LatticeState::normalized(state.first_site(), std::move(block)), h, t);
        const auto amps = evolved.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i) out[2 * i + static_cast<std::size_t>(s)] = scale * amps[i];
    }
    return PolarizedLatticeState(state.first_site(), std::move(out));
}

struct ExtractedQubit {
    PolarizationQubit qubit;           ///< dominant eigenvector of rho, larger component real positive
    std::array<complex, 4> density{};  ///< normalized reduced density matrix (down, up ordering)
    double purity = 1.0;               ///< tr rho^2
    double capture_probability = 0.0;  ///< weight on the window before renormalization
};

/// Post-selects the window [lo, hi] and returns the reduced polarization state.
inline ExtractedQubit extract_qubit(const PolarizedLatticeState& state, int window_lo, int window_hi) {
    if (window_lo > window_hi || window_lo < state.first_site() || window_hi > state.last_site())
        throw RangeError("read-out window outside the chain");
    auto rho = state.reduced_density(window_lo, window_hi);
    const double capture = rho[0].real() + rho[3].real();
    if (!(capture > 0.0)) throw RangeError("read-out window captures no probability");
    for (auto& r : rho) r /= capture;

    const double a = rho[0].real(), d = rho[3].real();
    const complex b = rho[1];  // rho_{down, up}
    const double top = 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
    // two candidate eigenvectors of the dominant eigenvalue; keep the better conditioned
    const complex v1_down = b, v1_up = top - a;
    const complex v2_down = top - d, v2_up = std::conj(b);
    const double n1 = std::norm(v1_down) + std::norm(v1_up), n2 = std::norm(v2_down) + std::norm(v2_up);
    complex down = n1 >= n2 ? v1_down : v2_down;
    complex up = n1 >= n2 ? v1_up : v2_up;
    if (std::max(n1, n2) <= 1e-300) {  // rho proportional to the identity: every state is dominant
        down = a >= d ? 1.0 : 0.0;
        up = a >= d ? 0.0 : 1.0;
    }
    const complex lead = std::abs(down) >= std::abs(up) ? down : up;
    const complex rotation = std::polar(1.0, -std::arg(lead));
    down *= rotation;
    up *= rotation;
    const double purity = a * a + d * d + 2.0 * std::norm(b);
    return {PolarizationQubit::normalized(down, up), rho, purity, capture};
}

}  // namespace bloch_qst
