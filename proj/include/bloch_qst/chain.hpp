#pragma once

// Finite tight-binding chain: geometry, lattice states and the free/tilted
// Hamiltonians in compact tridiagonal form.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace bloch_qst {

using complex = std::complex<double>;

/// Tolerance on the unit-norm invariant of every state type.
inline constexpr double kNormTolerance = 1e-12;

/// Geometry and physics of a finite chain with absolute site labels
/// left..right. With target p and margins eta1, eta2 the chain is
/// left = -eta1, right = p + eta2.
struct ChainSpec {
    double coupling = 1.0;  ///< hopping scale Delta; the bond amplitude is -Delta/4
    double force = 0.0;     ///< linear tilt F (energy per site), any sign
    double spacing = 1.0;   ///< lattice spacing d
    int left = 0;
    int right = 1;
    int target = 0;

    [[nodiscard]] int site_count() const noexcept { return right - left + 1; }
    [[nodiscard]] bool contains(int site) const noexcept { return site >= left && site <= right; }
    [[nodiscard]] int left_margin() const noexcept { return -left; }
    [[nodiscard]] int right_margin() const noexcept { return right - target; }

    /// Every violated invariant as a message; empty when valid.
    [[nodiscard]] std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (!(coupling > 0.0) || !std::isfinite(coupling)) out.emplace_back("coupling must be positive and finite");
        if (!(spacing > 0.0) || !std::isfinite(spacing)) out.emplace_back("spacing must be positive and finite");
        if (!std::isfinite(force)) out.emplace_back("force must be finite");
        if (!(left <= 0 && 0 <= target && target <= right))
            out.emplace_back("site layout requires left <= 0 <= target <= right");
        return out;
    }

    void validate() const {
        auto v = violations();
        if (!v.empty()) throw ChainError("invalid chain: " + v.front());
    }

    friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

inline void to_json(nlohmann::json& j, const ChainSpec& c) {
    j = nlohmann::json{{"coupling", c.coupling}, {"force", c.force},   {"spacing", c.spacing},
                       {"left", c.left},         {"right", c.right},   {"target", c.target}};
}

inline void from_json(const nlohmann::json& j, ChainSpec& c) {
    ChainSpec out;
    j.at("coupling").get_to(out.coupling);
    j.at("force").get_to(out.force);
    if (j.contains("spacing")) j.at("spacing").get_to(out.spacing);
    j.at("left").get_to(out.left);
    j.at("right").get_to(out.right);
    j.at("target").get_to(out.target);
    out.validate();
    c = out;
}

/// Unit-norm complex amplitudes over a contiguous block of sites.
/// Storage index 0 corresponds to site first_site().
class LatticeState {
public:
    LatticeState(int first_site, std::vector<complex> amplitudes)
        : first_site_(first_site), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.empty()) throw NormError("lattice state needs at least one site");
        const double norm = std::sqrt(squared_norm());
        if (!(std::abs(norm - 1.0) <= kNormTolerance))
            throw NormError("lattice state is not normalized (norm " + std::to_string(norm) + ")");
    }

    /// Rescales to unit norm; throws when the input vanishes.
    static LatticeState normalized(int first_site, std::vector<complex> amplitudes) {
        double sum = 0.0;
        for (const auto& a : amplitudes) sum += std::norm(a);
        if (!(sum > 0.0) || !std::isfinite(sum)) throw NormError("cannot normalize a zero or non-finite state");
        const double scale = 1.0 / std::sqrt(sum);
        for (auto& a : amplitudes) a *= scale;
        return LatticeState(first_site, std::move(amplitudes));
    }

    static LatticeState localized(int first_site, int last_site, int site) {
        if (site < first_site || site > last_site) throw RangeError("site " + std::to_string(site) + " outside state range");
        std::vector<complex> amps(static_cast<std::size_t>(last_site - first_site + 1));
        amps[static_cast<std::size_t>(site - first_site)] = 1.0;
        return LatticeState(first_site, std::move(amps));
    }

    [[nodiscard]] int first_site() const noexcept { return first_site_; }
    [[nodiscard]] int last_site() const noexcept { return first_site_ + static_cast<int>(amplitudes_.size()) - 1; }
    [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] bool contains(int site) const noexcept { return site >= first_site_ && site <= last_site(); }
    [[nodiscard]] std::span<const complex> amplitudes() const noexcept { return amplitudes_; }

    /// Amplitude at an absolute site label; zero outside the stored block.
    [[nodiscard]] complex amplitude(int site) const noexcept {
        return contains(site) ? amplitudes_[static_cast<std::size_t>(site - first_site_)] : complex{};
    }

    [[nodiscard]] double squared_norm() const noexcept {
        double sum = 0.0;
        for (const auto& a : amplitudes_) sum += std::norm(a);
        return sum;
    }

    /// Same amplitudes re-expressed over [first, last]; sites outside the
    /// current block get zero. Throws if weight would be dropped.
    [[nodiscard]] LatticeState embedded(int first, int last) const {
        if (first > first_site_ || last < last_site()) {
            for (int n = first_site_; n <= last_site(); ++n)
                if ((n < first || n > last) && amplitude(n) != complex{})
                    throw RangeError("embedding would drop non-zero amplitude at site " + std::to_string(n));
        }
        std::vector<complex> amps(static_cast<std::size_t>(last - first + 1));
        for (int n = std::max(first, first_site_); n <= std::min(last, last_site()); ++n)
            amps[static_cast<std::size_t>(n - first)] = amplitude(n);
        return LatticeState(first, std::move(amps));
    }

private:
    int first_site_;
    std::vector<complex> amplitudes_;
};

/// Removes the global phase: the largest-magnitude amplitude (first one on
/// ties) becomes real and positive.
inline LatticeState phase_aligned(const LatticeState& state) {
    const auto amps = state.amplitudes();
    std::size_t best = 0;
    for (std::size_t i = 1; i < amps.size(); ++i)
        if (std::abs(amps[i]) > std::abs(amps[best])) best = i;
    const complex rotation = std::polar(1.0, -std::arg(amps[best]));
    std::vector<complex> out(amps.begin(), amps.end());
    for (auto& a : out) a *= rotation;
    return LatticeState(state.first_site(), std::move(out));
}

/// Real symmetric tridiagonal matrix over sites first_site..first_site+dim-1.
struct HamiltonianMatrix {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;  ///< size dimension()-1
    int first_site = 0;

    [[nodiscard]] std::size_t dimension() const noexcept { return diagonal.size(); }
    [[nodiscard]] int last_site() const noexcept { return first_site + static_cast<int>(diagonal.size()) - 1; }

    /// H * v for a vector indexed like the matrix.
    [[nodiscard]] std::vector<complex> apply(std::span<const complex> v) const {
        if (v.size() != dimension()) throw DimensionMismatch("vector length does not match Hamiltonian dimension");
        const std::size_t n = dimension();
        std::vector<complex> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            complex acc = diagonal[i] * v[i];
            if (i > 0) acc += off_diagonal[i - 1] * v[i - 1];
            if (i + 1 < n) acc += off_diagonal[i] * v[i + 1];
            out[i] = acc;
        }
        return out;
    }

    /// <psi|H|psi>; the state must cover the same sites.
    [[nodiscard]] double expectation(const LatticeState& psi) const {
        if (psi.first_site() != first_site || psi.size() != dimension())
            throw DimensionMismatch("state and Hamiltonian cover different sites");
        const auto amps = psi.amplitudes();
        const auto hv = apply(amps);
        complex acc{};
        for (std::size_t i = 0; i < hv.size(); ++i) acc += std::conj(amps[i]) * hv[i];
        return acc.real();
    }

    friend bool operator==(const HamiltonianMatrix&, const HamiltonianMatrix&) = default;
};

namespace detail {

inline HamiltonianMatrix build_chain_matrix(const ChainSpec& chain, double force) {
    chain.validate();
    const int count = chain.site_count();
    if (count < 2) throw ChainError("a chain needs at least two sites");
    HamiltonianMatrix h;
    h.first_site = chain.left;
    h.diagonal.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) h.diagonal[static_cast<std::size_t>(i)] = force * chain.spacing * (chain.left + i);
    h.off_diagonal.assign(static_cast<std::size_t>(count - 1), -chain.coupling / 4.0);
    return h;
}

}  // namespace detail

/// Hopping-only Hamiltonian: zero diagonal, bonds -Delta/4.
inline HamiltonianMatrix build_free_hamiltonian(const ChainSpec& chain) {
    return detail::build_chain_matrix(chain, 0.0);
}

/// Free Hamiltonian plus the linear potential F*d*n on absolute site n.
inline HamiltonianMatrix build_tilted_hamiltonian(const ChainSpec& chain) {
    return detail::build_chain_matrix(chain, chain.force);
}

}  // namespace bloch_qst
