#pragma once

// Reference propagator exp(-iHt) psi by a time-stepped Taylor series. It
// shares no code with the spectral path in evolution.hpp and serves as the
// independent check on it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"

namespace bloch_qst {

struct TaylorSettings {
    double max_step_norm = 0.5;  ///< ||H||_1 * step bound
    double term_cutoff = 1e-16;  ///< stop once the largest term entry drops below
    int max_terms = 80;
};

inline LatticeState evolve_oracle(const LatticeState& state, const HamiltonianMatrix& h, double t,
                                  const TaylorSettings& settings = {}) {
    const std::size_t n = h.dimension();
    if (state.first_site() != h.first_site || state.size() != n)
        throw DimensionMismatch("state and Hamiltonian cover different sites");
    if (h.off_diagonal.size() + 1 != n) throw DimensionMismatch("off-diagonal length must be dimension - 1");
    if (!(t >= 0.0) || !std::isfinite(t)) throw RangeError("evolution time must be finite and non-negative");

    const auto& diag = h.diagonal;
    const auto& off = h.off_diagonal;

    // max column absolute sum
    double norm1 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = std::abs(diag[j]);
        if (j > 0) col += std::abs(off[j - 1]);
        if (j + 1 < n) col += std::abs(off[j]);
        norm1 = std::max(norm1, col);
    }

    const auto amps = state.amplitudes();
    std::vector<complex> psi(amps.begin(), amps.end());
    if (t == 0.0 || norm1 == 0.0) return LatticeState(state.first_site(), std::move(psi));

    const auto steps = static_cast<long>(std::ceil(norm1 * t / settings.max_step_norm));
    const double dt = t / static_cast<double>(std::max(steps, 1L));

    std::vector<complex> term(n), next(n), sum(n);
    for (long step = 0; step < steps; ++step) {
        term = psi;
        sum = psi;
        int k = 1;
        for (;; ++k) {
            if (k > settings.max_terms) throw ConvergenceError("Taylor series did not reach the term cutoff");
            // next = (-i dt / k) H term
            const complex factor(0.0, -dt / k);
            double largest = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                complex acc = diag[i] * term[i];
                if (i > 0) acc += off[i - 1] * term[i - 1];
                if (i + 1 < n) acc += off[i] * term[i + 1];
                next[i] = factor * acc;
                largest = std::max(largest, std::abs(next[i]));
            }
            for (std::size_t i = 0; i < n; ++i) sum[i] += next[i];
            std::swap(term, next);
            if (largest < settings.term_cutoff) break;
        }
        psi = sum;
    }
    return LatticeState(state.first_site(), std::move(psi));
}

}  // namespace bloch_qst
