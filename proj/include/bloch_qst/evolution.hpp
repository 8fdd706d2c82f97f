#pragma once

// Spectral time evolution of lattice states and the basic observables.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "chain.hpp"
#include "errors.hpp"

namespace bloch_qst {

/// H = V diag(lambda) V^T for a tridiagonal Hamiltonian. Eigenvalues are
/// ascending and each eigenvector has its largest-magnitude entry positive,
/// so two decompositions of the same matrix are identical.
class SpectralDecomposition {
public:
    explicit SpectralDecomposition(const HamiltonianMatrix& h) : first_site_(h.first_site) {
        const auto n = static_cast<Eigen::Index>(h.dimension());
        if (n == 0) throw DimensionMismatch("empty Hamiltonian");
        if (h.off_diagonal.size() + 1 != h.dimension())
            throw DimensionMismatch("off-diagonal length must be dimension - 1");

        Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(h.diagonal.data(), n);
        Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
        for (Eigen::Index i = 0; i + 1 < n; ++i) sub[i] = h.off_diagonal[static_cast<std::size_t>(i)];

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success) throw ConvergenceError("tridiagonal eigensolver did not converge");

        eigenvalues_.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
        eigenvectors_ = solver.eigenvectors();
        for (Eigen::Index k = 0; k < n; ++k) {
            Eigen::Index pivot = 0;
            eigenvectors_.col(k).cwiseAbs().maxCoeff(&pivot);
            if (eigenvectors_(pivot, k) < 0.0) eigenvectors_.col(k) *= -1.0;
        }
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return eigenvalues_.size(); }
    [[nodiscard]] int first_site() const noexcept { return first_site_; }
    [[nodiscard]] std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    /// Column k is the eigenvector of eigenvalues()[k].
    [[nodiscard]] const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }

    /// V exp(-i lambda t) V^T psi
    [[nodiscard]] LatticeState evolve(const LatticeState& psi, double t) const {
        if (psi.first_site() != first_site_ || psi.size() != dimension())
            throw DimensionMismatch("state and Hamiltonian cover different sites");
        if (!(t >= 0.0) || !std::isfinite(t)) throw RangeError("evolution time must be finite and non-negative");
        if (t == 0.0) return psi;

        const auto n = static_cast<Eigen::Index>(dimension());
        const auto amps = psi.amplitudes();
        Eigen::VectorXd re(n), im(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            re[i] = amps[static_cast<std::size_t>(i)].real();
            im[i] = amps[static_cast<std::size_t>(i)].imag();
        }
        Eigen::VectorXd coeff_re = eigenvectors_.transpose() * re;
        Eigen::VectorXd coeff_im = eigenvectors_.transpose() * im;
        for (Eigen::Index k = 0; k < n; ++k) {
            const complex phase = std::polar(1.0, -eigenvalues_[static_cast<std::size_t>(k)] * t);
            const complex c = phase * complex(coeff_re[k], coeff_im[k]);
            coeff_re[k] = c.real();
            coeff_im[k] = c.imag();
        }
        const Eigen::VectorXd out_re = eigenvectors_ * coeff_re;
        const Eigen::VectorXd out_im = eigenvectors_ * coeff_im;
        std::vector<complex> out(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = {out_re[i], out_im[i]};
        return LatticeState(first_site_, std::move(out));
    }

private:
    int first_site_;
    std::vector<double> eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
};

inline SpectralDecomposition eigendecompose(const HamiltonianMatrix& h) { return SpectralDecomposition(h); }

inline LatticeState evolve(const LatticeState& state, const HamiltonianMatrix& h, double t) {
    if (state.first_site() != h.first_site || state.size() != h.dimension())
        throw DimensionMismatch("state and Hamiltonian cover different sites");
    return eigendecompose(h).evolve(state, t);
}

/// P(n) = |c_n|^2 in storage order.
inline std::vector<double> probability_profile(const LatticeState& state) {
    std::vector<double> out;
    out.reserve(state.size());
    for (const auto& a : state.amplitudes()) out.push_back(std::norm(a));
    return out;
}

/// sum_n n |c_n|^2 over absolute site labels.
inline double mean_position(const LatticeState& state) {
    double acc = 0.0;
    int site = state.first_site();
    for (const auto& a : state.amplitudes()) acc += site++ * std::norm(a);
    return acc;
}

/// sum_n (n - mean)^2 |c_n|^2
inline double position_variance(const LatticeState& state) {
    const double mean = mean_position(state);
    double acc = 0.0;
    int site = state.first_site();
    for (const auto& a : state.amplitudes()) {
        const double offset = site++ - mean;
        acc += offset * offset * std::norm(a);
    }
    return acc;
}

/// Total probability on sites in [lo, hi] (clipped to the state).
inline double window_probability(const LatticeState& state, int lo, int hi) {
    double acc = 0.0;
    for (int n = std::max(lo, state.first_site()); n <= std::min(hi, state.last_site()); ++n)
        acc += std::norm(state.amplitude(n));
    return acc;
}

/// |<a|b>| over the union of both supports.
inline double overlap_magnitude(const LatticeState& a, const LatticeState& b) {
    complex acc{};
    for (int n = std::max(a.first_site(), b.first_site()); n <= std::min(a.last_site(), b.last_site()); ++n)
        acc += std::conj(a.amplitude(n)) * b.amplitude(n);
    return std::abs(acc);
}

struct TrajectoryRecord {
    double t = 0.0;
    std::vector<double> probabilities;  ///< indexed from Trajectory::first_site
    double mean_position = 0.0;
};

struct Trajectory {
    int first_site = 0;
    std::vector<TrajectoryRecord> records;
    LatticeState final_state;
};

/// Observables at each time point, all from a single decomposition.
inline Trajectory trajectory(const LatticeState& state, const HamiltonianMatrix& h, std::span<const double> times) {
    if (times.empty()) throw RangeError("trajectory needs at least one time point");
    if (!std::is_sorted(times.begin(), times.end())) throw RangeError("trajectory times must be non-decreasing");
    const SpectralDecomposition spectrum(h);
    std::vector<TrajectoryRecord> records;
    records.reserve(times.size());
    LatticeState last = state;
    for (double t : times) {
        last = spectrum.evolve(state, t);
        records.push_back({t, probability_profile(last), mean_position(last)});
    }
    return Trajectory{h.first_site, std::move(records), std::move(last)};
}

/// n equally spaced points covering [start, stop] inclusive.
inline std::vector<double> linear_grid(double start, double stop, int count) {
    if (count < 1) throw RangeError("grid needs at least one point");
    if (count == 1) return {start};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + (stop - start) * i / (count - 1);
    out.back() = stop;
    return out;
}

}  // namespace bloch_qst
