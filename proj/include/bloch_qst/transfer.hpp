#pragma once

// The transfer protocol: packet preparation, chain sizing, success
// probability, beta/delta sweeps and force-selected routing.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "gaussian.hpp"
#include "parallel.hpp"

namespace bloch_qst {

/// |0>, the sharply localized input.
inline LatticeState sharp_state(const ChainSpec& chain) {
    chain.validate();
    if (!chain.contains(0)) throw RangeError("site 0 is outside the chain");
    return LatticeState::localized(chain.left, chain.right, 0);
}

/// Truncated Gaussian embedded in the chain; amplitudes are real positive on
/// the support and zero elsewhere.
inline LatticeState truncated_gaussian(const TruncatedGaussianSpec& spec, const ChainSpec& chain) {
    chain.validate();
    if (!chain.contains(spec.support_first()) || !chain.contains(spec.support_last()))
        throw RangeError("Gaussian support [" + std::to_string(spec.support_first()) + ", " +
                         std::to_string(spec.support_last()) + "] leaves the chain");
    if (chain.target >= spec.support_first() && chain.target <= spec.support_last())
        throw RangeError("target site lies inside the initial support");
    std::vector<complex> amps(static_cast<std::size_t>(chain.site_count()));
    for (int n = spec.support_first(); n <= spec.support_last(); ++n)
        amps[static_cast<std::size_t>(n - chain.left)] = spec.amplitude(n);
    return LatticeState::normalized(chain.left, std::move(amps));
}

/// Chain margin used when none is given: 2 delta, and at least one site so
/// that delta < eta1 also holds for the sharp limit delta = 0.
inline int default_margin(int delta) { return std::max(2 * delta, 1); }

struct PlanOptions {
    int center = 0;
    std::optional<int> left_margin;   ///< eta1 override
    std::optional<int> right_margin;  ///< eta2 override
    std::optional<int> window;        ///< collection half-width override (defaults to delta)
};

struct TransferPlan {
    TruncatedGaussianSpec gauss;
    ChainSpec chain;
    TiltParameters tilt;
    double transfer_time = 0.0;  ///< T_B / 2
    int window = 0;              ///< half-width of the collection window around the target

    [[nodiscard]] std::vector<std::string> violations() const {
        auto out = chain.violations();
        const int eta1 = gauss.center() - chain.left;
        if (!(gauss.delta() < eta1)) out.emplace_back("delta < eta1 required (delta = " + std::to_string(gauss.delta()) +
                                                      ", eta1 = " + std::to_string(eta1) + ")");
        if (!(gauss.support_last() < chain.target))
            out.emplace_back("target site must lie beyond the initial support (center + delta < p)");
        if (!chain.contains(gauss.support_first()) || !chain.contains(gauss.support_last()))
            out.emplace_back("initial support leaves the chain");
        if (window < 0) out.emplace_back("collection window must be non-negative");
        if (!chain.contains(chain.target - window) || !chain.contains(chain.target + window))
            out.emplace_back("collection window [p - w, p + w] leaves the chain");
        return out;
    }

    void validate() const {
        auto v = violations();
        if (!v.empty()) throw ChainError("invalid transfer plan: " + v.front());
    }
};

/// Plan with an explicitly chosen force; the chain spans
/// [center - eta1, p + eta2].
inline TransferPlan plan_with_force(int p, const TruncatedGaussianSpec& gauss, double force, double coupling = 1.0,
                                    double spacing = 1.0, const PlanOptions& options = {}) {
    const int eta1 = options.left_margin.value_or(default_margin(gauss.delta()));
    const int eta2 = options.right_margin.value_or(default_margin(gauss.delta()));
    ChainSpec chain{coupling, force, spacing, gauss.center() - eta1, p + eta2, p};
    const TiltParameters tilt = tilt_parameters(coupling, force, spacing);
    TransferPlan plan{gauss, chain, tilt, tilt.half_period(), options.window.value_or(gauss.delta())};
    plan.validate();
    return plan;
}

/// Plan whose force is solved from the displacement condition
/// -2 gamma = p - center, i.e. F = -Delta / (d (p - center)).
inline TransferPlan plan_transfer(int p, double beta, int delta, double coupling = 1.0, double spacing = 1.0,
                                  const PlanOptions& options = {}) {
    if (delta < 0) throw ChainError("truncation delta must be non-negative");
    if (p <= options.center + delta) throw RangeError("target p must lie beyond the initial support (p > center + delta)");
    const double force = -coupling / (spacing * (p - options.center));
    return plan_with_force(p, TruncatedGaussianSpec(beta, delta, options.center), force, coupling, spacing, options);
}

/// Probability collected on [p - half_width, p + half_width].
inline double success_probability(const LatticeState& state, int p, int half_width) {
    if (half_width < 0) throw RangeError("collection window must be non-negative");
    if (!state.contains(p - half_width) || !state.contains(p + half_width))
        throw RangeError("collection window leaves the chain");
    return std::clamp(window_probability(state, p - half_width, p + half_width), 0.0, 1.0);
}

struct TransferOutcome {
    LatticeState final_state;
    double success = 0.0;
};

inline TransferOutcome run_transfer(const TransferPlan& plan) {
    plan.validate();
    const auto initial = truncated_gaussian(plan.gauss, plan.chain);
    auto final_state = evolve(initial, build_tilted_hamiltonian(plan.chain), plan.transfer_time);
    const double success = success_probability(final_state, plan.chain.target, plan.window);
    return {std::move(final_state), success};
}

/// Success probability of the plan evaluated at each of `times`.
inline std::vector<double> success_curve(const TransferPlan& plan, std::span<const double> times) {
    plan.validate();
    const auto initial = truncated_gaussian(plan.gauss, plan.chain);
    const SpectralDecomposition spectrum(build_tilted_hamiltonian(plan.chain));
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(success_probability(spectrum.evolve(initial, t), plan.chain.target, plan.window));
    return out;
}

struct SweepFailure {
    std::size_t beta_index = 0;
    std::size_t delta_index = 0;
    std::string message;
};

struct SweepResult {
    std::vector<double> beta_grid;
    std::vector<int> delta_grid;
    std::vector<double> probabilities;  ///< row-major, beta outer; NaN for failed cells
    double ratio = 0.0;                 ///< Delta / F
    int target = 0;
    std::vector<SweepFailure> failures;

    [[nodiscard]] double at(std::size_t beta_index, std::size_t delta_index) const {
        return probabilities.at(beta_index * delta_grid.size() + delta_index);
    }
};

struct SweepOptions {
    double coupling = 1.0;
    double spacing = 1.0;
    unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// Success probability at T_B/2 for every (beta, delta) cell with F = Delta / ratio
/// and margins 2 delta per cell. ratio and p are independent so that a
/// mismatched pair can be explored too.
inline SweepResult sweep_beta_delta(std::span<const double> beta_grid, std::span<const int> delta_grid, double ratio,
                                    int p, const SweepOptions& options = {}) {
    if (beta_grid.empty() || delta_grid.empty()) throw RangeError("sweep grids must be non-empty");
    if (ratio == 0.0 || !std::isfinite(ratio)) throw UntiltedChainError("sweep ratio Delta/F must be finite and non-zero");

    SweepResult result;
    result.beta_grid.assign(beta_grid.begin(), beta_grid.end());
    result.delta_grid.assign(delta_grid.begin(), delta_grid.end());
    result.ratio = ratio;
    result.target = p;
    const std::size_t cells = beta_grid.size() * delta_grid.size();
    result.probabilities.assign(cells, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::optional<std::string>> errors(cells);

    const double force = options.coupling / ratio;
    detail::parallel_for(cells, options.threads, [&](std::size_t cell) {
        const std::size_t bi = cell / delta_grid.size();
        const std::size_t di = cell % delta_grid.size();
        try {
            const TruncatedGaussianSpec gauss(beta_grid[bi], delta_grid[di]);
            const auto plan = plan_with_force(p, gauss, force, options.coupling, options.spacing);
            result.probabilities[cell] = run_transfer(plan).success;
        } catch (const Error& e) {
            errors[cell] = e.what();
        }
    });
    for (std::size_t cell = 0; cell < cells; ++cell)
        if (errors[cell]) result.failures.push_back({cell / delta_grid.size(), cell % delta_grid.size(), *errors[cell]});
    return result;
}

struct RouteOptions {
    double coupling = 1.0;
    double spacing = 1.0;
    int center = 0;
    int default_steps = 101;  ///< grid over [0, T_B/2] when no lengths are given
    unsigned threads = 0;
};

/// One force of a routing run. Time is read as propagation length L.
struct RouteTrajectory {
    double force = 0.0;
    TiltParameters tilt;
    ChainSpec chain;
    std::vector<double> lengths;
    std::vector<double> mean_positions;
    LatticeState output_state;

    [[nodiscard]] double output_mean() const { return mean_position(output_state); }
};

/// Chain for a routing run: margins default_margin(delta) around both the
/// input support and the predicted landing site. The target is the landing
/// site when it lies right of the input; otherwise the right edge, since
/// chain targets are non-negative.
inline ChainSpec route_chain(const TruncatedGaussianSpec& gauss, double force, double coupling, double spacing) {
    const TiltParameters tilt = tilt_parameters(coupling, force, spacing);
    const int landing = gauss.center() + static_cast<int>(std::lround(tilt.displacement));
    const int eta = default_margin(gauss.delta());
    const int left = std::min(gauss.center(), landing) - eta;
    const int right = std::max(gauss.center(), landing) + eta;
    ChainSpec chain{coupling, force, spacing, left, right, landing > gauss.support_last() ? landing : right};
    chain.validate();
    return chain;
}

/// Propagates the same truncated Gaussian under each force. With empty
/// `lengths` each force uses its own grid ending at its T_B/2.
inline std::vector<RouteTrajectory> route(double beta, int delta, std::span<const double> forces,
                                          std::span<const double> lengths, const RouteOptions& options = {}) {
    if (forces.empty()) throw RangeError("route needs at least one force");
    for (double f : forces)
        if (f == 0.0) throw UntiltedChainError("route forces must be non-zero");
    const TruncatedGaussianSpec gauss(beta, delta, options.center);

    std::vector<std::optional<RouteTrajectory>> slots(forces.size());
    detail::parallel_for(forces.size(), options.threads, [&](std::size_t i) {
        const double force = forces[i];
        const ChainSpec chain = route_chain(gauss, force, options.coupling, options.spacing);
        const TiltParameters tilt = tilt_parameters(chain);
        std::vector<double> grid = lengths.empty() ? linear_grid(0.0, tilt.half_period(), options.default_steps)
                                                   : std::vector<double>(lengths.begin(), lengths.end());
        auto traj = trajectory(truncated_gaussian(gauss, chain), build_tilted_hamiltonian(chain), grid);
        std::vector<double> means;
        means.reserve(traj.records.size());
        for (const auto& r : traj.records) means.push_back(r.mean_position);
        slots[i] = RouteTrajectory{force, tilt, chain, std::move(grid), std::move(means), std::move(traj.final_state)};
    });
    std::vector<RouteTrajectory> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace bloch_qst
