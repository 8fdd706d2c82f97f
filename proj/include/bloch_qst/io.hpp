#pragma once

// CSV/JSON export of trajectories, sweeps and routing runs. Numbers use the
// shortest decimal form that round-trips to the same double, so identical
// results give byte-identical files.

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "evolution.hpp"
#include "transfer.hpp"

namespace bloch_qst::io {

inline std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return {buffer, end};
}

inline std::string format_number(int value) { return std::to_string(value); }

/// Long format `t,n,P`, one row per (time, site).
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,n,P\n";
    for (const auto& r : traj.records) {
        const std::string t = format_number(r.t);
        for (std::size_t i = 0; i < r.probabilities.size(); ++i)
            out << t << ',' << traj.first_site + static_cast<int>(i) << ',' << format_number(r.probabilities[i]) << '\n';
    }
}

inline void write_mean_position_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,mean_position\n";
    for (const auto& r : traj.records) out << format_number(r.t) << ',' << format_number(r.mean_position) << '\n';
}

/// `n,P` for a single state.
inline void write_profile_csv(std::ostream& out, const LatticeState& state) {
    out << "n,P\n";
    int n = state.first_site();
    for (double p : probability_profile(state)) out << n++ << ',' << format_number(p) << '\n';
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
    out << "beta,delta,success_probability\n";
    for (std::size_t b = 0; b < sweep.beta_grid.size(); ++b)
        for (std::size_t d = 0; d < sweep.delta_grid.size(); ++d)
            out << format_number(sweep.beta_grid[b]) << ',' << sweep.delta_grid[d] << ',' << format_number(sweep.at(b, d))
                << '\n';
}

/// Grids plus the beta-by-delta matrix; failed cells are null.
inline nlohmann::json sweep_json(const SweepResult& sweep) {
    nlohmann::json matrix = nlohmann::json::array();
    for (std::size_t b = 0; b < sweep.beta_grid.size(); ++b) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t d = 0; d < sweep.delta_grid.size(); ++d) {
            const double v = sweep.at(b, d);
            row.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
        }
        matrix.push_back(std::move(row));
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : sweep.failures)
        failures.push_back({{"beta", sweep.beta_grid[f.beta_index]}, {"delta", sweep.delta_grid[f.delta_index]}, {"error", f.message}});
    return {{"ratio", sweep.ratio},        {"target", sweep.target},         {"beta_grid", sweep.beta_grid},
            {"delta_grid", sweep.delta_grid}, {"success_probability", matrix}, {"failures", failures}};
}

/// `force,L,mean_position` for every force.
inline void write_route_mean_csv(std::ostream& out, const std::vector<RouteTrajectory>& routes) {
    out << "force,L,mean_position\n";
    for (const auto& r : routes) {
        const std::string f = format_number(r.force);
        for (std::size_t i = 0; i < r.lengths.size(); ++i)
            out << f << ',' << format_number(r.lengths[i]) << ',' << format_number(r.mean_positions[i]) << '\n';
    }
}

inline void write_route_mean_csv(std::ostream& out, const RouteTrajectory& route) {
    write_route_mean_csv(out, std::vector<RouteTrajectory>{route});
}

/// `force,n,P_out` at the final length of each force.
inline void write_output_profile_csv(std::ostream& out, const std::vector<RouteTrajectory>& routes) {
    out << "force,n,P_out\n";
    for (const auto& r : routes) {
        const std::string f = format_number(r.force);
        int n = r.output_state.first_site();
        for (double p : probability_profile(r.output_state)) out << f << ',' << n++ << ',' << format_number(p) << '\n';
    }
}

}  // namespace bloch_qst::io
