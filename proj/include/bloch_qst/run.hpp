#pragma once

// Run configuration, validation and execution behind the command-line tool.
// Everything here is deterministic: the same RunConfig always produces the
// same bytes in every output file.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analytic.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "io.hpp"
#include "polarization.hpp"
#include "transfer.hpp"

namespace bloch_qst::cli {

inline constexpr const char* kToolName = "bloch_qst";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Command { evolve, transfer, sweep, route, polarized };
enum class OutputFormat { csv, json };

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNumericalFailure = 2;

class ConfigError : public Error {
public:
    using Error::Error;
};

inline std::optional<Command> parse_command(const std::string& name) {
    if (name == "evolve") return Command::evolve;
    if (name == "transfer") return Command::transfer;
    if (name == "sweep") return Command::sweep;
    if (name == "route") return Command::route;
    if (name == "polarized") return Command::polarized;
    return std::nullopt;
}

inline std::string command_name(Command c) {
    switch (c) {
        case Command::evolve: return "evolve";
        case Command::transfer: return "transfer";
        case Command::sweep: return "sweep";
        case Command::route: return "route";
        case Command::polarized: return "polarized";
    }
    return "unknown";
}

/// `start:stop:count`, inclusive linear grid.
struct RealGrid {
    double start = 0.001;
    double stop = 0.1;
    int count = 20;

    [[nodiscard]] std::vector<double> values() const { return linear_grid(start, stop, count); }
    friend bool operator==(const RealGrid&, const RealGrid&) = default;
};

/// `lo:hi`, inclusive integer range.
struct IntRange {
    int lo = 1;
    int hi = 20;

    [[nodiscard]] std::vector<int> values() const {
        std::vector<int> out;
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    friend bool operator==(const IntRange&, const IntRange&) = default;
};

namespace detail {

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not an integer: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("not an integer: '" + s + "'");
    return v;
}

}  // namespace detail

inline RealGrid parse_real_grid(const std::string& text) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) throw ConfigError("grid must be start:stop:count, got '" + text + "'");
    const RealGrid grid{detail::parse_double(parts[0]), detail::parse_double(parts[1]), detail::parse_int(parts[2])};
    if (grid.count < 1) throw ConfigError("grid count must be at least 1, got '" + text + "'");
    return grid;
}

inline IntRange parse_int_range(const std::string& text) {
    const auto parts = detail::split(text, ':');
    if (parts.size() == 1) {
        const int v = detail::parse_int(parts[0]);
        return {v, v};
    }
    if (parts.size() != 2) throw ConfigError("range must be lo:hi, got '" + text + "'");
    const IntRange range{detail::parse_int(parts[0]), detail::parse_int(parts[1])};
    if (range.lo > range.hi) throw ConfigError("range must have lo <= hi, got '" + text + "'");
    return range;
}

inline std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : detail::split(text, ',')) out.push_back(detail::parse_double(part));
    return out;
}

struct RunConfig {
    std::optional<Command> command;

    double coupling = 1.0;
    double spacing = 1.0;
    std::optional<double> force;  ///< explicit F; exclusive with target
    std::optional<int> target;    ///< p; F is then derived
    double beta = 0.01;
    int delta = 10;
    int center = 0;
    std::optional<int> eta1;
    std::optional<int> eta2;
    std::optional<int> window;
    std::optional<int> left;  ///< explicit chain for evolve
    std::optional<int> right;
    std::string initial = "gaussian";  ///< evolve input: gaussian | sharp

    std::optional<double> t_start;
    std::optional<double> t_stop;
    int t_steps = 101;

    std::optional<double> ratio;  ///< sweep Delta / F
    RealGrid beta_grid;
    IntRange delta_grid;

    std::vector<double> forces;  ///< route

    complex qubit_down{std::numbers::sqrt2 / 2.0, 0.0};
    complex qubit_up{std::numbers::sqrt2 / 2.0, 0.0};

    std::string output_dir = "out";
    OutputFormat format = OutputFormat::csv;
    unsigned threads = 0;
};

/// Reads a JSON object whose keys mirror RunConfig fields. Unknown keys are
/// rejected so typos do not pass silently.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {}) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "command") {
                base.command = parse_command(value.get<std::string>());
                if (!base.command) throw ConfigError("unknown command '" + value.get<std::string>() + "'");
            } else if (key == "coupling") base.coupling = value.get<double>();
            else if (key == "spacing") base.spacing = value.get<double>();
            else if (key == "force") base.force = value.get<double>();
            else if (key == "p" || key == "target") base.target = value.get<int>();
            else if (key == "beta") base.beta = value.get<double>();
            else if (key == "delta") base.delta = value.get<int>();
            else if (key == "center") base.center = value.get<int>();
            else if (key == "eta1") base.eta1 = value.get<int>();
            else if (key == "eta2") base.eta2 = value.get<int>();
            else if (key == "window") base.window = value.get<int>();
            else if (key == "left") base.left = value.get<int>();
            else if (key == "right") base.right = value.get<int>();
            else if (key == "initial") base.initial = value.get<std::string>();
            else if (key == "t_start") base.t_start = value.get<double>();
            else if (key == "t_stop") base.t_stop = value.get<double>();
            else if (key == "t_steps") base.t_steps = value.get<int>();
            else if (key == "ratio") base.ratio = value.get<double>();
            else if (key == "beta_grid") base.beta_grid = parse_real_grid(value.get<std::string>());
            else if (key == "delta_grid") base.delta_grid = parse_int_range(value.get<std::string>());
            else if (key == "forces") {
                base.forces = value.is_string() ? parse_real_list(value.get<std::string>()) : value.get<std::vector<double>>();
            } else if (key == "qubit") {
                const auto q = value.get<std::vector<std::vector<double>>>();
                if (q.size() != 2 || q[0].size() != 2 || q[1].size() != 2) throw ConfigError("qubit must be [[re, im], [re, im]]");
                base.qubit_down = {q[0][0], q[0][1]};
                base.qubit_up = {q[1][0], q[1][1]};
            } else if (key == "output_dir" || key == "out") base.output_dir = value.get<std::string>();
            else if (key == "format") {
                const auto f = value.get<std::string>();
                if (f == "csv") base.format = OutputFormat::csv;
                else if (f == "json") base.format = OutputFormat::json;
                else throw ConfigError("format must be csv or json");
            } else if (key == "threads") base.threads = value.get<unsigned>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return base;
}

/// Physics resolved from a config: the chain, the optional tilt and, for
/// packet-based commands, the Gaussian and plan.
struct ResolvedRun {
    ChainSpec chain;
    std::optional<TiltParameters> tilt;
    std::optional<TransferPlan> plan;
    std::vector<double> times;
};

namespace detail {

inline PlanOptions plan_options(const RunConfig& c) {
    return PlanOptions{c.center, c.eta1, c.eta2, c.window};
}

/// Transfer-style plan from either p or an explicit F.
inline TransferPlan resolve_plan(const RunConfig& c) {
    if (c.force && c.target) throw ConfigError("--force and --p are mutually exclusive");
    if (c.target) return plan_transfer(*c.target, c.beta, c.delta, c.coupling, c.spacing, plan_options(c));
    if (!c.force) throw ConfigError("either --force or --p is required");
    if (*c.force == 0.0) throw UntiltedChainError("F = 0: Bloch period undefined, nothing to transfer");
    const auto tilt = tilt_parameters(c.coupling, *c.force, c.spacing);
    const int p = c.center + static_cast<int>(std::lround(tilt.displacement));
    if (p <= c.center + c.delta)
        throw RangeError("force moves the packet to site " + std::to_string(p) +
                         ", which is not beyond the initial support (needs a positive displacement larger than delta)");
    return plan_with_force(p, TruncatedGaussianSpec(c.beta, c.delta, c.center), *c.force, c.coupling, c.spacing,
                           plan_options(c));
}

inline std::vector<double> resolve_times(const RunConfig& c, const std::optional<TiltParameters>& tilt) {
    const double start = c.t_start.value_or(0.0);
    const double stop = c.t_stop.value_or(tilt ? tilt->half_period() : 40.0 / c.coupling);
    if (!(start >= 0.0) || !(stop >= start)) throw ConfigError("time grid needs 0 <= t_start <= t_stop");
    if (c.t_steps < 1) throw ConfigError("t_steps must be at least 1");
    return linear_grid(start, stop, c.t_steps);
}

}  // namespace detail

/// Resolves chain, tilt and time grid; throws on the first problem.
inline ResolvedRun resolve(const RunConfig& c) {
    if (!c.command) throw ConfigError("no command given");
    ResolvedRun r;
    switch (*c.command) {
        case Command::transfer:
        case Command::polarized: {
            auto plan = detail::resolve_plan(c);
            r.chain = plan.chain;
            r.tilt = plan.tilt;
            r.plan = plan;
            break;
        }
        case Command::evolve: {
            if (c.initial != "gaussian" && c.initial != "sharp") throw ConfigError("initial must be gaussian or sharp");
            if (c.left || c.right) {
                if (!c.left || !c.right) throw ConfigError("explicit chain needs both --left and --right");
                if (c.force && c.target) throw ConfigError("--force and --p are mutually exclusive");
                double force = c.force.value_or(0.0);
                int target = c.target.value_or(std::max(*c.right, 0));
                if (c.target) force = -c.coupling / (c.spacing * (*c.target - c.center));
                r.chain = ChainSpec{c.coupling, force, c.spacing, *c.left, *c.right, target};
                r.chain.validate();
                if (r.chain.site_count() < 2) throw ChainError("a chain needs at least two sites");
                if (force != 0.0) r.tilt = tilt_parameters(r.chain);
            } else {
                if (!c.force && !c.target) throw ConfigError("evolve needs --left/--right, --force or --p");
                auto plan = detail::resolve_plan(c);
                r.chain = plan.chain;
                r.tilt = plan.tilt;
                r.plan = plan;
            }
            if (c.initial == "gaussian") {
                const TruncatedGaussianSpec gauss(c.beta, c.delta, c.center);
                if (!r.chain.contains(gauss.support_first()) || !r.chain.contains(gauss.support_last()))
                    throw RangeError("Gaussian support leaves the chain");
            } else if (!r.chain.contains(0)) {
                throw RangeError("site 0 is outside the chain");
            }
            break;
        }
        case Command::sweep: {
            if (!c.ratio || *c.ratio == 0.0) throw UntiltedChainError("sweep needs a non-zero --ratio (Delta/F)");
            if (!c.target) throw ConfigError("sweep needs --p");
            if (c.force) throw ConfigError("sweep takes --ratio, not --force");
            if (c.beta_grid.count < 1 || !(c.beta_grid.start > 0.0) || !(c.beta_grid.stop >= c.beta_grid.start))
                throw ConfigError("beta grid needs 0 < start <= stop and count >= 1");
            if (c.delta_grid.lo < 0 || c.delta_grid.hi < c.delta_grid.lo) throw ConfigError("delta grid needs 0 <= lo <= hi");
            if (*c.target < 0) throw ConfigError("target p must be non-negative");
            r.tilt = tilt_parameters(c.coupling, c.coupling / *c.ratio, c.spacing);
            r.chain = ChainSpec{c.coupling, r.tilt->force, c.spacing, 0, std::max(*c.target, 1), *c.target};
            return r;
        }
        case Command::route: {
            if (c.forces.empty()) throw ConfigError("route needs --forces");
            if (c.force || c.target) throw ConfigError("route takes --forces, not --force/--p");
            for (double f : c.forces)
                if (f == 0.0) throw UntiltedChainError("route force F = 0: Bloch period undefined");
            const TruncatedGaussianSpec gauss(c.beta, c.delta, c.center);
            for (double f : c.forces) (void)route_chain(gauss, f, c.coupling, c.spacing);
            r.chain = route_chain(gauss, c.forces.front(), c.coupling, c.spacing);
            r.tilt = tilt_parameters(r.chain);
            if (c.t_start || c.t_stop) r.times = detail::resolve_times(c, r.tilt);
            if (c.t_steps < 1) throw ConfigError("t_steps must be at least 1");
            return r;
        }
    }
    r.times = detail::resolve_times(c, r.tilt);
    return r;
}

/// Every violated precondition, each as a readable message. Empty iff run()
/// would start computing.
inline std::vector<std::string> validate(const RunConfig& c) {
    std::vector<std::string> out;
    if (!c.command) {
        out.emplace_back("no command given (evolve, transfer, sweep, route, polarized)");
        return out;
    }
    if (!(c.coupling > 0.0)) out.emplace_back("coupling must be positive");
    if (!(c.spacing > 0.0)) out.emplace_back("spacing must be positive");
    if (!(c.beta > 0.0)) out.emplace_back("beta must be positive");
    if (c.delta < 0) out.emplace_back("delta must be non-negative");
    if (c.window && *c.window < 0) out.emplace_back("collection window must be non-negative");
    if (c.output_dir.empty()) out.emplace_back("output directory must be given");
    if (c.force && c.target) out.emplace_back("--force and --p are mutually exclusive");

    const bool tilted_command = *c.command == Command::transfer || *c.command == Command::polarized;
    if (tilted_command && c.force && *c.force == 0.0)
        out.emplace_back("F = 0 with '" + command_name(*c.command) + "': Bloch period undefined");
    if (c.eta1 && !(c.delta < *c.eta1))
        out.emplace_back("delta < eta1 required (delta = " + std::to_string(c.delta) + ", eta1 = " + std::to_string(*c.eta1) + ")");
    if (*c.command == Command::polarized) {
        const double norm = std::norm(c.qubit_down) + std::norm(c.qubit_up);
        if (!(norm > 0.0)) out.emplace_back("polarization qubit must be non-zero");
    }
    if (!out.empty()) return out;

    try {
        const auto r = resolve(c);
        if (r.plan) {
            for (auto& v : r.plan->violations()) out.push_back(v);
        }
    } catch (const Error& e) {
        out.emplace_back(e.what());
    } catch (const std::exception& e) {
        out.emplace_back(e.what());
    }
    return out;
}

namespace detail {

inline nlohmann::json tilt_json(const TiltParameters& t) {
    return {{"force", t.force},
            {"gamma", t.gamma},
            {"bloch_period", t.bloch_period},
            {"bloch_frequency", t.bloch_frequency},
            {"displacement", t.displacement},
            {"oscillation_amplitude", t.oscillation_amplitude},
            {"transfer_time", t.half_period()}};
}

inline nlohmann::json parameters_json(const RunConfig& c) {
    nlohmann::json j{{"coupling", c.coupling}, {"spacing", c.spacing}, {"beta", c.beta},       {"delta", c.delta},
                     {"center", c.center},     {"initial", c.initial}, {"t_steps", c.t_steps}, {"threads", c.threads}};
    j["force"] = c.force ? nlohmann::json(*c.force) : nlohmann::json(nullptr);
    j["p"] = c.target ? nlohmann::json(*c.target) : nlohmann::json(nullptr);
    j["eta1"] = c.eta1 ? nlohmann::json(*c.eta1) : nlohmann::json(nullptr);
    j["eta2"] = c.eta2 ? nlohmann::json(*c.eta2) : nlohmann::json(nullptr);
    j["window"] = c.window ? nlohmann::json(*c.window) : nlohmann::json(nullptr);
    j["left"] = c.left ? nlohmann::json(*c.left) : nlohmann::json(nullptr);
    j["right"] = c.right ? nlohmann::json(*c.right) : nlohmann::json(nullptr);
    j["t_start"] = c.t_start ? nlohmann::json(*c.t_start) : nlohmann::json(nullptr);
    j["t_stop"] = c.t_stop ? nlohmann::json(*c.t_stop) : nlohmann::json(nullptr);
    j["ratio"] = c.ratio ? nlohmann::json(*c.ratio) : nlohmann::json(nullptr);
    j["beta_grid"] = {{"start", c.beta_grid.start}, {"stop", c.beta_grid.stop}, {"count", c.beta_grid.count}};
    j["delta_grid"] = {{"lo", c.delta_grid.lo}, {"hi", c.delta_grid.hi}};
    j["forces"] = c.forces;
    j["qubit"] = nlohmann::json::array({nlohmann::json::array({c.qubit_down.real(), c.qubit_down.imag()}),
                                        nlohmann::json::array({c.qubit_up.real(), c.qubit_up.imag()})});
    j["format"] = c.format == OutputFormat::csv ? "csv" : "json";
    return j;
}

class OutputDir {
public:
    explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {}

    template <class Writer>
    void write(const std::string& name, Writer&& writer) {
        std::ofstream out(root_ / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (root_ / name).string());
        writer(out);
        if (!out) throw ConfigError("failed writing " + (root_ / name).string());
        files_.push_back(name);
    }

    void write_json(const std::string& name, const nlohmann::json& j) {
        write(name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    }

    [[nodiscard]] const std::vector<std::string>& files() const noexcept { return files_; }

private:
    std::filesystem::path root_;
    std::vector<std::string> files_;
};

inline nlohmann::json trajectory_json(const Trajectory& traj) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : traj.records)
        records.push_back({{"t", r.t}, {"mean_position", r.mean_position}, {"P", r.probabilities}});
    return {{"first_site", traj.first_site}, {"records", records}};
}

inline void write_trajectory(OutputDir& dir, const RunConfig& c, const Trajectory& traj) {
    if (c.format == OutputFormat::csv) {
        dir.write("trajectory.csv", [&](std::ostream& o) { io::write_trajectory_csv(o, traj); });
        dir.write("mean_position.csv", [&](std::ostream& o) { io::write_mean_position_csv(o, traj); });
    } else {
        dir.write_json("trajectory.json", trajectory_json(traj));
    }
}

}  // namespace detail

/// Executes a validated config, writing artifacts and manifest.json into
/// config.output_dir. Returns one of the kExit* codes; diagnostics go to `log`.
inline int run(const RunConfig& config, std::ostream& log) {
    const auto violations = validate(config);
    if (!violations.empty()) {
        for (const auto& v : violations) log << "config error: " << v << '\n';
        return kExitConfigError;
    }

    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec || !std::filesystem::is_directory(config.output_dir)) {
        log << "config error: cannot create output directory " << config.output_dir << '\n';
        return kExitConfigError;
    }

    nlohmann::json manifest{{"tool", kToolName}, {"version", kToolVersion}, {"command", command_name(*config.command)}};
    manifest["parameters"] = detail::parameters_json(config);
    detail::OutputDir dir(config.output_dir);

    try {
        const ResolvedRun resolved = resolve(config);
        manifest["chain"] = resolved.chain;
        if (resolved.tilt) manifest["derived"] = detail::tilt_json(*resolved.tilt);
        if (!resolved.times.empty())
            manifest["time_grid"] = {{"start", resolved.times.front()}, {"stop", resolved.times.back()},
                                     {"steps", resolved.times.size()}};
        nlohmann::json results = nlohmann::json::object();

        switch (*config.command) {
            case Command::evolve: {
                const auto initial = config.initial == "sharp"
                                         ? sharp_state(resolved.chain)
                                         : truncated_gaussian(TruncatedGaussianSpec(config.beta, config.delta, config.center),
                                                              resolved.chain);
                const auto h = build_tilted_hamiltonian(resolved.chain);
                const auto traj = trajectory(initial, h, resolved.times);
                detail::write_trajectory(dir, config, traj);
                results["initial_energy"] = h.expectation(initial);
                results["final_energy"] = h.expectation(traj.final_state);
                results["final_mean_position"] = mean_position(traj.final_state);
                break;
            }
            case Command::transfer: {
                const auto& plan = *resolved.plan;
                const auto initial = truncated_gaussian(plan.gauss, plan.chain);
                const auto traj = trajectory(initial, build_tilted_hamiltonian(plan.chain), resolved.times);
                detail::write_trajectory(dir, config, traj);
                const auto outcome = run_transfer(plan);
                if (config.format == OutputFormat::csv)
                    dir.write("final_profile.csv", [&](std::ostream& o) { io::write_profile_csv(o, outcome.final_state); });
                results["success_probability"] = outcome.success;
                results["final_mean_position"] = mean_position(outcome.final_state);
                results["normalization"] = plan.gauss.normalization();
                results["window"] = {plan.chain.target - plan.window, plan.chain.target + plan.window};
                break;
            }
            case Command::sweep: {
                const auto betas = config.beta_grid.values();
                const auto deltas = config.delta_grid.values();
                const auto sweep = sweep_beta_delta(betas, deltas, *config.ratio, *config.target,
                                                    {config.coupling, config.spacing, config.threads});
                if (config.format == OutputFormat::csv)
                    dir.write("sweep.csv", [&](std::ostream& o) { io::write_sweep_csv(o, sweep); });
                else
                    dir.write_json("sweep.json", io::sweep_json(sweep));
                results["cells"] = sweep.probabilities.size();
                results["failed_cells"] = sweep.failures.size();
                break;
            }
            case Command::route: {
                RouteOptions options{config.coupling, config.spacing, config.center, config.t_steps, config.threads};
                const auto routes = route(config.beta, config.delta, config.forces, resolved.times, options);
                nlohmann::json per_force = nlohmann::json::array();
                for (std::size_t i = 0; i < routes.size(); ++i) {
                    const auto& r = routes[i];
                    const std::string name = "trajectory_force_" + std::to_string(i + 1);
                    if (config.format == OutputFormat::csv)
                        dir.write(name + ".csv", [&](std::ostream& o) { io::write_route_mean_csv(o, r); });
                    per_force.push_back({{"force", r.force},
                                         {"chain", r.chain},
                                         {"derived", detail::tilt_json(r.tilt)},
                                         {"final_length", r.lengths.back()},
                                         {"output_mean_position", r.output_mean()}});
                }
                if (config.format == OutputFormat::csv) {
                    dir.write("route_mean_position.csv", [&](std::ostream& o) { io::write_route_mean_csv(o, routes); });
                    dir.write("output_profile.csv", [&](std::ostream& o) { io::write_output_profile_csv(o, routes); });
                } else {
                    nlohmann::json all = nlohmann::json::array();
                    for (const auto& r : routes)
                        all.push_back({{"force", r.force},
                                       {"L", r.lengths},
                                       {"mean_position", r.mean_positions},
                                       {"first_site", r.output_state.first_site()},
                                       {"P_out", probability_profile(r.output_state)}});
                    dir.write_json("route.json", all);
                }
                results["routes"] = per_force;
                break;
            }
            case Command::polarized: {
                const auto& plan = *resolved.plan;
                const auto qubit = PolarizationQubit::normalized(config.qubit_down, config.qubit_up);
                const auto spatial = truncated_gaussian(plan.gauss, plan.chain);
                const auto h = build_tilted_hamiltonian(plan.chain);
                const auto traj = trajectory(spatial, h, resolved.times);
                detail::write_trajectory(dir, config, traj);
                const auto evolved = evolve_polarized(attach_polarization(spatial, qubit), h, plan.transfer_time);
                const auto out = extract_qubit(evolved, plan.chain.target - plan.window, plan.chain.target + plan.window);
                nlohmann::json q{{"input", qubit},
                                 {"output", out.qubit},
                                 {"fidelity", fidelity(qubit, out.qubit)},
                                 {"purity", out.purity},
                                 {"capture_probability", out.capture_probability}};
                dir.write_json("qubit.json", q);
                results = q;
                break;
            }
        }
        manifest["results"] = results;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const Error& e) {
        log << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    }

    auto files = dir.files();
    files.emplace_back("manifest.json");
    manifest["files"] = files;
    try {
        dir.write_json("manifest.json", manifest);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitSuccess;
}

}  // namespace bloch_qst::cli
