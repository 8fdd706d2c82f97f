// bloch_qst: command-line front end for evolve/transfer/sweep/route/polarized runs.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bloch_qst/run.hpp"

namespace {

using bloch_qst::cli::ConfigError;
using bloch_qst::cli::RunConfig;

/// Flag values; anything set here overrides the config file.
struct Overrides {
    std::optional<std::string> config_path;
    std::optional<double> coupling, spacing, force, beta, t_start, t_stop, ratio;
    std::optional<int> p, delta, center, eta1, eta2, window, left, right, t_steps;
    std::optional<std::string> initial, beta_grid, delta_grid, forces, qubit, out, format;
    std::optional<unsigned> threads;
};

void add_shared_options(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "JSON config file; flags override its values");
    sub->add_option("--coupling", o.coupling, "hopping scale Delta (bond amplitude -Delta/4)");
    sub->add_option("--spacing", o.spacing, "lattice spacing d");
    sub->add_option("--beta", o.beta, "Gaussian width parameter beta");
    sub->add_option("--delta", o.delta, "truncation half-width delta (sites)");
    sub->add_option("--center", o.center, "packet center site");
    sub->add_option("--t-start", o.t_start, "first time point");
    sub->add_option("--t-stop", o.t_stop, "last time point (default T_B/2)");
    sub->add_option("--t-steps", o.t_steps, "number of time points");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

void add_chain_options(CLI::App* sub, Overrides& o) {
    auto* force = sub->add_option("--force", o.force, "explicit tilt F");
    auto* p = sub->add_option("--p", o.p, "target site; F is derived from it");
    force->excludes(p);
    sub->add_option("--eta1", o.eta1, "left margin override");
    sub->add_option("--eta2", o.eta2, "right margin override");
    sub->add_option("--window", o.window, "collection half-width (default delta)");
}

template <class T>
void apply(std::optional<T>& target, const std::optional<T>& value) {
    if (value) target = value;
}

template <class T>
void apply(T& target, const std::optional<T>& value) {
    if (value) target = *value;
}

RunConfig merge(const Overrides& o, bloch_qst::cli::Command command) {
    RunConfig config;
    if (o.config_path) {
        std::ifstream in(*o.config_path);
        if (!in) throw ConfigError("cannot open config file " + *o.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
        }
        config = bloch_qst::cli::config_from_json(j);
    }
    if (config.command && *config.command != command)
        throw ConfigError("config file command '" + bloch_qst::cli::command_name(*config.command) +
                          "' does not match subcommand '" + bloch_qst::cli::command_name(command) + "'");
    config.command = command;

    apply(config.coupling, o.coupling);
    apply(config.spacing, o.spacing);
    if (o.force) {
        config.force = o.force;
        config.target.reset();
    }
    if (o.p) {
        config.target = o.p;
        config.force.reset();
    }
    apply(config.beta, o.beta);
    apply(config.delta, o.delta);
    apply(config.center, o.center);
    apply(config.eta1, o.eta1);
    apply(config.eta2, o.eta2);
    apply(config.window, o.window);
    apply(config.left, o.left);
    apply(config.right, o.right);
    apply(config.initial, o.initial);
    apply(config.t_start, o.t_start);
    apply(config.t_stop, o.t_stop);
    apply(config.t_steps, o.t_steps);
    apply(config.ratio, o.ratio);
    if (o.beta_grid) config.beta_grid = bloch_qst::cli::parse_real_grid(*o.beta_grid);
    if (o.delta_grid) config.delta_grid = bloch_qst::cli::parse_int_range(*o.delta_grid);
    if (o.forces) config.forces = bloch_qst::cli::parse_real_list(*o.forces);
    if (o.qubit) {
        const auto parts = bloch_qst::cli::parse_real_list(*o.qubit);
        if (parts.size() != 4) throw ConfigError("--qubit takes re_down,im_down,re_up,im_up");
        config.qubit_down = {parts[0], parts[1]};
        config.qubit_up = {parts[2], parts[3]};
    }
    apply(config.output_dir, o.out);
    if (o.format)
        config.format = *o.format == "json" ? bloch_qst::cli::OutputFormat::json : bloch_qst::cli::OutputFormat::csv;
    apply(config.threads, o.threads);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    using bloch_qst::cli::Command;

    CLI::App app{"Bloch-oscillation state transfer on finite tight-binding chains"};
    app.set_version_flag("--version", bloch_qst::cli::kToolVersion);
    app.require_subcommand(1);
    Overrides o;

    auto* evolve = app.add_subcommand("evolve", "propagate a packet and record P(n, t) and the mean position");
    add_shared_options(evolve, o);
    add_chain_options(evolve, o);
    evolve->add_option("--left", o.left, "first site of an explicit chain");
    evolve->add_option("--right", o.right, "last site of an explicit chain");
    evolve->add_option("--initial", o.initial, "gaussian or sharp")->check(CLI::IsMember({"gaussian", "sharp"}));

    auto* transfer = app.add_subcommand("transfer", "run the transfer protocol to T_B/2");
    add_shared_options(transfer, o);
    add_chain_options(transfer, o);

    auto* sweep = app.add_subcommand("sweep", "success probability over a beta x delta grid");
    add_shared_options(sweep, o);
    sweep->add_option("--ratio", o.ratio, "Delta / F");
    sweep->add_option("--p", o.p, "target site");
    sweep->add_option("--beta-grid", o.beta_grid, "start:stop:count");
    sweep->add_option("--delta-grid", o.delta_grid, "lo:hi");

    auto* route = app.add_subcommand("route", "one packet, several forces");
    add_shared_options(route, o);
    route->add_option("--forces", o.forces, "comma-separated list of F");

    auto* polarized = app.add_subcommand("polarized", "carry a polarization qubit through the transfer");
    add_shared_options(polarized, o);
    add_chain_options(polarized, o);
    polarized->add_option("--qubit", o.qubit, "re_down,im_down,re_up,im_up");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bloch_qst::cli::kExitConfigError;
    }

    Command command = Command::evolve;
    if (*transfer) command = Command::transfer;
    if (*sweep) command = Command::sweep;
    if (*route) command = Command::route;
    if (*polarized) command = Command::polarized;

    RunConfig config;
    try {
        config = merge(o, command);
    } catch (const bloch_qst::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bloch_qst::cli::kExitConfigError;
    }
    const int status = bloch_qst::cli::run(config, std::cerr);
    if (status == bloch_qst::cli::kExitSuccess) std::cout << "wrote " << config.output_dir << "/manifest.json\n";
    return status;
}
