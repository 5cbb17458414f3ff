#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "qpurify/harness.hpp"

namespace {

using qpurify::harness::Config;
using qpurify::harness::UsageError;

// Every config key is also exposed as a --key flag; flags win over the file.
const std::vector<std::string> kFlagKeys = {
    "model", "omega_x", "omega_s", "omega", "g", "gamma", "tau",
    "delta_e", "delta_e2", "delta_e_plus", "alpha",
    "init", "rho_uu", "rho_ud", "rho_dd",
    "steps", "columns", "seed", "tol", "check_draws",
    "axis1", "axis2", "axis3", "metric"};

struct CommonArgs {
    std::string config_path;
    std::string out_path = "stdout";
    std::map<std::string, std::string> flags;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--out", args.out_path, "output path or 'stdout'");
    for (const auto& key : kFlagKeys)
        cmd->add_option("--" + key, args.flags[key], "config override");
}

Config build_config(const CommonArgs& args) {
    Config cfg;
    if (!args.config_path.empty()) cfg.load_file(args.config_path);
    for (const auto& [key, value] : args.flags)
        if (!value.empty()) cfg.set(key, value);
    return cfg;
}

int with_output(const CommonArgs& args, const std::function<int(std::ostream&)>& fn) {
    if (args.out_path == "stdout" || args.out_path == "-") return fn(std::cout);
    std::ofstream out(args.out_path);
    if (!out) {
        std::cerr << "error: cannot open output file: " << args.out_path << "\n";
        return 1;
    }
    return fn(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Repeated-measurement qubit purification simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, check_args, sweep_args;
    auto* run_cmd = app.add_subcommand("run", "emit per-step trajectory CSV");
    add_common(run_cmd, run_args);
    auto* check_cmd = app.add_subcommand("check", "oracle-equivalence checks (exit 0 iff PASS)");
    add_common(check_cmd, check_args);
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter-grid sweep CSV");
    add_common(sweep_cmd, sweep_args);

    int it_lmax = 4, it_kmax = 15, it_trials = 100;
    long it_seed = 12345;
    double it_tol = 1e-8;
    std::string it_out = "stdout";
    auto* it_cmd = app.add_subcommand("identity-test", "nested-sum identity: closed vs brute");
    it_cmd->add_option("--lmax", it_lmax, "max chain length (<= 6)");
    it_cmd->add_option("--kmax", it_kmax, "max exponent (<= 25)");
    it_cmd->add_option("--trials", it_trials, "number of random draws");
    it_cmd->add_option("--seed", it_seed, "RNG seed");
    it_cmd->add_option("--tol", it_tol, "relative tolerance");
    it_cmd->add_option("--out", it_out, "output path or 'stdout'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed())
            return with_output(run_args, [&](std::ostream& out) {
                return qpurify::harness::run_command(build_config(run_args), out, std::cerr);
            });
        if (check_cmd->parsed())
            return with_output(check_args, [&](std::ostream& out) {
                return qpurify::harness::check_command(build_config(check_args), out, std::cerr);
            });
        if (sweep_cmd->parsed())
            return with_output(sweep_args, [&](std::ostream& out) {
                return qpurify::harness::sweep_command(build_config(sweep_args), out, std::cerr);
            });
        if (it_cmd->parsed()) {
            CommonArgs io;
            io.out_path = it_out;
            return with_output(io, [&](std::ostream& out) {
                return qpurify::harness::identity_test_command(it_lmax, it_kmax, it_trials,
                                                               it_seed, it_tol, out, std::cerr);
            });
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
