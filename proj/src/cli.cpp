#include "wavekin/cli.hpp"

#include "wavekin/config.hpp"
#include "wavekin/errors.hpp"
#include "wavekin/io.hpp"
#include "wavekin/kinetics.hpp"
#include "wavekin/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

namespace wavekin::cli {

namespace fs = std::filesystem;

namespace {

struct RunArgs {
    std::string target;
    std::string seed;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool verbose = false;
};

struct CalibrateArgs {
    std::string mode;
    double omega = 0.0;
    std::optional<double> tau;
    std::optional<double> gamma;
    std::optional<double> mean_intensity;
    double critical_constant = 1.0;
};

void print_error_chain(std::ostream& err, const std::exception& e, int depth = 0)
{
    fmt::print(err, "{}{}\n", depth == 0 ? "error: " : "  caused by: ", e.what());
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        // The pipeline message already quotes the cause.
        if (std::string_view(e.what()).find(inner.what()) == std::string_view::npos) {
            print_error_chain(err, inner, depth + 1);
        }
    } catch (...) {
    }
}

scenarios::Scenario resolve_target(const std::string& target)
{
    const auto names = scenarios::scenario_names();
    if (std::find(names.begin(), names.end(), target) != names.end()) {
        return scenarios::find_scenario(target);
    }
    std::error_code ec;
    if (fs::is_regular_file(target, ec)) {
        return config::load_scenario_file(target);
    }
    return scenarios::find_scenario(target);  // throws with the list of valid names
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err)
{
    scenarios::Scenario s = resolve_target(a.target);
    for (const auto& o : a.overrides) {
        config::apply_override(s, o);
    }
    if (!a.seed.empty()) {
        std::uint64_t seed = 0;
        const auto [end, ec] = std::from_chars(a.seed.data(), a.seed.data() + a.seed.size(), seed);
        if (ec != std::errc{} || end != a.seed.data() + a.seed.size()) {
            throw ConfigError(
                fmt::format("--seed '{}' is not a 64-bit unsigned integer", a.seed), 0, "seed");
        }
        s.seed = seed;
    }
    const fs::path dir = a.out_dir.empty() ? fs::path("runs") / s.name : fs::path(a.out_dir);

    scenarios::RunOptions options;
    if (a.verbose) {
        options.progress = [&err](std::string_view stage) {
            fmt::print(err, "[wavekin] {}\n", stage);
        };
    }
    const auto bundle = scenarios::run_scenario(s, options);
    if (a.verbose) {
        fmt::print(err, "[wavekin] writing {}\n", dir.string());
    }
    io::write_run(dir, s, bundle);

    fmt::print(out, "{} (seed {}): {} births -> {}\n", s.name, s.seed,
               bundle.events.birth_count(), dir.string());
    for (const auto& c : bundle.checks) {
        fmt::print(out, "  {} {} = {:.6g} ({} {:.6g})\n", c.passed ? "PASS" : "FAIL", c.statistic,
                   c.value, c.threshold.bound == scenarios::Threshold::Bound::Min ? ">=" : "<=",
                   c.threshold.value);
    }
    if (a.verbose) {
        for (const auto& [k, v] : bundle.statistics) {
            fmt::print(out, "  {} = {:.17g}\n", k, v);
        }
    }
    return bundle.passed() ? kExitOk : kExitThreshold;
}

int cmd_list(bool as_template, std::ostream& out)
{
    if (as_template) {
        out << config::template_text();
        return kExitOk;
    }
    for (const auto& s : scenarios::registry()) {
        fmt::print(out, "{:<22} {}\n", s.name, s.description);
    }
    return kExitOk;
}

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out)
{
    const auto mode = kinetics::parse_mode(a.mode);
    const auto p = kinetics::KineticParams::calibrate(mode, a.omega, a.tau, a.gamma);
    fmt::print(out, "mode = {}\n", kinetics::mode_name(p.mode()));
    fmt::print(out, "omega = {:.17g}\n", p.omega());
    fmt::print(out, "gamma = {:.17g}\n", p.gamma());
    fmt::print(out, "tau = {:.17g}\n", p.tau());
    fmt::print(out, "beta = {:.17g}\n", p.beta());
    fmt::print(out, "{} = {:.17g}\n",
               mode == kinetics::Mode::Photon ? "4_pi_gamma_tau_omega" : "gamma_tau_omega",
               p.calibration_product());
    if (a.mean_intensity) {
        fmt::print(out, "critical_scale = {:.17g}\n",
                   kinetics::critical_scale(*a.mean_intensity, p.omega(), a.critical_constant));
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Kinetic birth-death simulator of wave-driven particle statistics", "wavekin"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its output files");
    run_cmd->add_option("target", run_args.target, "Built-in scenario name or scenario file")
        ->required();
    run_cmd->add_option("--seed", run_args.seed, "Override the RNG seed (64-bit unsigned)");
    run_cmd->add_option("--out", run_args.out_dir, "Output directory (default runs/<name>)");
    run_cmd->add_option("--override", run_args.overrides,
                        "Set a scenario key, e.g. kinetics.tau=2 (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    run_cmd->add_flag("-v,--verbose", run_args.verbose, "Report pipeline stages");

    bool as_template = false;
    auto* list_cmd = app.add_subcommand("list", "List the built-in scenarios");
    list_cmd->add_flag("--template", as_template, "Print a commented scenario file template");

    CalibrateArgs cal;
    auto* cal_cmd =
        app.add_subcommand("calibrate", "Complete a kinetic parameter set from omega and tau or gamma");
    cal_cmd->add_option("--mode", cal.mode, "photon or matter")
        ->required()
        ->check(CLI::IsMember({"photon", "matter"}));
    cal_cmd->add_option("--omega", cal.omega, "Angular frequency")->required();
    cal_cmd->add_option("--tau", cal.tau, "Mean lifetime");
    cal_cmd->add_option("--gamma", cal.gamma, "Birth rate constant");
    cal_cmd->add_option("--mean-intensity", cal.mean_intensity,
                        "Mean intensity <E^2> for the critical disturbance scale");
    cal_cmd->add_option("--critical-constant", cal.critical_constant,
                        "Constant C in <E^2> Lambda^3 = C omega");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*run_cmd) {
            return cmd_run(run_args, out, err);
        }
        if (*list_cmd) {
            return cmd_list(as_template, out);
        }
        if (*cal_cmd) {
            if (!cal.tau && !cal.gamma) {
                fmt::print(err, "error: calibrate needs --tau or --gamma\n");
                return kExitError;
            }
            return cmd_calibrate(cal, out);
        }
    } catch (const std::exception& e) {
        print_error_chain(err, e);
        return kExitError;
    }
    return kExitError;
}

} // namespace wavekin::cli
