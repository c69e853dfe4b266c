// Command-line front end: run studies from a scenario file and export results.
#include "evhc/errors.hpp"
#include "evhc/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSimulationError = 2;

struct Overrides {
    std::string scenario;
    std::string output;
    unsigned workers = 1;
    std::optional<long long> seed;
    std::string mode;
};

evhc::ScenarioFile load(const Overrides& o) {
    auto sc = evhc::load_scenario_file(o.scenario);
    if (!o.output.empty()) {
        // An explicit output directory is taken relative to the working directory.
        sc.output_dir = std::filesystem::absolute(o.output);
    }
    if (o.seed) {
        if (*o.seed < 0) {
            throw evhc::ConfigError("seed must be non-negative");
        }
        sc.fleet.seed = static_cast<std::uint64_t>(*o.seed);
    }
    if (!o.mode.empty()) {
        sc.mode = evhc::parse_run_mode(o.mode);
    }
    return sc;
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("scenario", o.scenario, "Scenario file (JSON)")->required();
    cmd->add_option("-o,--output", o.output, "Output directory (overrides the scenario)");
    cmd->add_option("-j,--workers", o.workers, "Worker threads")->check(CLI::Range(1u, 256u));
    cmd->add_option("--seed", o.seed, "Fleet seed override");
}

int run_and_report(const evhc::ScenarioFile& sc, unsigned workers) {
    const auto files = evhc::run_scenario(sc, workers);
    std::cout << "wrote " << files.size() << " files to " << sc.resolve(sc.output_dir).generic_string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EV hosting capacity of LV feeders, passive and under dynamic operating envelopes"};
    app.set_version_flag("--version", std::string(evhc::kVersion));
    app.require_subcommand(1);

    Overrides run_opts;
    auto* run = app.add_subcommand("run", "Run the scenario's mode (passive, network_aware, compare, ...)");
    add_common(run, run_opts);
    run->add_option("-m,--mode", run_opts.mode, "Mode override");

    Overrides sweep_opts;
    std::string sweep_kind = "doe";
    auto* sweep = app.add_subcommand("sweep", "DOE-parameter or QoS-threshold sweep");
    add_common(sweep, sweep_opts);
    sweep->add_option("-k,--kind", sweep_kind, "doe or qos_threshold")->check(CLI::IsMember({"doe", "qos_threshold"}));

    std::string plots_dir;
    auto* plots = app.add_subcommand("emit-plots", "Write plot-ready tables from a results directory");
    plots->add_option("results", plots_dir, "Results directory")->required();

    Overrides validate_opts;
    auto* validate = app.add_subcommand("validate", "Check a scenario file and the inputs it references");
    validate->add_option("scenario", validate_opts.scenario, "Scenario file (JSON)")->required();

    std::string example_dir = ".";
    auto* init = app.add_subcommand("init-example", "Write the bundled feeder, baseline and a default scenario");
    init->add_option("dir", example_dir, "Target directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) {
            return run_and_report(load(run_opts), run_opts.workers);
        }
        if (*sweep) {
            auto sc = load(sweep_opts);
            sc.mode = sweep_kind == "doe" ? evhc::RunMode::sweep_doe : evhc::RunMode::sweep_qos_threshold;
            return run_and_report(sc, sweep_opts.workers);
        }
        if (*plots) {
            for (const auto& f : evhc::emit_plot_data(plots_dir)) {
                std::cout << "plots/" << f << "\n";
            }
            return kOk;
        }
        if (*validate) {
            const auto sc = evhc::load_scenario_file(validate_opts.scenario);
            const auto inputs = evhc::load_inputs(sc);
            std::cout << "ok: " << inputs.feeder.nodes().size() << " nodes, " << inputs.feeder.households().size()
                      << " households, " << inputs.fleets.size() << " fleet(s), mode " << evhc::to_string(sc.mode)
                      << "\n";
            return kOk;
        }
        if (*init) {
            for (const auto& p : evhc::write_example(example_dir)) {
                std::cout << p.generic_string() << "\n";
            }
            return kOk;
        }
    } catch (const evhc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const evhc::SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kSimulationError;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kSimulationError;
    }
    return kOk;
}
