#pragma once

#include "evhc/ev.hpp"
#include "evhc/feeder.hpp"
#include "evhc/hc.hpp"
#include "evhc/horizon.hpp"
#include "evhc/powerflow.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evhc {

inline constexpr const char* kVersion = "0.1.0";

enum class RunMode { passive, network_aware, compare, sweep_doe, sweep_qos_threshold };

const char* to_string(RunMode mode);
RunMode parse_run_mode(std::string_view text);

/// Where the EV sessions come from: the generator (one fleet per scenario)
/// or a fleet table written earlier.
struct FleetSource {
    std::uint64_t seed = 42;
    std::vector<EnergyScenario> scenarios;
    std::optional<std::filesystem::path> file;
    std::string file_label = "imported";
};

struct SweepGrids {
    std::vector<double> delta_perm{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1};
    std::vector<double> factor{0.0, 0.2, 0.5};
    std::vector<double> qos_threshold{0.6, 0.7, 0.8, 0.9};
};

/// A parsed scenario file. Paths are kept as written; relative ones are
/// resolved against base_dir (the scenario file's directory).
struct ScenarioFile {
    std::filesystem::path base_dir;
    RunMode mode = RunMode::compare;
    std::optional<std::filesystem::path> feeder;    // bundled feeder when absent
    std::optional<std::filesystem::path> baseline;  // bundled profiles when absent
    std::filesystem::path output_dir = "results";
    Horizon horizon{};
    PowerFlowOptions powerflow{};
    double baseline_power_factor = 0.95;
    FleetSource fleet{};
    HcSearchConfig search{};
    SweepGrids sweep{};

    /// Defaults plus the three presets, the out-of-the-box study.
    static ScenarioFile defaults();

    std::filesystem::path resolve(const std::filesystem::path& p) const;
};

/// Parses a JSON scenario document. Unknown keys and out-of-range values throw ConfigError.
ScenarioFile parse_scenario(std::string_view document, const std::filesystem::path& base_dir = {});
ScenarioFile load_scenario_file(const std::filesystem::path& path);

/// Canonical JSON form with every default written out; paths stay as given.
std::string scenario_to_json(const ScenarioFile& scenario);

/// FNV-1a 64 of the canonical JSON form.
std::uint64_t config_hash(const ScenarioFile& scenario);

/// Inputs referenced by a scenario, loaded and validated.
struct StudyInputs {
    FeederModel feeder;
    BaselineProfiles baselines;
    std::vector<LabelledFleet> fleets;
};

StudyInputs load_inputs(const ScenarioFile& scenario);

/// Runs the scenario's mode and writes every result file under output_dir.
/// Returns the written file names relative to output_dir, sorted.
std::vector<std::string> run_scenario(const ScenarioFile& scenario, unsigned workers = 1);

/// Reads result files in `results_dir` and writes plot-ready tables to results_dir/plots.
/// Throws ConfigError when no upstream result is present.
std::vector<std::string> emit_plot_data(const std::filesystem::path& results_dir);

/// Writes feeder.json, baseline.csv and scenario.json for the bundled study into `dir`.
std::vector<std::filesystem::path> write_example(const std::filesystem::path& dir);

}  // namespace evhc
