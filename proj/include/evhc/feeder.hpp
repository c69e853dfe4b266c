#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace evhc {

struct Node {
    std::string id;
    bool is_slack = false;
    std::optional<std::string> household;  // attached load, if any

    bool operator==(const Node&) const = default;
};

struct Branch {
    std::string id;
    std::string from;
    std::string to;
    double r_ohm = 0.0;
    double x_ohm = 0.0;
    double ampacity_a = 0.0;

    bool operator==(const Branch&) const = default;
};

struct Household {
    std::string id;
    std::string node;

    bool operator==(const Household&) const = default;
};

/// Radial low-voltage feeder, validated on construction and immutable afterwards.
///
/// The network is modelled as the single-phase equivalent of a balanced
/// system: `base_voltage_v` is the phase-to-neutral voltage, each household's
/// power is shared equally by `phases` conductors, branch impedances and
/// ampacities are per conductor, and the transformer rating is the total
/// three-phase apparent power.
class FeederModel {
public:
    FeederModel(std::string name, std::vector<Node> nodes, std::vector<Branch> branches,
                std::vector<Household> households, double transformer_kva, double base_voltage_v,
                int phases = 3);

    const std::string& name() const { return name_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<Household>& households() const { return households_; }
    double transformer_kva() const { return transformer_kva_; }
    double base_voltage_v() const { return base_voltage_v_; }
    int phases() const { return phases_; }

    std::size_t slack_index() const { return slack_; }
    std::optional<std::size_t> find_node(std::string_view id) const;
    std::size_t node_index(std::string_view id) const;  // throws ConfigError if unknown
    std::optional<std::size_t> find_household(std::string_view id) const;

    /// Node index hosting household `h` (index into households()).
    std::size_t household_node(std::size_t h) const { return household_node_[h]; }

    /// Branch connecting node `n` to its parent; nullopt for the slack node.
    std::optional<std::size_t> parent_branch(std::size_t n) const;
    /// Parent node of `n` towards the slack; nullopt for the slack node.
    std::optional<std::size_t> parent_node(std::size_t n) const;
    /// Number of branches between `n` and the slack.
    std::size_t depth(std::size_t n) const { return depth_[n]; }
    /// Node indices ordered so that every parent precedes its children (slack first).
    const std::vector<std::size_t>& topological_order() const { return order_; }

    bool operator==(const FeederModel& other) const;

private:
    std::string name_;
    std::vector<Node> nodes_;
    std::vector<Branch> branches_;
    std::vector<Household> households_;
    double transformer_kva_;
    double base_voltage_v_;
    int phases_;

    std::unordered_map<std::string, std::size_t> node_lookup_;
    std::unordered_map<std::string, std::size_t> household_lookup_;
    std::size_t slack_ = 0;
    std::vector<std::optional<std::size_t>> parent_branch_;
    std::vector<std::size_t> depth_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> household_node_;
};

/// Parses and validates a feeder document (JSON). Errors name the offending element.
FeederModel load_feeder(std::string_view document);
FeederModel load_feeder_file(const std::filesystem::path& path);

/// Inverse of load_feeder; reloading the output yields an equal model.
std::string serialize_feeder(const FeederModel& feeder);

/// Branch indices on the unique path from `node_id` to the slack, nearest branch first.
std::vector<std::size_t> path_to_slack(const FeederModel& feeder, std::string_view node_id);

/// Sum of branch impedance magnitudes from the household's node to the slack.
double path_impedance_ohm(const FeederModel& feeder, std::size_t household);

struct BaselineLoadProfile {
    std::string household;
    std::vector<double> power_kw;  // one value per time step

    bool operator==(const BaselineLoadProfile&) const = default;
};

/// Per-household baseline profiles ordered like feeder.households().
using BaselineProfiles = std::vector<BaselineLoadProfile>;

/// Reads a CSV table with a header row of household ids and one row per step (kW).
/// Columns may appear in any order; every feeder household must be present.
BaselineProfiles load_baseline_csv(std::string_view text, const FeederModel& feeder,
                                   std::size_t steps);
BaselineProfiles load_baseline_file(const std::filesystem::path& path, const FeederModel& feeder,
                                    std::size_t steps);
std::string write_baseline_csv(const BaselineProfiles& profiles);

}  // namespace evhc
