#include "evhc/feeder.hpp"

#include "evhc/errors.hpp"
#include "evhc/table.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numeric>

namespace evhc {

namespace {

using nlohmann::json;

// Path between a and b in the forest described by `adjacency` (node -> (neighbour, branch)).
std::vector<std::size_t> forest_path(const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& adjacency,
                                     std::size_t a, std::size_t b) {
    std::vector<std::optional<std::size_t>> prev(adjacency.size());
    std::vector<bool> seen(adjacency.size(), false);
    std::deque<std::size_t> queue{a};
    seen[a] = true;
    while (!queue.empty()) {
        const auto n = queue.front();
        queue.pop_front();
        if (n == b) {
            break;
        }
        for (const auto& [m, br] : adjacency[n]) {
            if (!seen[m]) {
                seen[m] = true;
                prev[m] = n;
                queue.push_back(m);
            }
        }
    }
    std::vector<std::size_t> path{b};
    while (path.back() != a) {
        path.push_back(*prev[path.back()]);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace

FeederModel::FeederModel(std::string name, std::vector<Node> nodes, std::vector<Branch> branches,
                         std::vector<Household> households, double transformer_kva, double base_voltage_v,
                         int phases)
    : name_(std::move(name)),
      nodes_(std::move(nodes)),
      branches_(std::move(branches)),
      households_(std::move(households)),
      transformer_kva_(transformer_kva),
      base_voltage_v_(base_voltage_v),
      phases_(phases) {
    if (nodes_.empty()) {
        throw ConfigError("feeder has no nodes");
    }
    if (!(transformer_kva_ > 0.0)) {
        throw ConfigError("transformer rating must be positive");
    }
    if (!(base_voltage_v_ > 0.0)) {
        throw ConfigError("base voltage must be positive");
    }
    if (phases_ != 1 && phases_ != 3) {
        throw ConfigError("phases must be 1 or 3");
    }

    std::vector<std::size_t> slacks;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.id.empty()) {
            throw ConfigError("node #" + std::to_string(i) + " has an empty id");
        }
        if (!node_lookup_.emplace(n.id, i).second) {
            throw ConfigError("duplicate node id '" + n.id + "'");
        }
        if (n.is_slack) {
            slacks.push_back(i);
        }
        // Attachments are rebuilt from the household list.
        nodes_[i].household.reset();
    }
    if (slacks.empty()) {
        throw ConfigError("feeder has no slack node");
    }
    if (slacks.size() > 1) {
        throw ConfigError("feeder has multiple slack nodes: '" + nodes_[slacks[0]].id + "' and '" +
                          nodes_[slacks[1]].id + "'");
    }
    slack_ = slacks.front();

    // Branch sanity and cycle detection with a union-find over the growing forest.
    std::vector<std::size_t> uf(nodes_.size());
    std::iota(uf.begin(), uf.end(), std::size_t{0});
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(nodes_.size());
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        auto& br = branches_[b];
        if (br.id.empty()) {
            br.id = br.from + "-" + br.to;
        }
        const auto from = find_node(br.from);
        const auto to = find_node(br.to);
        if (!from) {
            throw ConfigError("branch '" + br.id + "' references unknown node '" + br.from + "'");
        }
        if (!to) {
            throw ConfigError("branch '" + br.id + "' references unknown node '" + br.to + "'");
        }
        if (*from == *to) {
            throw ConfigError("branch '" + br.id + "' is a self-loop on node '" + br.from + "'");
        }
        if (!(br.r_ohm >= 0.0) || !(br.x_ohm >= 0.0)) {
            throw ConfigError("branch '" + br.id + "' has negative impedance");
        }
        if (!(br.ampacity_a > 0.0)) {
            throw ConfigError("branch '" + br.id + "' must have positive ampacity");
        }
        const auto ra = find_root(uf, *from);
        const auto rb = find_root(uf, *to);
        if (ra == rb) {
            std::string cycle;
            for (auto n : forest_path(adjacency, *from, *to)) {
                cycle += nodes_[n].id + " -> ";
            }
            cycle += nodes_[*from].id;
            throw ConfigError("topology is not radial: branch '" + br.id + "' closes cycle " + cycle);
        }
        uf[ra] = rb;
        adjacency[*from].emplace_back(*to, b);
        adjacency[*to].emplace_back(*from, b);
    }
    if (branches_.size() + 1 != nodes_.size()) {
        // Acyclic with fewer branches than nodes-1 means a disconnected forest.
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (find_root(uf, i) != find_root(uf, slack_)) {
                throw ConfigError("node '" + nodes_[i].id + "' is not connected to the slack node");
            }
        }
    }

    // Orient the tree away from the slack.
    parent_branch_.assign(nodes_.size(), std::nullopt);
    depth_.assign(nodes_.size(), 0);
    std::vector<bool> seen(nodes_.size(), false);
    std::deque<std::size_t> queue{slack_};
    seen[slack_] = true;
    while (!queue.empty()) {
        const auto n = queue.front();
        queue.pop_front();
        order_.push_back(n);
        for (const auto& [m, b] : adjacency[n]) {
            if (!seen[m]) {
                seen[m] = true;
                parent_branch_[m] = b;
                depth_[m] = depth_[n] + 1;
                queue.push_back(m);
            }
        }
    }

    household_node_.reserve(households_.size());
    for (std::size_t h = 0; h < households_.size(); ++h) {
        const auto& hh = households_[h];
        if (hh.id.empty()) {
            throw ConfigError("household #" + std::to_string(h) + " has an empty id");
        }
        if (!household_lookup_.emplace(hh.id, h).second) {
            throw ConfigError("duplicate household id '" + hh.id + "'");
        }
        const auto n = find_node(hh.node);
        if (!n) {
            throw ConfigError("household '" + hh.id + "' attaches to unknown node '" + hh.node + "'");
        }
        if (*n == slack_) {
            throw ConfigError("household '" + hh.id + "' attaches to the slack node '" + hh.node + "'");
        }
        if (nodes_[*n].household) {
            throw ConfigError("household '" + hh.id + "' attaches to node '" + hh.node +
                              "' which already hosts '" + *nodes_[*n].household + "'");
        }
        nodes_[*n].household = hh.id;
        household_node_.push_back(*n);
    }
}

std::optional<std::size_t> FeederModel::find_node(std::string_view id) const {
    const auto it = node_lookup_.find(std::string(id));
    if (it == node_lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t FeederModel::node_index(std::string_view id) const {
    if (const auto n = find_node(id)) {
        return *n;
    }
    throw ConfigError("unknown node id '" + std::string(id) + "'");
}

std::optional<std::size_t> FeederModel::find_household(std::string_view id) const {
    const auto it = household_lookup_.find(std::string(id));
    if (it == household_lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::size_t> FeederModel::parent_branch(std::size_t n) const { return parent_branch_.at(n); }

std::optional<std::size_t> FeederModel::parent_node(std::size_t n) const {
    const auto b = parent_branch_.at(n);
    if (!b) {
        return std::nullopt;
    }
    const auto& br = branches_[*b];
    const auto from = node_lookup_.at(br.from);
    return from == n ? node_lookup_.at(br.to) : from;
}

bool FeederModel::operator==(const FeederModel& other) const {
    return name_ == other.name_ && nodes_ == other.nodes_ && branches_ == other.branches_ &&
           households_ == other.households_ && transformer_kva_ == other.transformer_kva_ &&
           base_voltage_v_ == other.base_voltage_v_ && phases_ == other.phases_;
}

FeederModel load_feeder(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("feeder document parse failure: ") + e.what());
    }
    try {
        std::vector<Node> nodes;
        for (const auto& n : doc.at("nodes")) {
            nodes.push_back(Node{n.at("id").get<std::string>(), n.value("slack", false), std::nullopt});
        }
        std::vector<Branch> branches;
        for (const auto& b : doc.at("branches")) {
            branches.push_back(Branch{b.value("id", std::string{}), b.at("from").get<std::string>(),
                                      b.at("to").get<std::string>(), b.at("r_ohm").get<double>(),
                                      b.at("x_ohm").get<double>(), b.at("ampacity_a").get<double>()});
        }
        std::vector<Household> households;
        if (doc.contains("households")) {
            for (const auto& h : doc.at("households")) {
                households.push_back(Household{h.at("id").get<std::string>(), h.at("node").get<std::string>()});
            }
        }
        return FeederModel(doc.value("name", std::string{"feeder"}), std::move(nodes), std::move(branches),
                           std::move(households), doc.at("transformer").at("kva").get<double>(),
                           doc.at("base_voltage_v").get<double>(), doc.value("phases", 3));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("feeder document schema violation: ") + e.what());
    }
}

FeederModel load_feeder_file(const std::filesystem::path& path) {
    try {
        return load_feeder(read_text_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_feeder(const FeederModel& feeder) {
    json doc;
    doc["name"] = feeder.name();
    doc["base_voltage_v"] = feeder.base_voltage_v();
    doc["phases"] = feeder.phases();
    doc["transformer"] = {{"kva", feeder.transformer_kva()}};
    auto& nodes = doc["nodes"] = json::array();
    for (const auto& n : feeder.nodes()) {
        json j{{"id", n.id}};
        if (n.is_slack) {
            j["slack"] = true;
        }
        nodes.push_back(std::move(j));
    }
    auto& branches = doc["branches"] = json::array();
    for (const auto& b : feeder.branches()) {
        branches.push_back({{"id", b.id},
                            {"from", b.from},
                            {"to", b.to},
                            {"r_ohm", b.r_ohm},
                            {"x_ohm", b.x_ohm},
                            {"ampacity_a", b.ampacity_a}});
    }
    auto& households = doc["households"] = json::array();
    for (const auto& h : feeder.households()) {
        households.push_back({{"id", h.id}, {"node", h.node}});
    }
    return doc.dump(2) + "\n";
}

std::vector<std::size_t> path_to_slack(const FeederModel& feeder, std::string_view node_id) {
    auto n = feeder.node_index(node_id);
    std::vector<std::size_t> path;
    while (const auto b = feeder.parent_branch(n)) {
        path.push_back(*b);
        n = *feeder.parent_node(n);
    }
    return path;
}

double path_impedance_ohm(const FeederModel& feeder, std::size_t household) {
    const auto& node = feeder.nodes()[feeder.household_node(household)].id;
    double z = 0.0;
    for (auto b : path_to_slack(feeder, node)) {
        const auto& br = feeder.branches()[b];
        z += std::abs(std::complex<double>(br.r_ohm, br.x_ohm));
    }
    return z;
}

BaselineProfiles load_baseline_csv(std::string_view text, const FeederModel& feeder, std::size_t steps) {
    const auto table = parse_csv(text);
    if (table.rows.size() != steps) {
        throw ConfigError("baseline profile has " + std::to_string(table.rows.size()) + " rows, expected " +
                          std::to_string(steps));
    }
    BaselineProfiles profiles;
    profiles.reserve(feeder.households().size());
    for (const auto& hh : feeder.households()) {
        std::size_t col = 0;
        try {
            col = table.column(hh.id);
        } catch (const ConfigError&) {
            throw ConfigError("baseline profile lacks a column for household '" + hh.id + "'");
        }
        BaselineLoadProfile p{hh.id, {}};
        p.power_kw.reserve(steps);
        for (std::size_t r = 0; r < steps; ++r) {
            const auto where = "baseline '" + hh.id + "' step " + std::to_string(r);
            const double v = parse_double(table.rows[r][col], where);
            if (v < 0.0) {
                throw ConfigError(where + ": negative load " + table.rows[r][col]);
            }
            p.power_kw.push_back(v);
        }
        profiles.push_back(std::move(p));
    }
    return profiles;
}

BaselineProfiles load_baseline_file(const std::filesystem::path& path, const FeederModel& feeder,
                                    std::size_t steps) {
    try {
        return load_baseline_csv(read_text_file(path), feeder, steps);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string write_baseline_csv(const BaselineProfiles& profiles) {
    std::vector<std::string> header;
    for (const auto& p : profiles) {
        header.push_back(p.household);
    }
    CsvWriter out(header);
    const auto steps = profiles.empty() ? 0 : profiles.front().power_kw.size();
    for (std::size_t t = 0; t < steps; ++t) {
        for (const auto& p : profiles) {
            out.cell(p.power_kw.at(t), 4);
        }
        out.end_row();
    }
    return out.str();
}

}  // namespace evhc
