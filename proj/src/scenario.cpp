#include "evhc/scenario.hpp"

#include "evhc/bundled.hpp"
#include "evhc/errors.hpp"
#include "evhc/parallel.hpp"
#include "evhc/table.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace evhc {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::passive: return "passive";
        case RunMode::network_aware: return "network_aware";
        case RunMode::compare: return "compare";
        case RunMode::sweep_doe: return "sweep_doe";
        case RunMode::sweep_qos_threshold: return "sweep_qos_threshold";
    }
    return "unknown";
}

RunMode parse_run_mode(std::string_view text) {
    for (auto m : {RunMode::passive, RunMode::network_aware, RunMode::compare, RunMode::sweep_doe,
                   RunMode::sweep_qos_threshold}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    throw ConfigError("unknown mode '" + std::string(text) +
                      "' (expected passive, network_aware, compare, sweep_doe or sweep_qos_threshold)");
}

ScenarioFile ScenarioFile::defaults() {
    ScenarioFile s;
    for (auto level : {EnergyLevel::low, EnergyLevel::medium, EnergyLevel::high}) {
        s.fleet.scenarios.push_back(EnergyScenario::preset(level));
    }
    return s;
}

fs::path ScenarioFile::resolve(const fs::path& p) const {
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers can be reported.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(where() + " must be an object");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = raw(key);
        if (!v.is_number()) {
            throw ConfigError(where(key) + " must be a number");
        }
        return v.get<double>();
    }

    long long integer(const std::string& key, long long fallback) {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = raw(key);
        if (!v.is_number_integer()) {
            throw ConfigError(where(key) + " must be an integer");
        }
        return v.get<long long>();
    }

    std::string text(const std::string& key, std::string fallback) {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = raw(key);
        if (!v.is_string()) {
            throw ConfigError(where(key) + " must be a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = raw(key);
        if (!v.is_array()) {
            throw ConfigError(where(key) + " must be an array of numbers");
        }
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) {
                throw ConfigError(where(key) + " must be an array of numbers");
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::string where(const std::string& key = {}) const { return key.empty() ? path_ : path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) {
                throw ConfigError("unknown key '" + where(key) + "'");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void require_range(double value, double lo, double hi, const std::string& name) {
    if (!(value >= lo && value <= hi)) {
        throw ConfigError(name + " = " + format_shortest(value) + " is outside the valid range [" + format_shortest(lo) +
                          ", " + format_shortest(hi) + "]");
    }
}

std::vector<double> read_grid(Section& s, const std::string& key, std::vector<double> fallback) {
    if (s.has(key) && s.raw(key).is_object()) {
        Section g(s.raw(key), s.where(key));
        const double start = g.number("start", 1.0);
        const double stop = g.number("stop", 20.0);
        const double step = g.number("step", 1.0);
        g.finish();
        if (!(step > 0.0) || stop < start) {
            throw ConfigError(s.where(key) + " needs step > 0 and stop >= start");
        }
        std::vector<double> out;
        const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
        for (long long i = 0; i <= n; ++i) {
            // Round to 1e-9 so that 0.1-style steps do not drift.
            out.push_back(std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9);
        }
        return out;
    }
    return s.numbers(key, std::move(fallback));
}

EnergyScenario read_energy_scenario(const json& j, const std::string& where) {
    Section s(j, where);
    if (!s.has("level")) {
        throw ConfigError(where + ".level is required");
    }
    auto sc = EnergyScenario::preset(parse_energy_level(s.text("level", "")));
    sc.energy_min_kwh = s.number("energy_min_kwh", sc.energy_min_kwh);
    sc.energy_max_kwh = s.number("energy_max_kwh", sc.energy_max_kwh);
    sc.arrival_mean_h = s.number("arrival_mean_h", sc.arrival_mean_h);
    sc.arrival_sd_h = s.number("arrival_sd_h", sc.arrival_sd_h);
    sc.departure_mean_h = s.number("departure_mean_h", sc.departure_mean_h);
    sc.departure_sd_h = s.number("departure_sd_h", sc.departure_sd_h);
    sc.rated_kw = s.number("rated_kw", sc.rated_kw);
    sc.window_model = parse_window_model(s.text("window_model", to_string(sc.window_model)));
    sc.dwell_factor_min = s.number("dwell_factor_min", sc.dwell_factor_min);
    sc.dwell_factor_max = s.number("dwell_factor_max", sc.dwell_factor_max);
    s.finish();
    try {
        sc.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return sc;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

}  // namespace

ScenarioFile parse_scenario(std::string_view document, const fs::path& base_dir) {
    json root;
    try {
        root = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    ScenarioFile sc = ScenarioFile::defaults();
    sc.base_dir = base_dir;
    Section top(root, "scenario");

    sc.mode = parse_run_mode(top.text("mode", to_string(sc.mode)));
    if (top.has("feeder")) {
        sc.feeder = top.text("feeder", "");
    }
    if (top.has("baseline")) {
        sc.baseline = top.text("baseline", "");
    }
    sc.output_dir = top.text("output_dir", sc.output_dir.generic_string());

    if (top.has("horizon")) {
        Section h(top.raw("horizon"), "horizon");
        const auto steps = h.integer("steps", static_cast<long long>(sc.horizon.steps));
        const auto origin = h.integer("origin_step", static_cast<long long>(sc.horizon.origin_step));
        if (steps <= 0 || origin < 0) {
            throw ConfigError("horizon.steps must be positive and horizon.origin_step non-negative");
        }
        sc.horizon.steps = static_cast<std::size_t>(steps);
        sc.horizon.origin_step = static_cast<std::size_t>(origin);
        sc.horizon.step_hours = h.number("step_hours", sc.horizon.step_hours);
        h.finish();
    }
    sc.horizon.validate();

    if (top.has("powerflow")) {
        Section p(top.raw("powerflow"), "powerflow");
        sc.powerflow.tolerance_pu = p.number("tolerance_pu", sc.powerflow.tolerance_pu);
        sc.powerflow.max_iterations = static_cast<int>(p.integer("max_iterations", sc.powerflow.max_iterations));
        sc.powerflow.collapse_floor_pu = p.number("collapse_floor_pu", sc.powerflow.collapse_floor_pu);
        sc.baseline_power_factor = p.number("baseline_power_factor", sc.baseline_power_factor);
        p.finish();
    }
    if (!(sc.powerflow.tolerance_pu > 0.0) || sc.powerflow.max_iterations < 1) {
        throw ConfigError("powerflow.tolerance_pu and powerflow.max_iterations must be positive");
    }
    require_range(sc.powerflow.collapse_floor_pu, 0.0, 0.99, "powerflow.collapse_floor_pu");
    if (!(sc.baseline_power_factor > 0.0 && sc.baseline_power_factor <= 1.0)) {
        throw ConfigError("powerflow.baseline_power_factor must lie in (0, 1]");
    }

    if (top.has("fleet")) {
        Section f(top.raw("fleet"), "fleet");
        const auto seed = f.integer("seed", static_cast<long long>(sc.fleet.seed));
        if (seed < 0) {
            throw ConfigError("fleet.seed must be non-negative");
        }
        sc.fleet.seed = static_cast<std::uint64_t>(seed);
        if (f.has("file")) {
            sc.fleet.file = f.text("file", "");
            sc.fleet.file_label = f.text("label", sc.fleet.file_label);
        }
        if (f.has("scenarios")) {
            const auto& arr = f.raw("scenarios");
            if (!arr.is_array()) {
                throw ConfigError("fleet.scenarios must be an array");
            }
            sc.fleet.scenarios.clear();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const auto& item = arr[i];
                const std::string where = "fleet.scenarios[" + std::to_string(i) + "]";
                if (item.is_string()) {
                    sc.fleet.scenarios.push_back(EnergyScenario::preset(parse_energy_level(item.get<std::string>())));
                } else {
                    sc.fleet.scenarios.push_back(read_energy_scenario(item, where));
                }
            }
        }
        f.finish();
    }
    if (!sc.fleet.file && sc.fleet.scenarios.empty()) {
        throw ConfigError("fleet needs at least one scenario or a fleet file");
    }
    std::set<std::string> labels;
    for (const auto& s : sc.fleet.scenarios) {
        if (!labels.insert(s.label()).second) {
            throw ConfigError("fleet.scenarios lists '" + s.label() + "' twice");
        }
    }

    auto& doe = sc.search.doe;
    if (top.has("doe")) {
        Section d(top.raw("doe"), "doe");
        doe.delta_perm = d.number("delta_perm", doe.delta_perm);
        doe.factor = d.number("factor", doe.factor);
        doe.u_min = d.number("u_min", doe.u_min);
        doe.voltage_source = parse_voltage_source(d.text("voltage_source", to_string(doe.voltage_source)));
        doe.fixed_point_tolerance_kw = d.number("fixed_point_tolerance_kw", doe.fixed_point_tolerance_kw);
        doe.fixed_point_max_iterations =
            static_cast<int>(d.integer("fixed_point_max_iterations", doe.fixed_point_max_iterations));
        d.finish();
    }
    require_range(doe.delta_perm, 0.0, 0.1, "doe.delta_perm");
    require_range(doe.factor, 0.0, 1.0, "doe.factor");
    doe.validate();

    if (top.has("limits")) {
        Section l(top.raw("limits"), "limits");
        sc.search.limits.v_lower = l.number("v_lower", sc.search.limits.v_lower);
        sc.search.limits.v_upper = l.number("v_upper", sc.search.limits.v_upper);
        l.finish();
    }

    if (top.has("search")) {
        Section s(top.raw("search"), "search");
        sc.search.power_grid = read_grid(s, "power_grid", sc.search.power_grid);
        sc.search.qos_threshold = s.number("qos_threshold", sc.search.qos_threshold);
        sc.search.dimension = parse_sweep_dimension(s.text("dimension", to_string(sc.search.dimension)));
        sc.search.ev_count_power_kw = s.number("ev_count_power_kw", sc.search.ev_count_power_kw);
        s.finish();
    }
    require_range(sc.search.qos_threshold, 0.0, 1.0, "search.qos_threshold");
    sc.search.validate();

    if (top.has("sweep")) {
        Section s(top.raw("sweep"), "sweep");
        sc.sweep.delta_perm = read_grid(s, "delta_perm", sc.sweep.delta_perm);
        sc.sweep.factor = s.numbers("factor", sc.sweep.factor);
        sc.sweep.qos_threshold = s.numbers("qos_threshold", sc.sweep.qos_threshold);
        s.finish();
    }
    for (const double d : sc.sweep.delta_perm) {
        require_range(d, 0.0, 0.1, "sweep.delta_perm");
    }
    for (const double f : sc.sweep.factor) {
        require_range(f, 0.0, 1.0, "sweep.factor");
    }
    for (const double q : sc.sweep.qos_threshold) {
        require_range(q, 0.0, 1.0, "sweep.qos_threshold");
    }
    if (sc.sweep.delta_perm.empty() || sc.sweep.factor.empty() || sc.sweep.qos_threshold.empty()) {
        throw ConfigError("sweep grids must not be empty");
    }
    top.finish();
    return sc;
}

ScenarioFile load_scenario_file(const fs::path& path) {
    if (!fs::exists(path)) {
        throw ConfigError("scenario file not found: " + path.string());
    }
    try {
        return parse_scenario(read_text_file(path), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.filename().string() + ": " + e.what());
    }
}

namespace {

json scenario_json(const ScenarioFile& sc) {
    json j;
    j["mode"] = to_string(sc.mode);
    if (sc.feeder) {
        j["feeder"] = sc.feeder->generic_string();
    }
    if (sc.baseline) {
        j["baseline"] = sc.baseline->generic_string();
    }
    j["output_dir"] = sc.output_dir.generic_string();
    j["horizon"] = {{"steps", sc.horizon.steps},
                    {"step_hours", sc.horizon.step_hours},
                    {"origin_step", sc.horizon.origin_step}};
    j["powerflow"] = {{"tolerance_pu", sc.powerflow.tolerance_pu},
                      {"max_iterations", sc.powerflow.max_iterations},
                      {"collapse_floor_pu", sc.powerflow.collapse_floor_pu},
                      {"baseline_power_factor", sc.baseline_power_factor}};
    json fleet;
    fleet["seed"] = sc.fleet.seed;
    if (sc.fleet.file) {
        fleet["file"] = sc.fleet.file->generic_string();
        fleet["label"] = sc.fleet.file_label;
    }
    json scenarios = json::array();
    for (const auto& s : sc.fleet.scenarios) {
        scenarios.push_back({{"level", to_string(s.level)},
                             {"energy_min_kwh", s.energy_min_kwh},
                             {"energy_max_kwh", s.energy_max_kwh},
                             {"arrival_mean_h", s.arrival_mean_h},
                             {"arrival_sd_h", s.arrival_sd_h},
                             {"departure_mean_h", s.departure_mean_h},
                             {"departure_sd_h", s.departure_sd_h},
                             {"rated_kw", s.rated_kw},
                             {"window_model", to_string(s.window_model)},
                             {"dwell_factor_min", s.dwell_factor_min},
                             {"dwell_factor_max", s.dwell_factor_max}});
    }
    fleet["scenarios"] = scenarios;
    j["fleet"] = fleet;
    const auto& d = sc.search.doe;
    j["doe"] = {{"delta_perm", d.delta_perm},
                {"factor", d.factor},
                {"u_min", d.u_min},
                {"voltage_source", to_string(d.voltage_source)},
                {"fixed_point_tolerance_kw", d.fixed_point_tolerance_kw},
                {"fixed_point_max_iterations", d.fixed_point_max_iterations}};
    j["limits"] = {{"v_lower", sc.search.limits.v_lower}, {"v_upper", sc.search.limits.v_upper}};
    j["search"] = {{"power_grid", sc.search.power_grid},
                   {"qos_threshold", sc.search.qos_threshold},
                   {"dimension", to_string(sc.search.dimension)},
                   {"ev_count_power_kw", sc.search.ev_count_power_kw}};
    j["sweep"] = {{"delta_perm", sc.sweep.delta_perm},
                  {"factor", sc.sweep.factor},
                  {"qos_threshold", sc.sweep.qos_threshold}};
    return j;
}

}  // namespace

std::string scenario_to_json(const ScenarioFile& scenario) {
    return scenario_json(scenario).dump(2) + "\n";
}

std::uint64_t config_hash(const ScenarioFile& scenario) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : scenario_json(scenario).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

StudyInputs load_inputs(const ScenarioFile& sc) {
    auto require_file = [&](const fs::path& p, const char* what) {
        const auto full = sc.resolve(p);
        if (!fs::exists(full)) {
            throw ConfigError(std::string(what) + " file not found: " + full.generic_string());
        }
        return full;
    };
    FeederModel feeder = sc.feeder ? load_feeder_file(require_file(*sc.feeder, "feeder")) : bundled::feeder();
    BaselineProfiles baselines;
    if (sc.baseline) {
        baselines = load_baseline_file(require_file(*sc.baseline, "baseline"), feeder, sc.horizon.steps);
    } else if (!sc.feeder) {
        baselines = bundled::baseline(feeder, sc.horizon);
    } else {
        throw ConfigError("a custom feeder needs a baseline file");
    }

    std::vector<std::string> ids;
    for (const auto& h : feeder.households()) {
        ids.push_back(h.id);
    }
    std::vector<LabelledFleet> fleets;
    for (const auto& s : sc.fleet.scenarios) {
        fleets.push_back({s.label(), generate_fleet(s, ids, sc.fleet.seed, sc.horizon)});
    }
    if (sc.fleet.file) {
        auto sessions = load_fleet_file(require_file(*sc.fleet.file, "fleet"), sc.horizon);
        for (const auto& s : sessions) {
            if (!feeder.find_household(s.household)) {
                throw ConfigError("fleet file references unknown household '" + s.household + "'");
            }
        }
        for (const auto& f : fleets) {
            if (f.label == sc.fleet.file_label) {
                throw ConfigError("fleet label '" + sc.fleet.file_label + "' clashes with a generated scenario");
            }
        }
        fleets.push_back({sc.fleet.file_label, std::move(sessions)});
    }
    return {std::move(feeder), std::move(baselines), std::move(fleets)};
}

namespace {

struct Study {
    std::optional<HcReport> passive;
    std::optional<HcReport> network_aware;
};

std::string limiting_text(const HcReport& r) {
    return r.limiting_factor ? to_string(*r.limiting_factor) : "none";
}

json report_json(const HcReport& r) {
    json j{{"status", to_string(r.status)},
           {"hc", r.hc},
           {"limiting_factor", limiting_text(r)},
           {"qos_breached_with_incident", r.qos_breached_with_incident},
           {"candidates_evaluated", r.candidates.size()}};
    if (const auto* at = r.at_hc(); at && at->qos) {
        j["qos_aggregated"] = at->qos->aggregated;
        j["qos_minimum"] = at->qos->minimum;
        j["qos_minimum_customer"] = at->qos->minimum_customer;
    }
    if (const auto* f = r.failing(); f && f->first_incident) {
        j["first_incident"] = {{"kind", to_string(f->first_incident->kind)},
                               {"step", f->first_incident->step},
                               {"element", f->first_incident->element},
                               {"magnitude", f->first_incident->magnitude}};
    }
    return j;
}

std::string hc_table(const std::vector<std::pair<std::string, const HcReport*>>& rows) {
    CsvWriter out({"scenario", "mode", "status", "hc", "limiting_factor", "qos_breached_with_incident"});
    for (const auto& [label, r] : rows) {
        out.cell(label).cell(to_string(r->mode)).cell(to_string(r->status)).cell(r->hc, 4).cell(limiting_text(*r));
        out.cell(r->qos_breached_with_incident ? "yes" : "no");
        out.end_row();
    }
    return out.str();
}

std::string customer_qos_table(const HcReport& r, const FeederModel& feeder) {
    CsvWriter out({"scenario", "hc_power_kw", "household", "node", "path_impedance_ohm", "e_baseline_kwh",
                   "e_network_aware_kwh", "qos"});
    for (const auto& c : r.candidates) {
        if (!c.qos) {
            continue;
        }
        for (const auto& q : c.qos->customers) {
            out.cell(r.scenario).cell(c.hc_power_kw, 4).cell(q.household).cell(q.node);
            out.cell(path_impedance_ohm(feeder, *feeder.find_household(q.household)), 6);
            out.cell(q.e_baseline_kwh, 6).cell(q.e_network_aware_kwh, 6).cell(q.qos, 6);
            out.end_row();
        }
    }
    return out.str();
}

// Real (uncontrolled) against network-aware power and voltage per household and step.
std::string profile_table(const std::string& label, const FeederModel& feeder, const SimulationTrace& real,
                          const SimulationTrace& na) {
    CsvWriter out({"scenario", "step", "hour", "household", "node", "real_kw", "network_aware_kw", "real_voltage_pu",
                   "network_aware_voltage_pu", "zone"});
    const auto& hh = feeder.households();
    std::vector<std::optional<std::size_t>> ev_of(hh.size());
    for (std::size_t e = 0; e < na.ev_household.size(); ++e) {
        ev_of[na.ev_household[e]] = e;
    }
    for (std::size_t t = 0; t < na.horizon.steps; ++t) {
        for (std::size_t h = 0; h < hh.size(); ++h) {
            const auto node = feeder.household_node(h);
            out.cell(label).cell(t).cell(static_cast<double>(t) * na.horizon.step_hours, 2).cell(hh[h].id);
            out.cell(feeder.nodes()[node].id);
            const auto e = ev_of[h];
            out.cell(e ? real.granted_kw[t][*e] : 0.0, 4).cell(e ? na.granted_kw[t][*e] : 0.0, 4);
            out.cell(real.steps[t].voltage_magnitude(node), 6).cell(na.steps[t].voltage_magnitude(node), 6);
            out.cell(e ? to_string(na.envelopes[t][*e].zone) : "");
            out.end_row();
        }
    }
    return out.str();
}

class ResultWriter {
public:
    explicit ResultWriter(fs::path dir) : dir_(std::move(dir)) {}

    void put(const std::string& name, std::string_view text) {
        files_[name] = std::string(text);
    }

    std::vector<std::string> flush() const {
        fs::create_directories(dir_);
        std::vector<std::string> names;
        for (const auto& [name, text] : files_) {
            write_text_file(dir_ / name, text);
            names.push_back(name);
        }
        return names;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [name, text] : files_) {
            out.push_back(name);
        }
        return out;
    }

private:
    fs::path dir_;
    std::map<std::string, std::string> files_;
};

}  // namespace

std::vector<std::string> run_scenario(const ScenarioFile& sc, unsigned workers) {
    const auto inputs = load_inputs(sc);
    SimulationSetup setup{inputs.feeder, inputs.baselines, sc.horizon, sc.powerflow, sc.baseline_power_factor};
    setup.validate();
    const auto& feeder = inputs.feeder;
    ResultWriter out(sc.resolve(sc.output_dir));
    json summary;
    summary["mode"] = to_string(sc.mode);
    summary["seed"] = sc.fleet.seed;

    for (const auto& f : inputs.fleets) {
        out.put("fleet_" + f.label + ".csv", write_fleet_csv(f.sessions));
    }

    try {
        if (sc.mode == RunMode::sweep_doe) {
            const auto cells =
                sensitivity_sweep(setup, inputs.fleets, sc.sweep.delta_perm, sc.sweep.factor, sc.search, workers);
            out.put("sweep_doe.csv", export_sweep(cells));
            summary["cells"] = cells.size();
        } else if (sc.mode == RunMode::sweep_qos_threshold) {
            const auto cells = threshold_sweep(setup, inputs.fleets, sc.sweep.qos_threshold, sc.search, workers);
            out.put("sweep_qos_threshold.csv", export_sweep(cells));
            summary["cells"] = cells.size();
        } else {
            const bool want_passive = sc.mode != RunMode::network_aware;
            const bool want_na = sc.mode != RunMode::passive;
            std::vector<Study> studies(inputs.fleets.size());
            // One job per (fleet, mode); each writes only its own slot.
            parallel_for(inputs.fleets.size() * 2, workers, [&](std::size_t i) {
                const auto& f = inputs.fleets[i / 2];
                if (i % 2 == 0 && want_passive) {
                    studies[i / 2].passive = passive_hc(setup, f.sessions, sc.search, f.label);
                } else if (i % 2 == 1 && want_na) {
                    studies[i / 2].network_aware = network_aware_hc(setup, f.sessions, sc.search, f.label);
                }
            });

            std::vector<std::pair<std::string, const HcReport*>> rows;
            CsvWriter table1({"scenario", "ev_hc_kw", "ev_hc_limiting_factor", "ev_nahc_kw", "ev_nahc_limiting_factor",
                              "improvement_pct", "qos_agg_at_nahc", "qos_min_at_nahc"});
            json results;
            for (std::size_t i = 0; i < inputs.fleets.size(); ++i) {
                const auto& label = inputs.fleets[i].label;
                const auto& sessions = inputs.fleets[i].sessions;
                const auto& st = studies[i];
                json entry;
                for (const auto* r : {st.passive ? &*st.passive : nullptr,
                                      st.network_aware ? &*st.network_aware : nullptr}) {
                    if (!r) {
                        continue;
                    }
                    const std::string mode = to_string(r->mode);
                    rows.emplace_back(label, r);
                    entry[mode] = report_json(*r);
                    out.put("candidates_" + mode + "_" + label + ".csv", export_candidates(*r));
                    const auto* fail = r->failing();
                    out.put("incidents_" + mode + "_" + label + ".csv",
                            export_incidents(fail ? std::span<const Incident>(fail->incidents)
                                                  : std::span<const Incident>()));
                }
                if (st.network_aware) {
                    const auto& na = *st.network_aware;
                    out.put("customer_qos_" + label + ".csv", customer_qos_table(na, feeder));
                    if (const auto* at = na.at_hc(); at && at->qos) {
                        out.put("qos_" + label + ".csv", export_qos(*at->qos));
                    }
                    // Traces at the network-aware hc (or the first candidate when none passed).
                    const double power = na.at_hc() ? na.at_hc()->hc_power_kw : na.candidates.front().hc_power_kw;
                    const auto count = na.at_hc() ? na.at_hc()->ev_count : na.candidates.front().ev_count;
                    const std::span<const EvSession> used = std::span<const EvSession>(sessions).first(count);
                    const auto real = simulate_uncontrolled(setup, used, power);
                    const auto controlled = network_aware_trajectory(setup, used, power, sc.search.doe);
                    out.put("profiles_" + label + ".csv", profile_table(label, feeder, real.trace, controlled.trace));
                    out.put("trace_ev_passive_" + label + ".csv", export_ev_powers(real.trace, feeder));
                    out.put("trace_ev_network_aware_" + label + ".csv", export_ev_powers(controlled.trace, feeder));
                    out.put("trace_voltages_passive_" + label + ".csv", export_voltages(real.trace, feeder));
                    out.put("trace_voltages_network_aware_" + label + ".csv",
                            export_voltages(controlled.trace, feeder));
                    out.put("trace_branches_network_aware_" + label + ".csv",
                            export_branch_loading(controlled.trace, feeder));
                    entry["trace_power_kw"] = power;
                }
                if (st.passive && st.network_aware) {
                    const auto& p = *st.passive;
                    const auto& n = *st.network_aware;
                    table1.cell(label).cell(p.hc, 4).cell(limiting_text(p)).cell(n.hc, 4).cell(limiting_text(n));
                    table1.cell(p.hc > 0.0 ? format_fixed(100.0 * (n.hc - p.hc) / p.hc, 2) : "");
                    const auto* at = n.at_hc();
                    table1.cell(at && at->qos ? format_fixed(at->qos->aggregated, 6) : "");
                    table1.cell(at && at->qos ? format_fixed(at->qos->minimum, 6) : "");
                    table1.end_row();
                }
                results[label] = entry;
            }
            out.put("hc_summary.csv", hc_table(rows));
            if (sc.mode == RunMode::compare) {
                out.put("table1.csv", table1.str());
            }
            summary["results"] = results;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const SimulationError&) {
        throw;
    } catch (const std::exception& e) {
        throw SimulationError(e.what());
    }

    out.put(std::string("summary_") + to_string(sc.mode) + ".json", summary.dump(2) + "\n");
    auto files = out.names();
    files.push_back("manifest.json");
    std::sort(files.begin(), files.end());
    json manifest{{"tool", "evhc"},
                  {"version", kVersion},
                  {"config_hash", hex64(config_hash(sc))},
                  {"seed", sc.fleet.seed},
                  {"mode", to_string(sc.mode)},
                  {"scenario", scenario_json(sc)},
                  {"files", files}};
    out.put("manifest.json", manifest.dump(2) + "\n");
    return out.flush();
}

namespace {

std::vector<fs::path> matching(const fs::path& dir, const std::string& prefix) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind(prefix, 0) == 0 && entry.path().extension() == ".csv") {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<std::string> emit_plot_data(const fs::path& results_dir) {
    if (!fs::is_directory(results_dir)) {
        throw ConfigError("results directory not found: " + results_dir.generic_string());
    }
    ResultWriter out(results_dir / "plots");

    if (fs::exists(results_dir / "sweep_doe.csv")) {
        const auto t = parse_csv(read_text_file(results_dir / "sweep_doe.csv"));
        CsvWriter w({"scenario", "delta_perm", "factor", "nahc_kw", "qos_agg", "limiting_factor"});
        for (const auto& r : t.rows) {
            w.cell(r[t.column("scenario")]).cell(r[t.column("delta_perm")]).cell(r[t.column("factor")]);
            w.cell(r[t.column("nahc")]).cell(r[t.column("qos_agg")]).cell(r[t.column("limiting_factor")]);
            w.end_row();
        }
        out.put("fig4_nahc_qos_vs_delta_perm.csv", w.str());
    }
    if (fs::exists(results_dir / "sweep_qos_threshold.csv")) {
        const auto t = parse_csv(read_text_file(results_dir / "sweep_qos_threshold.csv"));
        CsvWriter w({"scenario", "qos_threshold", "nahc_kw", "qos_agg", "qos_min", "limiting_factor"});
        for (const auto& r : t.rows) {
            w.cell(r[t.column("scenario")]).cell(r[t.column("qos_threshold")]).cell(r[t.column("nahc")]);
            w.cell(r[t.column("qos_agg")]).cell(r[t.column("qos_min")]).cell(r[t.column("limiting_factor")]);
            w.end_row();
        }
        out.put("fig5_nahc_vs_qos_threshold.csv", w.str());
    }
    const auto qos_files = matching(results_dir, "customer_qos_");
    if (!qos_files.empty()) {
        CsvWriter w({"scenario", "hc_power_kw", "household", "node", "path_impedance_ohm", "qos"});
        for (const auto& p : qos_files) {
            const auto t = parse_csv(read_text_file(p));
            for (const auto& r : t.rows) {
                w.cell(r[t.column("scenario")]).cell(r[t.column("hc_power_kw")]).cell(r[t.column("household")]);
                w.cell(r[t.column("node")]).cell(r[t.column("path_impedance_ohm")]).cell(r[t.column("qos")]);
                w.end_row();
            }
        }
        out.put("customer_qos_vs_power.csv", w.str());
    }
    const auto profile_files = matching(results_dir, "profiles_");
    if (!profile_files.empty()) {
        CsvWriter power({"scenario", "step", "hour", "household", "real_kw", "network_aware_kw"});
        CsvWriter voltage({"scenario", "step", "hour", "household", "real_voltage_pu", "network_aware_voltage_pu"});
        for (const auto& p : profile_files) {
            const auto t = parse_csv(read_text_file(p));
            for (const auto& r : t.rows) {
                for (auto* w : {&power, &voltage}) {
                    w->cell(r[t.column("scenario")]).cell(r[t.column("step")]).cell(r[t.column("hour")]);
                    w->cell(r[t.column("household")]);
                }
                power.cell(r[t.column("real_kw")]).cell(r[t.column("network_aware_kw")]);
                voltage.cell(r[t.column("real_voltage_pu")]).cell(r[t.column("network_aware_voltage_pu")]);
                power.end_row();
                voltage.end_row();
            }
        }
        out.put("fig6_ev_power_profiles.csv", power.str());
        out.put("fig7_voltage_profiles.csv", voltage.str());
    }
    if (out.names().empty()) {
        throw ConfigError("no upstream results in " + results_dir.generic_string() +
                          " (run a compare, network_aware or sweep study first)");
    }
    return out.flush();
}

std::vector<fs::path> write_example(const fs::path& dir) {
    const auto feeder = bundled::feeder();
    const auto baselines = bundled::baseline(feeder);
    auto sc = ScenarioFile::defaults();
    sc.feeder = "feeder.json";
    sc.baseline = "baseline.csv";
    sc.output_dir = "results";
    std::vector<fs::path> written{dir / "feeder.json", dir / "baseline.csv", dir / "scenario.json"};
    write_text_file(written[0], serialize_feeder(feeder));
    write_text_file(written[1], write_baseline_csv(baselines));
    write_text_file(written[2], scenario_to_json(sc));
    return written;
}

}  // namespace evhc
