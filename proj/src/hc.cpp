#include "evhc/hc.hpp"

#include "evhc/errors.hpp"
#include "evhc/parallel.hpp"
#include "evhc/table.hpp"

#include <cmath>

namespace evhc {

const char* to_string(HcMode mode) {
    switch (mode) {
        case HcMode::passive: return "passive";
        case HcMode::network_aware: return "network_aware";
    }
    return "unknown";
}

const char* to_string(SweepDimension dimension) {
    switch (dimension) {
        case SweepDimension::charging_power: return "charging_power";
        case SweepDimension::ev_count: return "ev_count";
    }
    return "unknown";
}

const char* to_string(LimitingFactor factor) {
    switch (factor) {
        case LimitingFactor::undervoltage: return "undervoltage";
        case LimitingFactor::overvoltage: return "overvoltage";
        case LimitingFactor::branch_thermal: return "branch_thermal";
        case LimitingFactor::transformer_overload: return "transformer_overload";
        case LimitingFactor::diagnostic: return "diagnostic";
        case LimitingFactor::aggregated_qos: return "aggregated_qos";
    }
    return "unknown";
}

const char* to_string(HcStatus status) {
    switch (status) {
        case HcStatus::within_range: return "within_range";
        case HcStatus::below_range: return "below_range";
        case HcStatus::unconstrained_in_range: return "unconstrained_in_range";
    }
    return "unknown";
}

LimitingFactor to_limiting_factor(IncidentKind kind) {
    switch (kind) {
        case IncidentKind::undervoltage: return LimitingFactor::undervoltage;
        case IncidentKind::overvoltage: return LimitingFactor::overvoltage;
        case IncidentKind::branch_thermal: return LimitingFactor::branch_thermal;
        case IncidentKind::transformer_overload: return LimitingFactor::transformer_overload;
        case IncidentKind::diagnostic: return LimitingFactor::diagnostic;
    }
    return LimitingFactor::diagnostic;
}

SweepDimension parse_sweep_dimension(std::string_view text) {
    if (text == "charging_power") return SweepDimension::charging_power;
    if (text == "ev_count") return SweepDimension::ev_count;
    throw ConfigError("unknown sweep dimension '" + std::string(text) + "' (expected charging_power or ev_count)");
}

std::vector<double> HcSearchConfig::default_power_grid() {
    std::vector<double> grid;
    for (int p = 1; p <= 20; ++p) {
        grid.push_back(p);
    }
    return grid;
}

void HcSearchConfig::validate() const {
    if (power_grid.empty()) {
        throw ConfigError("candidate grid is empty");
    }
    for (std::size_t i = 0; i < power_grid.size(); ++i) {
        if (!(power_grid[i] > 0.0)) {
            throw ConfigError("candidate grid values must be positive");
        }
        if (i > 0 && !(power_grid[i] > power_grid[i - 1])) {
            throw ConfigError("candidate grid must be strictly increasing");
        }
        if (dimension == SweepDimension::ev_count && power_grid[i] != std::floor(power_grid[i])) {
            throw ConfigError("EV-count grid values must be whole numbers");
        }
    }
    if (!(qos_threshold > 0.0 && qos_threshold <= 1.0)) {
        throw ConfigError("qos_threshold must lie in (0, 1], got " + format_shortest(qos_threshold));
    }
    if (!(ev_count_power_kw > 0.0)) {
        throw ConfigError("ev_count_power_kw must be positive");
    }
    doe.validate();
    limits.validate();
}

const CandidateResult* HcReport::at_hc() const {
    for (const auto& c : candidates) {
        if (c.passes() && c.value == hc) {
            return &c;
        }
    }
    return nullptr;
}

const CandidateResult* HcReport::failing() const {
    if (!candidates.empty() && !candidates.back().passes()) {
        return &candidates.back();
    }
    return nullptr;
}

CandidateResult evaluate_candidate(const SimulationSetup& setup, std::span<const EvSession> fleet,
                                   const HcSearchConfig& config, HcMode mode, double value) {
    CandidateResult c;
    c.value = value;
    std::span<const EvSession> sessions = fleet;
    if (config.dimension == SweepDimension::charging_power) {
        c.hc_power_kw = value;
    } else {
        c.hc_power_kw = config.ev_count_power_kw;
        const auto n = static_cast<std::size_t>(value);
        if (n > fleet.size()) {
            throw ConfigError("EV count " + std::to_string(n) + " exceeds the fleet size " +
                              std::to_string(fleet.size()));
        }
        sessions = fleet.first(n);
    }
    c.ev_count = sessions.size();

    const auto run = mode == HcMode::passive
                         ? simulate_uncontrolled(setup, sessions, c.hc_power_kw)
                         : network_aware_trajectory(setup, sessions, c.hc_power_kw, config.doe);
    c.incidents = detect(run.trace, setup.feeder, config.limits);
    c.first_incident = first_incident(c.incidents, setup.horizon);
    c.summary = summarize(run.trace, setup.feeder);

    if (mode == HcMode::network_aware) {
        std::vector<CustomerEnergy> energies;
        energies.reserve(sessions.size());
        for (std::size_t e = 0; e < sessions.size(); ++e) {
            const auto h = run.trace.ev_household[e];
            const double e_base = baseline_trajectory(sessions[e], c.hc_power_kw, setup.horizon).delivered_kwh;
            energies.push_back({setup.feeder.households()[h].id,
                                setup.feeder.nodes()[setup.feeder.household_node(h)].id,
                                {e_base, run.trajectories[e].delivered_kwh}});
        }
        bool any_energy = false;
        for (const auto& ce : energies) {
            any_energy = any_energy || ce.energy.baseline_kwh > 0.0;
        }
        if (any_energy) {
            c.qos = build_qos_report(energies);
            c.qos_breached = c.qos->aggregated < config.qos_threshold;
        }
    }
    return c;
}

std::optional<LimitingFactor> failure_reason(const CandidateResult& candidate) {
    if (candidate.first_incident) {
        return to_limiting_factor(candidate.first_incident->kind);
    }
    if (candidate.qos_breached) {
        return LimitingFactor::aggregated_qos;
    }
    return std::nullopt;
}

HcReport run_hc(const SimulationSetup& setup, std::span<const EvSession> fleet, const HcSearchConfig& config,
                HcMode mode, std::string scenario) {
    config.validate();
    setup.validate();
    HcReport report;
    report.mode = mode;
    report.dimension = config.dimension;
    report.scenario = std::move(scenario);

    for (const double value : config.power_grid) {
        report.candidates.push_back(evaluate_candidate(setup, fleet, config, mode, value));
        const auto& c = report.candidates.back();
        if (!c.passes()) {
            report.limiting_factor = failure_reason(c);
            report.qos_breached_with_incident = !c.incidents.empty() && c.qos_breached;
            break;
        }
    }

    const auto& last = report.candidates.back();
    if (last.passes()) {
        report.status = HcStatus::unconstrained_in_range;
        report.hc = last.value;
    } else if (report.candidates.size() == 1) {
        report.status = HcStatus::below_range;
        report.hc = 0.0;
    } else {
        report.status = HcStatus::within_range;
        report.hc = report.candidates[report.candidates.size() - 2].value;
    }
    return report;
}

HcReport passive_hc(const SimulationSetup& setup, std::span<const EvSession> fleet, const HcSearchConfig& config,
                    std::string scenario) {
    return run_hc(setup, fleet, config, HcMode::passive, std::move(scenario));
}

HcReport network_aware_hc(const SimulationSetup& setup, std::span<const EvSession> fleet,
                          const HcSearchConfig& config, std::string scenario) {
    return run_hc(setup, fleet, config, HcMode::network_aware, std::move(scenario));
}

namespace {

SweepCell fill_cell(SweepCell cell, const SimulationSetup& setup, const LabelledFleet& fleet,
                    const HcSearchConfig& config) {
    try {
        const auto report = network_aware_hc(setup, fleet.sessions, config, fleet.label);
        cell.status = report.status;
        cell.nahc = report.hc;
        cell.limiting_factor = report.limiting_factor;
        if (const auto* at = report.at_hc(); at && at->qos) {
            cell.qos_aggregated = at->qos->aggregated;
            cell.qos_minimum = at->qos->minimum;
        }
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

}  // namespace

std::vector<SweepCell> sensitivity_sweep(const SimulationSetup& setup, std::span<const LabelledFleet> fleets,
                                         std::span<const double> delta_perm_grid, std::span<const double> factor_set,
                                         const HcSearchConfig& base, unsigned workers) {
    if (fleets.empty() || delta_perm_grid.empty() || factor_set.empty()) {
        throw ConfigError("sensitivity sweep needs at least one scenario, delta_perm and factor");
    }
    struct Job {
        std::size_t fleet;
        double delta;
        double factor;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < fleets.size(); ++f) {
        for (const double factor : factor_set) {
            for (const double delta : delta_perm_grid) {
                jobs.push_back({f, delta, factor});
            }
        }
    }
    std::vector<SweepCell> cells(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        const auto& job = jobs[i];
        auto config = base;
        config.doe.delta_perm = job.delta;
        config.doe.factor = job.factor;
        SweepCell cell;
        cell.scenario = fleets[job.fleet].label;
        cell.delta_perm = job.delta;
        cell.factor = job.factor;
        cell.qos_threshold = config.qos_threshold;
        cells[i] = fill_cell(std::move(cell), setup, fleets[job.fleet], config);
    });
    return cells;
}

std::vector<SweepCell> threshold_sweep(const SimulationSetup& setup, std::span<const LabelledFleet> fleets,
                                       std::span<const double> thresholds, const HcSearchConfig& base,
                                       unsigned workers) {
    if (fleets.empty() || thresholds.empty()) {
        throw ConfigError("threshold sweep needs at least one scenario and threshold");
    }
    std::vector<std::pair<std::size_t, double>> jobs;
    for (std::size_t f = 0; f < fleets.size(); ++f) {
        for (const double q : thresholds) {
            jobs.emplace_back(f, q);
        }
    }
    std::vector<SweepCell> cells(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        auto config = base;
        config.qos_threshold = jobs[i].second;
        SweepCell cell;
        cell.scenario = fleets[jobs[i].first].label;
        cell.delta_perm = config.doe.delta_perm;
        cell.factor = config.doe.factor;
        cell.qos_threshold = config.qos_threshold;
        cells[i] = fill_cell(std::move(cell), setup, fleets[jobs[i].first], config);
    });
    return cells;
}

std::string export_sweep(std::span<const SweepCell> cells) {
    CsvWriter out({"scenario", "delta_perm", "factor", "qos_threshold", "nahc", "status", "limiting_factor",
                   "qos_agg", "qos_min", "error"});
    for (const auto& c : cells) {
        out.cell(c.scenario).cell(c.delta_perm, 4).cell(c.factor, 4).cell(c.qos_threshold, 4).cell(c.nahc, 4);
        out.cell(to_string(c.status)).cell(c.limiting_factor ? to_string(*c.limiting_factor) : "none");
        out.cell(c.qos_aggregated ? format_fixed(*c.qos_aggregated, 6) : "");
        out.cell(c.qos_minimum ? format_fixed(*c.qos_minimum, 6) : "");
        std::string err = c.error;
        for (auto& ch : err) {
            if (ch == ',' || ch == '\n') {
                ch = ';';
            }
        }
        out.cell(err);
        out.end_row();
    }
    return out.str();
}

std::string export_candidates(const HcReport& report) {
    CsvWriter out({"scenario", "mode", "value", "hc_power_kw", "ev_count", "incidents", "first_incident", "qos_agg",
                   "qos_min", "min_voltage_pu", "passes"});
    for (const auto& c : report.candidates) {
        out.cell(report.scenario).cell(to_string(report.mode)).cell(c.value, 4).cell(c.hc_power_kw, 4).cell(c.ev_count);
        out.cell(c.incidents.size());
        out.cell(c.first_incident ? to_string(c.first_incident->kind) : "none");
        out.cell(c.qos ? format_fixed(c.qos->aggregated, 6) : "").cell(c.qos ? format_fixed(c.qos->minimum, 6) : "");
        out.cell(c.summary.min_voltage, 6).cell(c.passes() ? "yes" : "no");
        out.end_row();
    }
    return out.str();
}

}  // namespace evhc
