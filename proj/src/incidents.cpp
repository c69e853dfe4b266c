#include "evhc/incidents.hpp"

#include "evhc/errors.hpp"
#include "evhc/table.hpp"

#include <cmath>

namespace evhc {

const char* to_string(IncidentKind kind) {
    switch (kind) {
        case IncidentKind::undervoltage: return "undervoltage";
        case IncidentKind::overvoltage: return "overvoltage";
        case IncidentKind::branch_thermal: return "branch_thermal";
        case IncidentKind::transformer_overload: return "transformer_overload";
        case IncidentKind::diagnostic: return "diagnostic";
    }
    return "unknown";
}

void IncidentLimits::validate() const {
    if (!(v_lower < 1.0 && 1.0 < v_upper && v_lower > 0.0)) {
        throw ConfigError("voltage limits must satisfy 0 < v_lower < 1 < v_upper");
    }
}

std::vector<Incident> detect(const SimulationTrace& trace, const FeederModel& feeder, const IncidentLimits& limits) {
    std::vector<Incident> out;
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const auto& sol = trace.steps[t];
        if (!sol.converged()) {
            out.push_back({IncidentKind::diagnostic, t, feeder.nodes()[feeder.slack_index()].id,
                           sol.residual_pu > 0.0 ? sol.residual_pu : 1.0});
            continue;
        }
        for (std::size_t n = 0; n < feeder.nodes().size(); ++n) {
            const double v = sol.voltage_magnitude(n);
            if (v < limits.v_lower) {
                out.push_back({IncidentKind::undervoltage, t, feeder.nodes()[n].id, limits.v_lower - v});
            }
        }
        for (std::size_t n = 0; n < feeder.nodes().size(); ++n) {
            const double v = sol.voltage_magnitude(n);
            if (v > limits.v_upper) {
                out.push_back({IncidentKind::overvoltage, t, feeder.nodes()[n].id, v - limits.v_upper});
            }
        }
        for (std::size_t b = 0; b < feeder.branches().size(); ++b) {
            const auto& br = feeder.branches()[b];
            if (sol.branch_current_a[b] > br.ampacity_a) {
                out.push_back({IncidentKind::branch_thermal, t, br.id,
                               100.0 * (sol.branch_current_a[b] / br.ampacity_a - 1.0)});
            }
        }
        const double s = std::abs(sol.slack_power_kva);
        if (s > feeder.transformer_kva()) {
            out.push_back({IncidentKind::transformer_overload, t, feeder.nodes()[feeder.slack_index()].id,
                           100.0 * (s / feeder.transformer_kva() - 1.0)});
        }
    }
    return out;
}

std::optional<Incident> first_incident(std::span<const Incident> incidents, const Horizon& horizon) {
    std::optional<Incident> best;
    for (const auto& i : incidents) {
        if (!best || horizon.position(i.step) < horizon.position(best->step)) {
            best = i;
        }
    }
    return best;
}

std::string export_incidents(std::span<const Incident> incidents) {
    CsvWriter out({"step", "kind", "element", "magnitude"});
    for (const auto& i : incidents) {
        out.cell(i.step).cell(to_string(i.kind)).cell(i.element).cell(i.magnitude, 6);
        out.end_row();
    }
    return out.str();
}

}  // namespace evhc
