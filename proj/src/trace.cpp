#include "evhc/trace.hpp"

#include "evhc/table.hpp"

#include <algorithm>
#include <cmath>

namespace evhc {

TraceSummary summarize(const SimulationTrace& trace, const FeederModel& feeder) {
    const auto n_nodes = feeder.nodes().size();
    const auto n_branches = feeder.branches().size();
    TraceSummary s;
    s.node_v_min.assign(n_nodes, 1.0);
    s.node_v_max.assign(n_nodes, 1.0);
    s.branch_max_loading.assign(n_branches, 0.0);
    s.ev_energy_kwh = trace.delivered_kwh;
    s.min_voltage_node = feeder.slack_index();

    bool first = true;
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const auto& sol = trace.steps[t];
        if (trace.flagged.size() > t && trace.flagged[t]) {
            ++s.flagged_steps;
        }
        if (sol.status == SolveStatus::voltage_collapse) {
            ++s.unsolved_steps;
            continue;
        }
        if (!sol.converged()) {
            ++s.unsolved_steps;
        }
        for (std::size_t n = 0; n < n_nodes; ++n) {
            const double v = sol.voltage_magnitude(n);
            s.node_v_min[n] = first ? v : std::min(s.node_v_min[n], v);
            s.node_v_max[n] = first ? v : std::max(s.node_v_max[n], v);
        }
        first = false;
        for (std::size_t b = 0; b < n_branches; ++b) {
            s.branch_max_loading[b] =
                std::max(s.branch_max_loading[b], sol.branch_current_a[b] / feeder.branches()[b].ampacity_a);
        }
        s.transformer_max_loading =
            std::max(s.transformer_max_loading, std::abs(sol.slack_power_kva) / feeder.transformer_kva());
    }
    for (std::size_t n = 0; n < n_nodes; ++n) {
        if (s.node_v_min[n] < s.min_voltage) {
            s.min_voltage = s.node_v_min[n];
            s.min_voltage_node = n;
        }
    }
    return s;
}

std::string export_voltages(const SimulationTrace& trace, const FeederModel& feeder) {
    CsvWriter out({"step", "node", "voltage_pu"});
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        for (std::size_t n = 0; n < feeder.nodes().size(); ++n) {
            out.cell(t).cell(feeder.nodes()[n].id).cell(trace.steps[t].voltage_magnitude(n), 6);
            out.end_row();
        }
    }
    return out.str();
}

std::string export_ev_powers(const SimulationTrace& trace, const FeederModel& feeder) {
    CsvWriter out({"step", "household", "node", "voltage_pu", "granted_kw", "zone", "p_min_kw", "p_upper_kw",
                   "p_desired_kw"});
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        for (std::size_t e = 0; e < trace.ev_count(); ++e) {
            const auto h = trace.ev_household[e];
            const auto node = feeder.household_node(h);
            out.cell(t).cell(feeder.households()[h].id).cell(feeder.nodes()[node].id);
            out.cell(trace.steps[t].voltage_magnitude(node), 6).cell(trace.granted_kw[t][e], 6);
            if (trace.controlled) {
                const auto& env = trace.envelopes[t][e];
                out.cell(to_string(env.zone)).cell(env.p_min, 6).cell(env.p_upper, 6).cell(env.p_desired, 6);
            } else {
                out.cell("none").cell("").cell("").cell("");
            }
            out.end_row();
        }
    }
    return out.str();
}

std::string export_branch_loading(const SimulationTrace& trace, const FeederModel& feeder) {
    CsvWriter out({"step", "branch", "current_a", "loading"});
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        for (std::size_t b = 0; b < feeder.branches().size(); ++b) {
            const double i = trace.steps[t].branch_current_a[b];
            out.cell(t).cell(feeder.branches()[b].id).cell(i, 4).cell(i / feeder.branches()[b].ampacity_a, 6);
            out.end_row();
        }
    }
    return out.str();
}

}  // namespace evhc
