#include "evhc/powerflow.hpp"

#include "evhc/errors.hpp"
#include "evhc/table.hpp"

#include <algorithm>
#include <cmath>

namespace evhc {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::not_converged: return "not_converged";
        case SolveStatus::voltage_collapse: return "voltage_collapse";
    }
    return "unknown";
}

PowerFlowSolution solve(const FeederModel& feeder, const InjectionSet& injections, const PowerFlowOptions& options) {
    using cplx = std::complex<double>;
    const auto& households = feeder.households();
    if (injections.p_kw.size() != households.size() || injections.q_kvar.size() != households.size()) {
        throw SimulationError("injection set covers " + std::to_string(injections.p_kw.size()) +
                              " households, feeder has " + std::to_string(households.size()));
    }

    const auto n_nodes = feeder.nodes().size();
    const auto& order = feeder.topological_order();
    const double v_base = feeder.base_voltage_v();
    const double per_phase = 1000.0 / feeder.phases();

    std::vector<cplx> s_va(n_nodes, cplx{});
    for (std::size_t h = 0; h < households.size(); ++h) {
        s_va[feeder.household_node(h)] += cplx(injections.p_kw[h], injections.q_kvar[h]) * per_phase;
    }

    // Per node: parent node and the impedance of the branch towards it.
    std::vector<std::size_t> parent(n_nodes, feeder.slack_index());
    std::vector<cplx> z_up(n_nodes, cplx{});
    std::vector<std::size_t> branch_of(n_nodes, 0);
    for (std::size_t n = 0; n < n_nodes; ++n) {
        if (const auto b = feeder.parent_branch(n)) {
            const auto& br = feeder.branches()[*b];
            parent[n] = *feeder.parent_node(n);
            z_up[n] = cplx(br.r_ohm, br.x_ohm);
            branch_of[n] = *b;
        }
    }

    PowerFlowSolution sol;
    std::vector<cplx> v(n_nodes, cplx(v_base, 0.0));
    std::vector<cplx> v_next(n_nodes);
    std::vector<cplx> i_up(n_nodes);  // current flowing from parent into node, per conductor
    sol.status = SolveStatus::not_converged;

    for (int it = 1; it <= options.max_iterations; ++it) {
        // Backward sweep: accumulate load currents towards the root.
        for (std::size_t n = 0; n < n_nodes; ++n) {
            i_up[n] = std::conj(s_va[n] / v[n]);
        }
        for (auto k = order.size(); k-- > 1;) {
            const auto n = order[k];
            i_up[parent[n]] += i_up[n];
        }
        // Forward sweep: propagate voltage drops from the slack.
        v_next[feeder.slack_index()] = cplx(v_base, 0.0);
        for (std::size_t k = 1; k < order.size(); ++k) {
            const auto n = order[k];
            v_next[n] = v_next[parent[n]] - z_up[n] * i_up[n];
        }

        double residual = 0.0;
        double v_min = 1.0;
        for (std::size_t n = 0; n < n_nodes; ++n) {
            residual = std::max(residual, std::abs(v_next[n] - v[n]) / v_base);
            v_min = std::min(v_min, std::abs(v_next[n]) / v_base);
        }
        v.swap(v_next);
        sol.iterations = it;
        sol.residual_pu = residual;

        if (!(v_min >= options.collapse_floor_pu)) {
            sol.status = SolveStatus::voltage_collapse;
            sol.diagnostic = "voltage collapse: minimum " + format_fixed(v_min, 4) + " pu below floor " +
                             format_fixed(options.collapse_floor_pu, 4) + " pu at iteration " + std::to_string(it);
            break;
        }
        if (residual <= options.tolerance_pu) {
            sol.status = SolveStatus::converged;
            break;
        }
    }
    if (sol.status == SolveStatus::not_converged) {
        sol.diagnostic = "no convergence after " + std::to_string(sol.iterations) + " iterations, residual " +
                         std::to_string(sol.residual_pu) + " pu";
    }

    sol.voltage_pu.resize(n_nodes);
    for (std::size_t n = 0; n < n_nodes; ++n) {
        sol.voltage_pu[n] = v[n] / v_base;
    }
    sol.branch_current_a.assign(feeder.branches().size(), 0.0);
    cplx root_current{};
    double losses_w = 0.0;
    for (std::size_t n = 0; n < n_nodes; ++n) {
        if (n == feeder.slack_index()) {
            continue;
        }
        const double mag = std::abs(i_up[n]);
        sol.branch_current_a[branch_of[n]] = mag;
        losses_w += mag * mag * z_up[n].real();
        if (parent[n] == feeder.slack_index()) {
            root_current += i_up[n];
        }
    }
    root_current += std::conj(s_va[feeder.slack_index()] / cplx(v_base, 0.0));
    sol.slack_power_kva = cplx(v_base, 0.0) * std::conj(root_current) / per_phase;
    sol.losses_kw = losses_w / per_phase;
    return sol;
}

std::vector<PowerFlowSolution> solve_horizon(const FeederModel& feeder, std::span<const InjectionSet> steps,
                                             const PowerFlowOptions& options) {
    std::vector<PowerFlowSolution> out;
    out.reserve(steps.size());
    for (std::size_t t = 0; t < steps.size(); ++t) {
        try {
            out.push_back(solve(feeder, steps[t], options));
        } catch (const SimulationError& e) {
            throw SimulationError("step " + std::to_string(t) + ": " + e.what());
        }
    }
    return out;
}

std::string dump_solution(const FeederModel& feeder, const PowerFlowSolution& solution) {
    CsvWriter out({"kind", "element", "value", "unit"});
    for (std::size_t n = 0; n < feeder.nodes().size(); ++n) {
        out.cell("voltage").cell(feeder.nodes()[n].id).cell(solution.voltage_magnitude(n), 8).cell("pu");
        out.end_row();
    }
    for (std::size_t b = 0; b < feeder.branches().size(); ++b) {
        out.cell("current").cell(feeder.branches()[b].id).cell(solution.branch_current_a[b], 4).cell("A");
        out.end_row();
    }
    out.cell("slack_p").cell("slack").cell(solution.slack_power_kva.real(), 6).cell("kW");
    out.end_row();
    out.cell("slack_q").cell("slack").cell(solution.slack_power_kva.imag(), 6).cell("kvar");
    out.end_row();
    out.cell("status").cell(to_string(solution.status)).cell(static_cast<long long>(solution.iterations)).cell("iterations");
    out.end_row();
    return out.str();
}

}  // namespace evhc
