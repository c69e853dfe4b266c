#include "evhc/simulate.hpp"

#include "evhc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evhc {

namespace {

SimulationTrace empty_trace(const SimulationSetup& setup, std::vector<std::size_t> ev_household, bool controlled) {
    SimulationTrace trace;
    trace.horizon = setup.horizon;
    trace.controlled = controlled;
    const auto steps = setup.horizon.steps;
    const auto n = ev_household.size();
    trace.ev_household = std::move(ev_household);
    trace.steps.resize(steps);
    trace.granted_kw.assign(steps, std::vector<double>(n, 0.0));
    if (controlled) {
        trace.envelopes.assign(steps, std::vector<EnvelopeRecord>(n));
    }
    trace.delivered_kwh.assign(n, 0.0);
    trace.flagged.assign(steps, false);
    trace.fixed_point_iterations.assign(steps, 0);
    return trace;
}

PowerFlowSolution solve_step(const SimulationSetup& setup, std::span<const std::size_t> ev_household,
                             std::span<const double> ev_kw, std::size_t t) {
    try {
        return solve(setup.feeder, build_injections(setup, ev_household, ev_kw, t), setup.powerflow);
    } catch (const SimulationError& e) {
        throw SimulationError("step " + std::to_string(t) + ": " + e.what());
    }
}

}  // namespace

void SimulationSetup::validate() const {
    horizon.validate();
    const auto& hh = feeder.households();
    if (baselines.size() != hh.size()) {
        throw ConfigError("baseline profiles cover " + std::to_string(baselines.size()) + " households, feeder has " +
                          std::to_string(hh.size()));
    }
    for (std::size_t h = 0; h < hh.size(); ++h) {
        if (baselines[h].household != hh[h].id) {
            throw ConfigError("baseline profile #" + std::to_string(h) + " is for '" + baselines[h].household +
                              "', expected '" + hh[h].id + "'");
        }
        if (baselines[h].power_kw.size() != horizon.steps) {
            throw ConfigError("baseline profile of '" + hh[h].id + "' has " +
                              std::to_string(baselines[h].power_kw.size()) + " steps, expected " +
                              std::to_string(horizon.steps));
        }
    }
    if (!(baseline_power_factor > 0.0 && baseline_power_factor <= 1.0)) {
        throw ConfigError("baseline power factor must lie in (0, 1]");
    }
}

InjectionSet build_injections(const SimulationSetup& setup, std::span<const std::size_t> ev_household,
                              std::span<const double> ev_kw, std::size_t t) {
    const auto n = setup.feeder.households().size();
    const double tan_phi = std::tan(std::acos(setup.baseline_power_factor));
    InjectionSet inj = InjectionSet::zeros(n);
    for (std::size_t h = 0; h < n; ++h) {
        const double p = setup.baselines[h].power_kw[t];
        inj.p_kw[h] = p;
        inj.q_kvar[h] = p * tan_phi;
    }
    for (std::size_t e = 0; e < ev_household.size(); ++e) {
        inj.p_kw[ev_household[e]] += ev_kw[e];
    }
    return inj;
}

std::vector<std::size_t> session_households(const FeederModel& feeder, std::span<const EvSession> sessions) {
    std::vector<std::size_t> out;
    out.reserve(sessions.size());
    for (const auto& s : sessions) {
        const auto h = feeder.find_household(s.household);
        if (!h) {
            throw ConfigError("session references unknown household '" + s.household + "'");
        }
        out.push_back(*h);
    }
    return out;
}

RunResult simulate_uncontrolled(const SimulationSetup& setup, std::span<const EvSession> sessions,
                                double hc_power_kw) {
    setup.validate();
    const auto& h = setup.horizon;
    RunResult run;
    run.trace = empty_trace(setup, session_households(setup.feeder, sessions), false);
    run.trajectories.reserve(sessions.size());
    for (const auto& s : sessions) {
        run.trajectories.push_back(baseline_trajectory(s, hc_power_kw, h));
    }
    std::vector<double> ev_kw(sessions.size());
    for (std::size_t t = 0; t < h.steps; ++t) {
        for (std::size_t e = 0; e < sessions.size(); ++e) {
            ev_kw[e] = run.trajectories[e].power_kw[t];
        }
        run.trace.granted_kw[t] = ev_kw;
        run.trace.steps[t] = solve_step(setup, run.trace.ev_household, ev_kw, t);
    }
    for (std::size_t e = 0; e < sessions.size(); ++e) {
        run.trace.delivered_kwh[e] = run.trajectories[e].delivered_kwh;
    }
    return run;
}

RunResult network_aware_trajectory(const SimulationSetup& setup, std::span<const EvSession> sessions,
                                   double hc_power_kw, const DoeParams& params) {
    setup.validate();
    params.validate();
    if (!(hc_power_kw > 0.0)) {
        throw ConfigError("charging power must be positive");
    }
    const auto& h = setup.horizon;
    const auto n_ev = sessions.size();
    RunResult run;
    run.trace = empty_trace(setup, session_households(setup.feeder, sessions), true);
    auto& trace = run.trace;
    run.trajectories.assign(n_ev, ChargingTrajectory{std::vector<double>(h.steps, 0.0), 0.0});

    std::vector<std::size_t> ev_node(n_ev);
    for (std::size_t e = 0; e < n_ev; ++e) {
        ev_node[e] = setup.feeder.household_node(trace.ev_household[e]);
    }

    std::vector<double> desired(n_ev), granted(n_ev), next(n_ev);
    std::vector<EnvelopeRecord> env(n_ev);
    auto evaluate_envelopes = [&](const PowerFlowSolution& sol) {
        for (std::size_t e = 0; e < n_ev; ++e) {
            const double u = sol.voltage_magnitude(ev_node[e]);
            const auto b = envelope_bound(u, hc_power_kw, params);
            env[e] = EnvelopeRecord{u, b.p_min, b.p_upper, desired[e], b.zone};
            next[e] = clamp_power(desired[e], b);
        }
    };

    PowerFlowSolution measured;  // previous_step mode: last solved state
    for (std::size_t k = 0; k < h.steps; ++k) {
        const auto t = h.at(k);
        for (std::size_t e = 0; e < n_ev; ++e) {
            desired[e] = sessions[e].connected(t, h)
                             ? desired_power_kw(sessions[e], run.trajectories[e].delivered_kwh, hc_power_kw, h)
                             : 0.0;
        }

        PowerFlowSolution sol;
        if (params.voltage_source == VoltageSource::previous_step) {
            if (k == 0) {
                // No earlier measurement: use the background-load state of this step.
                const std::vector<double> idle(n_ev, 0.0);
                measured = solve_step(setup, trace.ev_household, idle, t);
            }
            evaluate_envelopes(measured);
            granted = next;
            sol = solve_step(setup, trace.ev_household, granted, t);
        } else {
            granted = desired;
            bool settled = false;
            int it = 0;
            double relax = 1.0;
            double last_change = std::numeric_limits<double>::infinity();
            while (it < params.fixed_point_max_iterations) {
                ++it;
                sol = solve_step(setup, trace.ev_household, granted, t);
                evaluate_envelopes(sol);
                double change = 0.0;
                for (std::size_t e = 0; e < n_ev; ++e) {
                    change = std::max(change, std::abs(next[e] - granted[e]));
                }
                if (change < params.fixed_point_tolerance_kw) {
                    settled = true;
                    if (change > 0.0) {
                        granted.swap(next);
                        sol = solve_step(setup, trace.ev_household, granted, t);
                    }
                    break;
                }
                // A steep ramp on a weak feeder makes the plain iteration oscillate; halve the step when it stalls.
                if (change > 0.9 * last_change) {
                    relax *= 0.5;
                }
                last_change = change;
                for (std::size_t e = 0; e < n_ev; ++e) {
                    granted[e] += relax * (next[e] - granted[e]);
                }
            }
            if (!settled) {
                // Take the lower of the last iterate and its clamp: still inside the recorded
                // envelope, and it does not jump to the far side of a step-shaped bound.
                sol = solve_step(setup, trace.ev_household, granted, t);
                evaluate_envelopes(sol);
                for (std::size_t e = 0; e < n_ev; ++e) {
                    granted[e] = std::min(granted[e], next[e]);
                }
                sol = solve_step(setup, trace.ev_household, granted, t);
                trace.flagged[t] = true;
            }
            trace.fixed_point_iterations[t] = it;
        }

        for (std::size_t e = 0; e < n_ev; ++e) {
            run.trajectories[e].power_kw[t] = granted[e];
            run.trajectories[e].delivered_kwh += granted[e] * h.step_hours;
        }
        trace.granted_kw[t] = granted;
        trace.envelopes[t] = env;
        trace.steps[t] = std::move(sol);
        if (params.voltage_source == VoltageSource::previous_step) {
            measured = trace.steps[t];
        }
    }
    for (std::size_t e = 0; e < n_ev; ++e) {
        trace.delivered_kwh[e] = run.trajectories[e].delivered_kwh;
    }
    return run;
}

}  // namespace evhc
