#pragma once

#include "evhc/doe.hpp"
#include "evhc/ev.hpp"
#include "evhc/feeder.hpp"
#include "evhc/powerflow.hpp"
#include "evhc/trace.hpp"

#include <span>
#include <vector>

namespace evhc {

/// Network, background demand and solver settings shared by every run.
/// Holds references; the caller keeps the feeder and profiles alive.
struct SimulationSetup {
    const FeederModel& feeder;
    const BaselineProfiles& baselines;
    Horizon horizon{};
    PowerFlowOptions powerflow{};
    double baseline_power_factor = 0.95;  // lagging; 1 disables baseline reactive power

    /// Checks profile coverage and lengths against the feeder and horizon.
    void validate() const;
};

struct RunResult {
    std::vector<ChargingTrajectory> trajectories;  // per session
    SimulationTrace trace;
};

/// Household injections for clock step `t` with EV demand `ev_kw` added at each session's household.
InjectionSet build_injections(const SimulationSetup& setup, std::span<const std::size_t> ev_household,
                              std::span<const double> ev_kw, std::size_t t);

/// Household index of every session; throws ConfigError for unknown households.
std::vector<std::size_t> session_households(const FeederModel& feeder, std::span<const EvSession> sessions);

/// Passive network: every session follows its baseline trajectory at `hc_power_kw`.
RunResult simulate_uncontrolled(const SimulationSetup& setup, std::span<const EvSession> sessions,
                                double hc_power_kw);

/// Envelope-controlled charging at rating `hc_power_kw`.
///
/// Each step, every connected EV asks for min(hc_power, rate that finishes its
/// request), receives an envelope from its own node voltage and is clamped
/// into it. Curtailed energy is carried forward while the car stays plugged
/// in. In fixed_point mode steps whose iteration does not settle keep the last
/// iterate and are flagged in the trace.
RunResult network_aware_trajectory(const SimulationSetup& setup, std::span<const EvSession> sessions,
                                   double hc_power_kw, const DoeParams& params);

}  // namespace evhc
