#pragma once

#include "evhc/doe.hpp"
#include "evhc/feeder.hpp"
#include "evhc/horizon.hpp"
#include "evhc/powerflow.hpp"

#include <string>
#include <vector>

namespace evhc {

/// Envelope evaluated for one EV at one step.
struct EnvelopeRecord {
    double u_t = 1.0;
    double p_min = 0.0;
    double p_upper = 0.0;
    double p_desired = 0.0;
    Zone zone = Zone::green;
};

/// Full record of one simulated day. Per-step vectors are clock-indexed.
struct SimulationTrace {
    Horizon horizon;
    bool controlled = false;                          // envelopes active
    std::vector<std::size_t> ev_household;            // household index per EV
    std::vector<PowerFlowSolution> steps;             // [step]
    std::vector<std::vector<double>> granted_kw;      // [step][ev]
    std::vector<std::vector<EnvelopeRecord>> envelopes;  // [step][ev], empty when uncontrolled
    std::vector<double> delivered_kwh;                // [ev], summed in simulation order
    std::vector<bool> flagged;                        // [step] fixed point did not settle
    std::vector<int> fixed_point_iterations;          // [step], 0 when not applicable

    std::size_t ev_count() const { return ev_household.size(); }
};

struct TraceSummary {
    std::vector<double> node_v_min;           // pu
    std::vector<double> node_v_max;           // pu
    std::vector<double> branch_max_loading;   // current / ampacity
    double transformer_max_loading = 0.0;     // |S| / rating
    std::vector<double> ev_energy_kwh;
    double min_voltage = 1.0;
    std::size_t min_voltage_node = 0;
    std::size_t flagged_steps = 0;
    std::size_t unsolved_steps = 0;
};

TraceSummary summarize(const SimulationTrace& trace, const FeederModel& feeder);

/// One row per (step, node): voltage magnitude.
std::string export_voltages(const SimulationTrace& trace, const FeederModel& feeder);
/// One row per (step, EV): household, node, voltage, granted power and, when
/// controlled, the envelope (zone, p_min, p_upper, p_desired).
std::string export_ev_powers(const SimulationTrace& trace, const FeederModel& feeder);
/// One row per (step, branch): current and loading.
std::string export_branch_loading(const SimulationTrace& trace, const FeederModel& feeder);

}  // namespace evhc
