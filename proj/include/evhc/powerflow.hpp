#pragma once

#include "evhc/feeder.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace evhc {

/// Household demand for one time step, indexed like feeder.households().
struct InjectionSet {
    std::vector<double> p_kw;
    std::vector<double> q_kvar;

    static InjectionSet zeros(std::size_t households) {
        return {std::vector<double>(households, 0.0), std::vector<double>(households, 0.0)};
    }
};

struct PowerFlowOptions {
    double tolerance_pu = 1e-8;
    int max_iterations = 50;
    double collapse_floor_pu = 0.5;
};

enum class SolveStatus { converged, not_converged, voltage_collapse };

const char* to_string(SolveStatus status);

struct PowerFlowSolution {
    SolveStatus status = SolveStatus::converged;
    std::vector<std::complex<double>> voltage_pu;  // per node
    std::vector<double> branch_current_a;          // per branch, magnitude per conductor
    std::complex<double> slack_power_kva;          // total over all phases
    double losses_kw = 0.0;                        // total I^2 R over all phases
    int iterations = 0;
    double residual_pu = 0.0;
    std::string diagnostic;

    bool converged() const { return status == SolveStatus::converged; }
    double voltage_magnitude(std::size_t node) const { return std::abs(voltage_pu[node]); }
};

/// Backward/forward sweep with constant-power loads; the slack is held at 1.0 pu.
///
/// Non-convergence is reported in the status, not thrown. When any node drops
/// below the collapse floor the sweep stops and the partial state is returned
/// with status voltage_collapse.
PowerFlowSolution solve(const FeederModel& feeder, const InjectionSet& injections,
                        const PowerFlowOptions& options = {});

/// Independent quasi-static solve per step.
std::vector<PowerFlowSolution> solve_horizon(const FeederModel& feeder, std::span<const InjectionSet> steps,
                                             const PowerFlowOptions& options = {});

/// Debug dump: one row per node then one per branch.
std::string dump_solution(const FeederModel& feeder, const PowerFlowSolution& solution);

}  // namespace evhc
