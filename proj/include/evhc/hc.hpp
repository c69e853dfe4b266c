#pragma once

#include "evhc/doe.hpp"
#include "evhc/ev.hpp"
#include "evhc/incidents.hpp"
#include "evhc/qos.hpp"
#include "evhc/simulate.hpp"
#include "evhc/trace.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evhc {

enum class HcMode { passive, network_aware };

/// What the candidate grid enumerates.
enum class SweepDimension {
    charging_power,  // per-EV charging power (kW), every household has an EV
    ev_count,        // number of EVs (fleet order) charging at a fixed power
};

enum class LimitingFactor {
    undervoltage,
    overvoltage,
    branch_thermal,
    transformer_overload,
    diagnostic,
    aggregated_qos,
};

enum class HcStatus {
    within_range,            // some candidate failed; hc is the one before it
    below_range,             // the first candidate already failed
    unconstrained_in_range,  // no candidate failed
};

const char* to_string(HcMode mode);
const char* to_string(SweepDimension dimension);
const char* to_string(LimitingFactor factor);
const char* to_string(HcStatus status);
LimitingFactor to_limiting_factor(IncidentKind kind);
SweepDimension parse_sweep_dimension(std::string_view text);

struct HcSearchConfig {
    std::vector<double> power_grid = default_power_grid();
    double qos_threshold = 0.8;
    DoeParams doe{};
    IncidentLimits limits{};
    SweepDimension dimension = SweepDimension::charging_power;
    double ev_count_power_kw = 11.0;

    void validate() const;
    /// 1, 2, ..., 20 kW.
    static std::vector<double> default_power_grid();
};

struct CandidateResult {
    double value = 0.0;        // grid value (kW or EV count)
    double hc_power_kw = 0.0;  // charging power actually simulated
    std::size_t ev_count = 0;
    std::vector<Incident> incidents;
    std::optional<Incident> first_incident;  // earliest in simulated time
    std::optional<QosReport> qos;  // network-aware candidates only
    bool qos_breached = false;
    TraceSummary summary;

    bool passes() const { return incidents.empty() && !qos_breached; }
};

struct HcReport {
    HcMode mode = HcMode::passive;
    SweepDimension dimension = SweepDimension::charging_power;
    std::string scenario;
    HcStatus status = HcStatus::unconstrained_in_range;
    double hc = 0.0;  // 0 when below range
    std::optional<LimitingFactor> limiting_factor;
    bool qos_breached_with_incident = false;  // tie at the failing candidate
    std::vector<CandidateResult> candidates;  // evaluated, in grid order

    /// Candidate at the reported hc, if one passed.
    const CandidateResult* at_hc() const;
    /// Candidate that terminated the search, if any.
    const CandidateResult* failing() const;
};

/// Simulates one grid value independently of every other candidate.
CandidateResult evaluate_candidate(const SimulationSetup& setup, std::span<const EvSession> fleet,
                                   const HcSearchConfig& config, HcMode mode, double value);

/// Why a candidate fails: the first incident in simulated time wins over a QoS breach.
std::optional<LimitingFactor> failure_reason(const CandidateResult& candidate);

/// Raises the charging power of all users until the first network incident.
HcReport passive_hc(const SimulationSetup& setup, std::span<const EvSession> fleet, const HcSearchConfig& config,
                    std::string scenario = {});

/// Largest candidate under envelope control with no incident and aggregated QoS >= threshold.
HcReport network_aware_hc(const SimulationSetup& setup, std::span<const EvSession> fleet,
                          const HcSearchConfig& config, std::string scenario = {});

HcReport run_hc(const SimulationSetup& setup, std::span<const EvSession> fleet, const HcSearchConfig& config,
                HcMode mode, std::string scenario = {});

struct LabelledFleet {
    std::string label;
    std::vector<EvSession> sessions;
};

/// One row of a DOE-parameter or QoS-threshold sweep.
struct SweepCell {
    std::string scenario;
    double delta_perm = 0.0;
    double factor = 0.0;
    double qos_threshold = 0.0;
    HcStatus status = HcStatus::unconstrained_in_range;
    double nahc = 0.0;
    std::optional<LimitingFactor> limiting_factor;
    std::optional<double> qos_aggregated;  // at nahc
    std::optional<double> qos_minimum;     // at nahc
    std::string error;                     // non-empty when the cell failed
};

/// Network-aware hc for every (scenario, delta_perm, factor); cell errors are recorded, not thrown.
std::vector<SweepCell> sensitivity_sweep(const SimulationSetup& setup, std::span<const LabelledFleet> fleets,
                                         std::span<const double> delta_perm_grid, std::span<const double> factor_set,
                                         const HcSearchConfig& base, unsigned workers = 1);

/// Network-aware hc for every (scenario, qos threshold) at the base DOE parameters.
std::vector<SweepCell> threshold_sweep(const SimulationSetup& setup, std::span<const LabelledFleet> fleets,
                                       std::span<const double> thresholds, const HcSearchConfig& base,
                                       unsigned workers = 1);

std::string export_sweep(std::span<const SweepCell> cells);
/// Grid value, incidents, QoS and pass flag for every evaluated candidate.
std::string export_candidates(const HcReport& report);

}  // namespace evhc
