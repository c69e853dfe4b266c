#pragma once

#include "evhc/feeder.hpp"
#include "evhc/trace.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evhc {

enum class IncidentKind {
    undervoltage,
    overvoltage,
    branch_thermal,
    transformer_overload,
    diagnostic,  // the power flow did not converge or collapsed
};

const char* to_string(IncidentKind kind);

/// Voltage band in pu; thermal and transformer limits come from the feeder.
struct IncidentLimits {
    double v_lower = 0.9;
    double v_upper = 1.1;

    void validate() const;
};

struct Incident {
    IncidentKind kind = IncidentKind::undervoltage;
    std::size_t step = 0;
    std::string element;
    double magnitude = 0.0;  // pu outside the band, or percent overload

    bool operator==(const Incident&) const = default;
};

/// Every limit crossing in the trace, ordered by step, then kind, then element.
///
/// Crossings are strict (a node at exactly v_lower is compliant). A step whose
/// power flow did not converge yields a single diagnostic incident and is not
/// otherwise inspected.
std::vector<Incident> detect(const SimulationTrace& trace, const FeederModel& feeder, const IncidentLimits& limits);

/// Incident that happens first in simulated time (see Horizon::origin_step).
std::optional<Incident> first_incident(std::span<const Incident> incidents, const Horizon& horizon);

std::string export_incidents(std::span<const Incident> incidents);

}  // namespace evhc
