#pragma once

#include "evhc/feeder.hpp"
#include "evhc/horizon.hpp"

namespace evhc::bundled {

/// Representative 19-node, 18-branch residential feeder behind a 100 kVA
/// transformer: a six-span trunk with two service cables per trunk node and
/// the 12 households at the ends of those cables. Impedances are
/// typical aluminium LV cable values, not measured data.
FeederModel feeder();

/// Synthetic winter weekday demand (kW) for every household of feeder():
/// low overnight, a morning bump and a pronounced evening peak.
BaselineProfiles baseline(const FeederModel& feeder, const Horizon& horizon = {});

}  // namespace evhc::bundled
