#pragma once

#include "evhc/bundled.hpp"
#include "evhc/feeder.hpp"
#include "evhc/simulate.hpp"

#include <string>
#include <vector>

namespace testutil {

// Slack plus one load bus; the household sits on the far end.
inline evhc::FeederModel two_bus(double r_ohm, double x_ohm, double ampacity = 1000.0, double kva = 1000.0) {
    return evhc::FeederModel("two-bus", {{"S", true, std::nullopt}, {"B", false, std::nullopt}},
                             {{"L1", "S", "B", r_ohm, x_ohm, ampacity}}, {{"H1", "B"}}, kva, 230.0, 3);
}

inline std::vector<std::string> household_ids(const evhc::FeederModel& f) {
    std::vector<std::string> ids;
    for (const auto& h : f.households()) {
        ids.push_back(h.id);
    }
    return ids;
}

inline evhc::BaselineProfiles flat_baseline(const evhc::FeederModel& f, double kw, std::size_t steps = 96) {
    evhc::BaselineProfiles out;
    for (const auto& h : f.households()) {
        out.push_back({h.id, std::vector<double>(steps, kw)});
    }
    return out;
}

// Bundled feeder and demand kept alive for SimulationSetup references.
struct Bundled {
    evhc::FeederModel feeder = evhc::bundled::feeder();
    evhc::BaselineProfiles baselines = evhc::bundled::baseline(feeder);
    evhc::SimulationSetup setup() const { return {feeder, baselines}; }
};

}  // namespace testutil
