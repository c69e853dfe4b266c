#pragma once

#include <cstddef>

namespace evhc {

/// Daily simulation clock. Steps are clock-indexed (step 0 starts at 00:00);
/// the simulation visits them starting at `origin_step` so that overnight
/// sessions are processed from arrival to departure without a break.
struct Horizon {
    std::size_t steps = 96;
    double step_hours = 0.25;
    std::size_t origin_step = 48;  // 12:00

    /// Clock step visited at position `k` of the simulation.
    std::size_t at(std::size_t k) const { return (origin_step + k) % steps; }
    /// Position of clock step `t` in simulation order.
    std::size_t position(std::size_t t) const { return (t + steps - origin_step % steps) % steps; }

    void validate() const;
};

}  // namespace evhc
