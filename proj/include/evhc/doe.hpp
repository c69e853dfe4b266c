#pragma once

#include <string_view>

namespace evhc {

/// Traffic-light region of the envelope.
enum class Zone { green, yellow, red };

const char* to_string(Zone zone);

/// Which voltage feeds the envelope of a step.
enum class VoltageSource {
    previous_step,  // last solved voltage (one-step measurement delay)
    fixed_point,    // iterate solve -> bound -> clamp within the step
};

const char* to_string(VoltageSource source);
VoltageSource parse_voltage_source(std::string_view text);

struct DoeParams {
    double delta_perm = 0.05;  // green zone starts at 1 - delta_perm
    double factor = 0.5;       // red-zone floor as a fraction of the rating
    double u_min = 0.9;        // red zone at or below this voltage
    VoltageSource voltage_source = VoltageSource::fixed_point;
    double fixed_point_tolerance_kw = 0.01;
    int fixed_point_max_iterations = 20;

    /// Upper edge of the ramp, 1 - delta_perm.
    double green_threshold() const { return 1.0 - delta_perm; }
    /// The ramp collapses to a step when the green threshold does not exceed u_min.
    bool degenerate() const { return green_threshold() <= u_min; }

    void validate() const;
};

/// Admissible charging interval for one EV at one step.
struct EnvelopeBound {
    double p_min = 0.0;
    double p_upper = 0.0;
    double p_max = 0.0;
    Zone zone = Zone::green;
    bool degenerate = false;
};

/// Red-zone floor: factor x p_max.
double p_min(double p_max, const DoeParams& params);

/// Envelope for local voltage `u_t` (pu).
///
/// The ramp rises from p_min at u_min to p_max at 1 - delta_perm, so the
/// bound is non-decreasing in voltage. With a degenerate band the bound is
/// p_max at or above u_min and p_min below it.
EnvelopeBound envelope_bound(double u_t, double p_max, const DoeParams& params);

/// Point of [min(p_min, p_desired), p_upper] nearest to `p_desired`.
///
/// The floor is relaxed to the desired power so that a nearly full vehicle
/// is never pushed past its remaining energy.
double clamp_power(double p_desired, const EnvelopeBound& bound);

}  // namespace evhc
