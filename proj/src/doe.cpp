#include "evhc/doe.hpp"

#include "evhc/errors.hpp"
#include "evhc/table.hpp"

#include <algorithm>
#include <string>

namespace evhc {

const char* to_string(Zone zone) {
    switch (zone) {
        case Zone::green: return "green";
        case Zone::yellow: return "yellow";
        case Zone::red: return "red";
    }
    return "unknown";
}

const char* to_string(VoltageSource source) {
    switch (source) {
        case VoltageSource::previous_step: return "previous_step";
        case VoltageSource::fixed_point: return "fixed_point";
    }
    return "unknown";
}

VoltageSource parse_voltage_source(std::string_view text) {
    if (text == "previous_step") return VoltageSource::previous_step;
    if (text == "fixed_point") return VoltageSource::fixed_point;
    throw ConfigError("unknown voltage source '" + std::string(text) + "' (expected previous_step or fixed_point)");
}

void DoeParams::validate() const {
    if (!(delta_perm >= 0.0 && delta_perm <= 1.0)) {
        throw ConfigError("delta_perm must lie in [0, 1], got " + format_shortest(delta_perm));
    }
    if (!(factor >= 0.0 && factor <= 1.0)) {
        throw ConfigError("factor must lie in [0, 1], got " + format_shortest(factor));
    }
    if (!(u_min > 0.0 && u_min < 1.0)) {
        throw ConfigError("u_min must lie in (0, 1), got " + format_shortest(u_min));
    }
    if (!(fixed_point_tolerance_kw > 0.0) || fixed_point_max_iterations < 1) {
        throw ConfigError("fixed-point tolerance and iteration cap must be positive");
    }
}

double p_min(double p_max, const DoeParams& params) { return params.factor * p_max; }

EnvelopeBound envelope_bound(double u_t, double p_max, const DoeParams& params) {
    EnvelopeBound b;
    b.p_max = p_max;
    b.p_min = p_min(p_max, params);
    b.degenerate = params.degenerate();

    if (b.degenerate) {
        const bool ok = u_t >= params.u_min;
        b.zone = ok ? Zone::green : Zone::red;
        b.p_upper = ok ? p_max : b.p_min;
        return b;
    }
    const double top = params.green_threshold();
    if (u_t >= top) {
        b.zone = Zone::green;
        b.p_upper = p_max;
    } else if (u_t <= params.u_min) {
        b.zone = Zone::red;
        b.p_upper = b.p_min;
    } else {
        b.zone = Zone::yellow;
        b.p_upper = b.p_min + (p_max - b.p_min) * (u_t - params.u_min) / (top - params.u_min);
    }
    return b;
}

double clamp_power(double p_desired, const EnvelopeBound& bound) {
    const double floor = std::min(bound.p_min, p_desired);
    return std::clamp(p_desired, floor, std::max(floor, bound.p_upper));
}

}  // namespace evhc
