#include "evhc/ev.hpp"

#include "evhc/errors.hpp"
#include "evhc/table.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace evhc {

namespace {

constexpr double kEnergyEpsilonKwh = 1e-9;
constexpr int kMaxResamples = 1000;

// The standard distributions are implementation-defined; draw from the engine
// bits directly so fleets are identical across standard libraries.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Normal truncated to mean +- 3 sd by rejection.
    double truncated_normal(double mean, double sd) {
        if (sd <= 0.0) {
            return mean;
        }
        while (true) {
            const double z = normal();
            if (std::abs(z) <= 3.0) {
                return mean + sd * z;
            }
        }
    }

private:
    std::mt19937_64 engine_;
};

std::size_t clock_step(double hours, const Horizon& h) {
    const auto steps = static_cast<long long>(h.steps);
    auto s = static_cast<long long>(std::llround(hours / h.step_hours));
    s %= steps;
    if (s < 0) {
        s += steps;
    }
    return static_cast<std::size_t>(s);
}

}  // namespace

void Horizon::validate() const {
    if (steps == 0 || !(step_hours > 0.0)) {
        throw ConfigError("horizon needs a positive step count and step duration");
    }
    if (std::abs(static_cast<double>(steps) * step_hours - 24.0) > 1e-9) {
        throw ConfigError("horizon must span 24 h, got " + std::to_string(steps) + " x " +
                          format_fixed(step_hours, 4) + " h");
    }
    if (origin_step >= steps) {
        throw ConfigError("horizon origin step out of range");
    }
}

void EvSession::validate(const Horizon& h) const {
    const auto where = "session of household '" + household + "'";
    if (arrival_step >= h.steps) {
        throw ConfigError(where + ": arrival step " + std::to_string(arrival_step) + " outside the horizon");
    }
    if (departure_step <= arrival_step || departure_step > arrival_step + h.steps) {
        throw ConfigError(where + ": departure step must lie in (arrival, arrival + " + std::to_string(h.steps) + "]");
    }
    if (!(requested_kwh > 0.0)) {
        throw ConfigError(where + ": requested energy must be positive");
    }
    if (!(rated_kw > 0.0)) {
        throw ConfigError(where + ": rated power must be positive");
    }
    if (requested_kwh > rated_kw * duration_hours(h) + 1e-9) {
        throw ConfigError(where + ": " + format_fixed(requested_kwh, 3) + " kWh cannot be delivered at " +
                          format_fixed(rated_kw, 3) + " kW in " + format_fixed(duration_hours(h), 2) + " h");
    }
}

const char* to_string(EnergyLevel level) {
    switch (level) {
        case EnergyLevel::low: return "low";
        case EnergyLevel::medium: return "medium";
        case EnergyLevel::high: return "high";
    }
    return "unknown";
}

EnergyLevel parse_energy_level(std::string_view text) {
    if (text == "low") return EnergyLevel::low;
    if (text == "medium") return EnergyLevel::medium;
    if (text == "high") return EnergyLevel::high;
    throw ConfigError("unknown energy scenario '" + std::string(text) + "' (expected low, medium or high)");
}

const char* to_string(WindowModel model) {
    switch (model) {
        case WindowModel::dwell: return "dwell";
        case WindowModel::clock: return "clock";
    }
    return "unknown";
}

WindowModel parse_window_model(std::string_view text) {
    if (text == "dwell") return WindowModel::dwell;
    if (text == "clock") return WindowModel::clock;
    throw ConfigError("unknown window model '" + std::string(text) + "' (expected dwell or clock)");
}

void EnergyScenario::validate() const {
    if (!(energy_min_kwh > 0.0) || !(energy_max_kwh > energy_min_kwh)) {
        throw ConfigError("scenario '" + label() + "': energy range must satisfy 0 < min < max");
    }
    if (arrival_sd_h < 0.0 || departure_sd_h < 0.0) {
        throw ConfigError("scenario '" + label() + "': standard deviations must be non-negative");
    }
    if (!(rated_kw > 0.0)) {
        throw ConfigError("scenario '" + label() + "': rated power must be positive");
    }
    if (window_model == WindowModel::dwell && !(dwell_factor_min >= 1.0 && dwell_factor_max >= dwell_factor_min)) {
        throw ConfigError("scenario '" + label() + "': dwell factors must satisfy 1 <= min <= max");
    }
}

EnergyScenario EnergyScenario::preset(EnergyLevel level) {
    EnergyScenario s;
    s.level = level;
    switch (level) {
        case EnergyLevel::low:
            s.energy_min_kwh = 4.0;
            s.energy_max_kwh = 8.0;
            break;
        case EnergyLevel::medium:
            s.energy_min_kwh = 8.0;
            s.energy_max_kwh = 16.0;
            break;
        case EnergyLevel::high:
            s.energy_min_kwh = 16.0;
            s.energy_max_kwh = 30.0;
            break;
    }
    return s;
}

std::vector<EvSession> generate_fleet(const EnergyScenario& scenario, std::span<const std::string> households,
                                      std::uint64_t seed, const Horizon& horizon) {
    scenario.validate();
    horizon.validate();
    if (households.empty()) {
        throw ConfigError("cannot generate a fleet without households");
    }
    Sampler rng(seed);
    std::vector<EvSession> fleet;
    fleet.reserve(households.size());
    for (const auto& hh : households) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxResamples && !placed; ++attempt) {
            const double energy = rng.uniform(scenario.energy_min_kwh, scenario.energy_max_kwh);
            const auto arrival = clock_step(rng.truncated_normal(scenario.arrival_mean_h, scenario.arrival_sd_h), horizon);
            std::size_t duration = 0;
            if (scenario.window_model == WindowModel::dwell) {
                const double dwell_h =
                    energy / scenario.rated_kw * rng.uniform(scenario.dwell_factor_min, scenario.dwell_factor_max);
                duration = static_cast<std::size_t>(std::ceil(dwell_h / horizon.step_hours - 1e-9));
                if (duration > horizon.steps) {
                    continue;
                }
            } else {
                const auto departure =
                    clock_step(rng.truncated_normal(scenario.departure_mean_h, scenario.departure_sd_h), horizon);
                duration = (departure + horizon.steps - arrival) % horizon.steps;
            }
            if (duration == 0) {
                continue;
            }
            EvSession s{hh, arrival, arrival + duration, energy, scenario.rated_kw};
            if (s.requested_kwh > s.rated_kw * s.duration_hours(horizon)) {
                continue;
            }
            fleet.push_back(std::move(s));
            placed = true;
        }
        if (!placed) {
            throw ConfigError("scenario '" + scenario.label() + "' is infeasible: no session for household '" + hh +
                              "' fits its window at rated power after " + std::to_string(kMaxResamples) +
                              " draws");
        }
    }
    return fleet;
}

std::vector<double> ChargingTrajectory::running_kwh(const Horizon& h) const {
    std::vector<double> out;
    out.reserve(h.steps);
    double acc = 0.0;
    for (std::size_t k = 0; k < h.steps; ++k) {
        acc += power_kw[h.at(k)] * h.step_hours;
        out.push_back(acc);
    }
    return out;
}

double remaining_energy_kwh(const EvSession& session, double delivered_kwh) {
    const double rest = session.requested_kwh - delivered_kwh;
    return rest > kEnergyEpsilonKwh ? rest : 0.0;
}

double desired_power_kw(const EvSession& session, double delivered_kwh, double cap_kw, const Horizon& h) {
    const double rest = remaining_energy_kwh(session, delivered_kwh);
    if (rest <= 0.0) {
        return 0.0;
    }
    return std::min(cap_kw, rest / h.step_hours);
}

ChargingTrajectory baseline_trajectory(const EvSession& session, double hc_power_kw, const Horizon& horizon) {
    if (!(hc_power_kw > 0.0)) {
        throw ConfigError("charging power must be positive");
    }
    ChargingTrajectory traj{std::vector<double>(horizon.steps, 0.0), 0.0};
    for (std::size_t k = 0; k < horizon.steps; ++k) {
        const auto t = horizon.at(k);
        if (!session.connected(t, horizon)) {
            continue;
        }
        const double p = desired_power_kw(session, traj.delivered_kwh, hc_power_kw, horizon);
        traj.power_kw[t] = p;
        traj.delivered_kwh += p * horizon.step_hours;
    }
    return traj;
}

std::string write_fleet_csv(std::span<const EvSession> fleet) {
    CsvWriter out({"household", "arrival_step", "departure_step", "requested_kwh", "rated_kw"});
    for (const auto& s : fleet) {
        out.cell(s.household).cell(s.arrival_step).cell(s.departure_step).cell(format_shortest(s.requested_kwh)).cell(format_shortest(s.rated_kw));
        out.end_row();
    }
    return out.str();
}

std::vector<EvSession> load_fleet_csv(std::string_view text, const Horizon& horizon) {
    const auto table = parse_csv(text);
    const auto c_hh = table.column("household");
    const auto c_arr = table.column("arrival_step");
    const auto c_dep = table.column("departure_step");
    const auto c_e = table.column("requested_kwh");
    const auto c_p = table.column("rated_kw");
    std::vector<EvSession> fleet;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto where = "fleet row " + std::to_string(r + 1);
        const auto arr = parse_int(row[c_arr], where + " arrival_step");
        const auto dep = parse_int(row[c_dep], where + " departure_step");
        if (arr < 0 || dep < 0) {
            throw ConfigError(where + ": negative step index");
        }
        EvSession s{row[c_hh], static_cast<std::size_t>(arr), static_cast<std::size_t>(dep),
                    parse_double(row[c_e], where + " requested_kwh"), parse_double(row[c_p], where + " rated_kw")};
        s.validate(horizon);
        fleet.push_back(std::move(s));
    }
    return fleet;
}

std::vector<EvSession> load_fleet_file(const std::filesystem::path& path, const Horizon& horizon) {
    try {
        return load_fleet_csv(read_text_file(path), horizon);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace evhc
