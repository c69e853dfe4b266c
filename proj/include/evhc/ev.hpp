#pragma once

#include "evhc/horizon.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evhc {

/// One charging session. `departure_step` is unwrapped: it lies in
/// (arrival_step, arrival_step + steps], so overnight sessions end past the
/// end of the day and wrap onto its beginning.
struct EvSession {
    std::string household;
    std::size_t arrival_step = 0;
    std::size_t departure_step = 0;
    double requested_kwh = 0.0;
    double rated_kw = 0.0;

    std::size_t duration_steps() const { return departure_step - arrival_step; }
    double duration_hours(const Horizon& h) const { return static_cast<double>(duration_steps()) * h.step_hours; }
    /// True when the vehicle is plugged in during clock step `t`.
    bool connected(std::size_t t, const Horizon& h) const {
        return (t + h.steps - arrival_step % h.steps) % h.steps < duration_steps();
    }

    /// Throws ConfigError naming the household when an invariant fails.
    void validate(const Horizon& h) const;

    bool operator==(const EvSession&) const = default;
};

enum class EnergyLevel { low, medium, high };

const char* to_string(EnergyLevel level);
EnergyLevel parse_energy_level(std::string_view text);

/// How a generated session's departure is drawn.
enum class WindowModel {
    dwell,  // departure = arrival + requested / rated x U[dwell_factor_min, dwell_factor_max]
    clock,  // departure drawn as a clock time; earlier than arrival means next day
};

const char* to_string(WindowModel model);
WindowModel parse_window_model(std::string_view text);

/// Generator parameters for one daily-energy stratum. Times are clock hours.
struct EnergyScenario {
    EnergyLevel level = EnergyLevel::low;
    double energy_min_kwh = 4.0;
    double energy_max_kwh = 8.0;
    double arrival_mean_h = 18.0;
    double arrival_sd_h = 1.5;
    double departure_mean_h = 7.5;
    double departure_sd_h = 1.0;
    double rated_kw = 11.0;
    WindowModel window_model = WindowModel::dwell;
    double dwell_factor_min = 1.0;
    double dwell_factor_max = 1.5;

    std::string label() const { return to_string(level); }
    void validate() const;

    /// Default parameters of each stratum.
    static EnergyScenario preset(EnergyLevel level);
};

/// One session per household, deterministic for a given seed.
std::vector<EvSession> generate_fleet(const EnergyScenario& scenario, std::span<const std::string> households,
                                      std::uint64_t seed, const Horizon& horizon = {});

/// Power profile of one session on the clock-indexed horizon.
struct ChargingTrajectory {
    std::vector<double> power_kw;
    double delivered_kwh = 0.0;

    /// Cumulative delivered energy after each step, in simulation order.
    std::vector<double> running_kwh(const Horizon& h) const;
};

/// Energy still owed to a session after `delivered_kwh`; exhausted sessions return 0.
double remaining_energy_kwh(const EvSession& session, double delivered_kwh);

/// Power a session asks for in one step: min(cap, rate that completes the request this step).
double desired_power_kw(const EvSession& session, double delivered_kwh, double cap_kw, const Horizon& h);

/// Uncontrolled charging: full `hc_power_kw` from arrival until the request is met or the car leaves.
ChargingTrajectory baseline_trajectory(const EvSession& session, double hc_power_kw, const Horizon& horizon = {});

/// Fleet table: household, arrival_step, departure_step, requested_kwh, rated_kw.
std::string write_fleet_csv(std::span<const EvSession> fleet);
std::vector<EvSession> load_fleet_csv(std::string_view text, const Horizon& horizon = {});
std::vector<EvSession> load_fleet_file(const std::filesystem::path& path, const Horizon& horizon = {});

}  // namespace evhc
