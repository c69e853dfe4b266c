#include "evhc/bundled.hpp"
#include "evhc/errors.hpp"
#include "evhc/ev.hpp"
#include "evhc/simulate.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace evhc;

namespace {

std::vector<EvSession> fleet(EnergyLevel level, std::uint64_t seed = 42) {
    return generate_fleet(EnergyScenario::preset(level), testutil::household_ids(bundled::feeder()), seed);
}

// Same evening session at every household.
std::vector<EvSession> identical_sessions(const FeederModel& f, double kwh) {
    std::vector<EvSession> out;
    for (const auto& h : f.households()) {
        out.push_back({h.id, 72, 84, kwh, 22.0});
    }
    return out;
}

}  // namespace

TEST_SUITE("simulate") {
    TEST_CASE("a floor equal to the rating reproduces uncontrolled charging bit for bit") {
        const testutil::Bundled b;
        const auto setup = b.setup();
        const auto sessions = fleet(EnergyLevel::high);
        DoeParams p;
        p.factor = 1.0;
        const auto base = simulate_uncontrolled(setup, sessions, 9.0);
        const auto na = network_aware_trajectory(setup, sessions, 9.0, p);
        for (std::size_t e = 0; e < sessions.size(); ++e) {
            CHECK(na.trajectories[e].power_kw == base.trajectories[e].power_kw);
            CHECK(na.trajectories[e].delivered_kwh == base.trajectories[e].delivered_kwh);
        }
    }

    TEST_CASE("an always-green envelope changes nothing") {
        const testutil::Bundled b;
        const auto setup = b.setup();
        const auto sessions = fleet(EnergyLevel::medium);
        DoeParams p;
        p.delta_perm = 0.6;
        p.u_min = 0.3;
        const auto base = simulate_uncontrolled(setup, sessions, 6.0);
        const auto na = network_aware_trajectory(setup, sessions, 6.0, p);
        for (std::size_t e = 0; e < sessions.size(); ++e) {
            CHECK(na.trajectories[e].power_kw == base.trajectories[e].power_kw);
        }
        for (std::size_t t = 0; t < 96; ++t) {
            for (const auto& env : na.trace.envelopes[t]) {
                CHECK(env.zone == Zone::green);
            }
        }
    }

    TEST_CASE("settled steps are consistent with their own voltages") {
        const testutil::Bundled b;
        const auto setup = b.setup();
        const auto sessions = fleet(EnergyLevel::high);
        const DoeParams p;
        const auto na = network_aware_trajectory(setup, sessions, 10.0, p);
        std::size_t checked = 0;
        for (std::size_t t = 0; t < 96; ++t) {
            if (na.trace.flagged[t] || !na.trace.steps[t].converged()) {
                continue;
            }
            for (std::size_t e = 0; e < sessions.size(); ++e) {
                const auto node = b.feeder.household_node(na.trace.ev_household[e]);
                const double u = na.trace.steps[t].voltage_magnitude(node);
                const double want = na.trace.envelopes[t][e].p_desired;
                const double expect = clamp_power(want, envelope_bound(u, 10.0, p));
                CHECK(std::abs(na.trace.granted_kw[t][e] - expect) < 0.02);
                ++checked;
            }
        }
        CHECK(checked > 900);
    }

    TEST_CASE("granted power respects the envelope, the request and the window") {
        const testutil::Bundled b;
        const auto setup = b.setup();
        for (auto level : {EnergyLevel::low, EnergyLevel::medium, EnergyLevel::high}) {
            const auto sessions = fleet(level, 9);
            for (auto source : {VoltageSource::fixed_point, VoltageSource::previous_step}) {
                DoeParams p;
                p.voltage_source = source;
                const auto na = network_aware_trajectory(setup, sessions, 12.0, p);
                for (std::size_t e = 0; e < sessions.size(); ++e) {
                    const auto& s = sessions[e];
                    const auto& tr = na.trajectories[e];
                    double sum = 0.0;
                    for (std::size_t t = 0; t < 96; ++t) {
                        const double g = tr.power_kw[t];
                        CHECK(g >= 0.0);
                        CHECK(g <= 12.0 + 1e-12);
                        if (!s.connected(t, setup.horizon)) {
                            CHECK(g == 0.0);
                        }
                        const auto& env = na.trace.envelopes[t][e];
                        CHECK(g <= env.p_desired + 1e-12);
                        CHECK(g <= std::max(env.p_upper, std::min(env.p_min, env.p_desired)) + 1e-12);
                        sum += g * 0.25;
                    }
                    CHECK(sum == doctest::Approx(tr.delivered_kwh).epsilon(1e-12));
                    CHECK(tr.delivered_kwh <= s.requested_kwh + 1e-9);
                    CHECK(na.trace.delivered_kwh[e] == tr.delivered_kwh);
                }
            }
        }
    }

    TEST_CASE("uncontrolled charging delivers every request") {
        const testutil::Bundled b;
        const auto sessions = fleet(EnergyLevel::high);
        const auto run = simulate_uncontrolled(b.setup(), sessions, 11.0);
        for (std::size_t e = 0; e < sessions.size(); ++e) {
            CHECK(run.trajectories[e].delivered_kwh == doctest::Approx(sessions[e].requested_kwh));
        }
    }

    TEST_CASE("the electrically farthest EV is curtailed most") {
        const testutil::Bundled b;
        const auto sessions = identical_sessions(b.feeder, 40.0);
        const auto na = network_aware_trajectory(b.setup(), sessions, 14.0, DoeParams{});
        std::size_t far = 0;
        std::size_t near = 0;
        for (std::size_t h = 0; h < 12; ++h) {
            if (path_impedance_ohm(b.feeder, h) > path_impedance_ohm(b.feeder, far)) far = h;
            if (path_impedance_ohm(b.feeder, h) < path_impedance_ohm(b.feeder, near)) near = h;
        }
        double least = na.trajectories[0].delivered_kwh;
        for (const auto& tr : na.trajectories) {
            least = std::min(least, tr.delivered_kwh);
        }
        CHECK(na.trajectories[far].delivered_kwh == least);
        CHECK(na.trajectories[far].delivered_kwh < na.trajectories[near].delivered_kwh);
    }

    TEST_CASE("setup problems surface as config errors") {
        const testutil::Bundled b;
        auto short_profiles = b.baselines;
        short_profiles[0].power_kw.pop_back();
        const SimulationSetup bad{b.feeder, short_profiles};
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        const std::vector<EvSession> stray{{"nobody", 70, 80, 5.0, 11.0}};
        CHECK_THROWS_AS(simulate_uncontrolled(b.setup(), stray, 5.0), ConfigError);
        CHECK_THROWS_AS(network_aware_trajectory(b.setup(), fleet(EnergyLevel::low), 0.0, DoeParams{}), ConfigError);
    }

    TEST_CASE("baseline reactive power follows the power factor") {
        const auto f = testutil::two_bus(0.1, 0.1);
        const auto base = testutil::flat_baseline(f, 2.0);
        SimulationSetup s{f, base};
        const std::vector<std::size_t> hh{0};
        const std::vector<double> ev{3.0};
        const auto inj = build_injections(s, hh, ev, 10);
        CHECK(inj.p_kw[0] == 5.0);
        CHECK(inj.q_kvar[0] == doctest::Approx(2.0 * std::tan(std::acos(0.95))));
    }
}
