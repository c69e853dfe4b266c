#include "evhc/bundled.hpp"
#include "evhc/errors.hpp"
#include "evhc/ev.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace evhc;

TEST_SUITE("ev") {
    TEST_CASE("presets carry the stratum energy ranges") {
        const auto low = EnergyScenario::preset(EnergyLevel::low);
        const auto med = EnergyScenario::preset(EnergyLevel::medium);
        const auto high = EnergyScenario::preset(EnergyLevel::high);
        CHECK(low.energy_min_kwh == 4.0);
        CHECK(low.energy_max_kwh == 8.0);
        CHECK(med.energy_min_kwh == 8.0);
        CHECK(med.energy_max_kwh == 16.0);
        CHECK(high.energy_min_kwh == 16.0);
        CHECK(high.energy_max_kwh == 30.0);
        CHECK(parse_energy_level("medium") == EnergyLevel::medium);
        CHECK_THROWS_AS(parse_energy_level("extreme"), ConfigError);
        CHECK(parse_window_model("clock") == WindowModel::clock);
    }

    TEST_CASE("same seed, same fleet; different seed, different fleet") {
        const auto f = bundled::feeder();
        const auto ids = testutil::household_ids(f);
        const auto s = EnergyScenario::preset(EnergyLevel::medium);
        CHECK(generate_fleet(s, ids, 42) == generate_fleet(s, ids, 42));
        CHECK(generate_fleet(s, ids, 42) != generate_fleet(s, ids, 43));
    }

    TEST_CASE("generated sessions are feasible and in range") {
        const auto f = bundled::feeder();
        const auto ids = testutil::household_ids(f);
        const Horizon h;
        for (auto level : {EnergyLevel::low, EnergyLevel::medium, EnergyLevel::high}) {
            for (auto model : {WindowModel::dwell, WindowModel::clock}) {
                auto sc = EnergyScenario::preset(level);
                sc.window_model = model;
                for (std::uint64_t seed = 0; seed < 50; ++seed) {
                    const auto fleet = generate_fleet(sc, ids, seed);
                    REQUIRE(fleet.size() == ids.size());
                    for (std::size_t i = 0; i < fleet.size(); ++i) {
                        const auto& s = fleet[i];
                        CHECK(s.household == ids[i]);
                        CHECK_NOTHROW(s.validate(h));
                        CHECK(s.requested_kwh >= sc.energy_min_kwh);
                        CHECK(s.requested_kwh <= sc.energy_max_kwh);
                        CHECK(s.requested_kwh <= s.rated_kw * s.duration_hours(h) + 1e-9);
                    }
                }
            }
        }
    }

    TEST_CASE("high-energy sessions stay plugged in longer on average") {
        const auto ids = testutil::household_ids(bundled::feeder());
        const Horizon h;
        double low_hours = 0.0;
        double high_hours = 0.0;
        for (std::uint64_t seed = 0; seed < 120; ++seed) {
            for (const auto& s : generate_fleet(EnergyScenario::preset(EnergyLevel::low), ids, seed)) {
                low_hours += s.duration_hours(h);
            }
            for (const auto& s : generate_fleet(EnergyScenario::preset(EnergyLevel::high), ids, seed)) {
                high_hours += s.duration_hours(h);
            }
        }
        CHECK(high_hours > low_hours);
    }

    TEST_CASE("connected covers exactly the wrapped window") {
        const Horizon h;
        const EvSession s{"H", 90, 100, 5.0, 11.0};
        CHECK(s.connected(90, h));
        CHECK(s.connected(95, h));
        CHECK(s.connected(0, h));
        CHECK(s.connected(3, h));
        CHECK(!s.connected(4, h));
        CHECK(!s.connected(89, h));
        std::size_t count = 0;
        for (std::size_t t = 0; t < h.steps; ++t) {
            count += s.connected(t, h) ? 1 : 0;
        }
        CHECK(count == 10);
        const EvSession full{"H", 10, 106, 5.0, 11.0};
        for (std::size_t t = 0; t < h.steps; ++t) {
            CHECK(full.connected(t, h));
        }
    }

    TEST_CASE("baseline trajectory delivers the request at the capped rate") {
        const Horizon h;
        const EvSession s{"H", 70, 90, 10.0, 11.0};
        const auto tr = baseline_trajectory(s, 4.0, h);
        CHECK(tr.delivered_kwh == doctest::Approx(10.0).epsilon(1e-12));
        // 10 kWh at 4 kW: ten full steps then a 0 kW remainder
        for (std::size_t t = 70; t < 80; ++t) {
            CHECK(tr.power_kw[t] == 4.0);
        }
        CHECK(tr.power_kw[80] == 0.0);
        CHECK(tr.power_kw[69] == 0.0);
        CHECK(tr.running_kwh(h).back() == doctest::Approx(10.0));

        const auto slow = baseline_trajectory(s, 1.0, h);
        CHECK(slow.delivered_kwh == doctest::Approx(5.0));
        CHECK_THROWS_AS(baseline_trajectory(s, 0.0, h), ConfigError);
    }

    TEST_CASE("overnight trajectory wraps past midnight") {
        const Horizon h;
        const EvSession s{"H", 88, 104, 20.0, 11.0};
        const auto tr = baseline_trajectory(s, 10.0, h);
        CHECK(tr.delivered_kwh == doctest::Approx(20.0));
        CHECK(tr.power_kw[88] == 10.0);
        CHECK(tr.power_kw[95] == 10.0);
        CHECK(tr.power_kw[0] == 0.0);
    }

    TEST_CASE("desired power never exceeds what is owed") {
        const Horizon h;
        const EvSession s{"H", 0, 10, 3.0, 11.0};
        CHECK(desired_power_kw(s, 0.0, 11.0, h) == 11.0);
        CHECK(desired_power_kw(s, 2.5, 11.0, h) == doctest::Approx(2.0));
        CHECK(desired_power_kw(s, 3.0, 11.0, h) == 0.0);
        CHECK(remaining_energy_kwh(s, 3.5) == 0.0);
    }

    TEST_CASE("fleet csv round-trips") {
        const auto ids = testutil::household_ids(bundled::feeder());
        const auto fleet = generate_fleet(EnergyScenario::preset(EnergyLevel::high), ids, 7);
        CHECK(load_fleet_csv(write_fleet_csv(fleet)) == fleet);
    }

    TEST_CASE("invalid sessions and scenarios are config errors") {
        const Horizon h;
        CHECK_THROWS_AS((EvSession{"H", 96, 97, 1.0, 11.0}.validate(h)), ConfigError);
        CHECK_THROWS_AS((EvSession{"H", 5, 5, 1.0, 11.0}.validate(h)), ConfigError);
        CHECK_THROWS_AS((EvSession{"H", 5, 6, 5.0, 11.0}.validate(h)), ConfigError);
        CHECK_THROWS_AS(load_fleet_csv("household,arrival_step,departure_step,requested_kwh,rated_kw\nH,10,9,1,11\n"),
                        ConfigError);

        auto bad = EnergyScenario::preset(EnergyLevel::low);
        bad.energy_max_kwh = 3.0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);

        // Windows of one step cannot hold 4 kWh at 11 kW.
        auto cramped = EnergyScenario::preset(EnergyLevel::low);
        cramped.window_model = WindowModel::clock;
        cramped.arrival_sd_h = 0.0;
        cramped.departure_sd_h = 0.0;
        cramped.departure_mean_h = 18.25;
        const std::vector<std::string> one{"H01"};
        try {
            generate_fleet(cramped, one, 1);
            FAIL("expected infeasible");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("infeasible") != std::string::npos);
        }
    }
}
