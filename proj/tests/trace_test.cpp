#include "evhc/bundled.hpp"
#include "evhc/simulate.hpp"
#include "evhc/table.hpp"
#include "evhc/trace.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>

using namespace evhc;

TEST_SUITE("trace") {
    TEST_CASE("no load means a flat summary") {
        const auto f = testutil::two_bus(0.1, 0.1);
        const auto base = testutil::flat_baseline(f, 0.0);
        const SimulationSetup setup{f, base};
        const auto run = simulate_uncontrolled(setup, std::vector<EvSession>{}, 5.0);
        const auto s = summarize(run.trace, f);
        CHECK(s.min_voltage == 1.0);
        CHECK(s.transformer_max_loading == 0.0);
        CHECK(s.flagged_steps == 0);
        CHECK(s.unsolved_steps == 0);
    }

    TEST_CASE("summary minimum is the smallest solved voltage") {
        const testutil::Bundled b;
        const auto sessions =
            generate_fleet(EnergyScenario::preset(EnergyLevel::medium), testutil::household_ids(b.feeder), 42);
        const auto run = simulate_uncontrolled(b.setup(), sessions, 7.0);
        const auto s = summarize(run.trace, b.feeder);
        double raw = 1.0;
        for (const auto& step : run.trace.steps) {
            for (std::size_t n = 0; n < b.feeder.nodes().size(); ++n) {
                raw = std::min(raw, step.voltage_magnitude(n));
            }
        }
        CHECK(s.min_voltage == raw);
        CHECK(s.node_v_min[s.min_voltage_node] == raw);
        CHECK(s.ev_energy_kwh == run.trace.delivered_kwh);
    }

    TEST_CASE("envelope control keeps voltages at least as high") {
        const testutil::Bundled b;
        for (auto level : {EnergyLevel::low, EnergyLevel::medium, EnergyLevel::high}) {
            const auto sessions = generate_fleet(EnergyScenario::preset(level), testutil::household_ids(b.feeder), 42);
            const auto real = simulate_uncontrolled(b.setup(), sessions, 12.0);
            const auto na = network_aware_trajectory(b.setup(), sessions, 12.0, DoeParams{});
            CHECK(summarize(na.trace, b.feeder).min_voltage >= summarize(real.trace, b.feeder).min_voltage - 1e-9);
        }
    }

    TEST_CASE("exports have one row per step and element") {
        const testutil::Bundled b;
        const auto sessions =
            generate_fleet(EnergyScenario::preset(EnergyLevel::low), testutil::household_ids(b.feeder), 1);
        const auto na = network_aware_trajectory(b.setup(), sessions, 6.0, DoeParams{});
        const auto v = parse_csv(export_voltages(na.trace, b.feeder));
        CHECK(v.rows.size() == 96 * b.feeder.nodes().size());
        const auto ev = parse_csv(export_ev_powers(na.trace, b.feeder));
        CHECK(ev.rows.size() == 96 * sessions.size());
        CHECK(ev.header.back() == "p_desired_kw");
        const auto br = parse_csv(export_branch_loading(na.trace, b.feeder));
        CHECK(br.rows.size() == 96 * b.feeder.branches().size());

        const auto real = simulate_uncontrolled(b.setup(), sessions, 6.0);
        const auto evr = parse_csv(export_ev_powers(real.trace, b.feeder));
        CHECK(evr.rows[0][evr.column("zone")] == "none");
    }
}
