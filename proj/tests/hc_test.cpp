#include "evhc/bundled.hpp"
#include "evhc/errors.hpp"
#include "evhc/hc.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace evhc;

namespace {

std::vector<EvSession> fleet(EnergyLevel level, std::uint64_t seed = 42) {
    return generate_fleet(EnergyScenario::preset(level), testutil::household_ids(bundled::feeder()), seed);
}

HcSearchConfig grid(std::vector<double> values) {
    HcSearchConfig c;
    c.power_grid = std::move(values);
    return c;
}

}  // namespace

TEST_SUITE("hc") {
    TEST_CASE("linear scan agrees with evaluating every candidate") {
        const testutil::Bundled b;
        const auto setup = b.setup();
        for (auto level : {EnergyLevel::low, EnergyLevel::medium, EnergyLevel::high}) {
            const auto sessions = fleet(level, 5);
            for (auto mode : {HcMode::passive, HcMode::network_aware}) {
                const auto config = grid({1, 3, 5, 7, 9, 11, 14, 17, 20});
                double expect = 0.0;
                bool broken = false;
                for (const double v : config.power_grid) {
                    const auto c = evaluate_candidate(setup, sessions, config, mode, v);
                    if (!broken && c.passes()) {
                        expect = v;
                    } else {
                        broken = true;
                    }
                }
                const auto report = run_hc(setup, sessions, config, mode);
                CHECK(report.hc == expect);
                if (report.status == HcStatus::within_range) {
                    CHECK(report.failing() != nullptr);
                    CHECK(report.at_hc() != nullptr);
                }
            }
        }
    }

    TEST_CASE("range edges") {
        const testutil::Bundled b;
        const auto setup = b.setup();
        const auto sessions = fleet(EnergyLevel::low);
        const auto easy = passive_hc(setup, sessions, grid({1, 2}));
        CHECK(easy.status == HcStatus::unconstrained_in_range);
        CHECK(easy.hc == 2.0);
        CHECK(!easy.limiting_factor);

        const auto hard = passive_hc(setup, sessions, grid({30, 40}));
        CHECK(hard.status == HcStatus::below_range);
        CHECK(hard.hc == 0.0);
        CHECK(hard.candidates.size() == 1);
        CHECK(hard.limiting_factor == LimitingFactor::undervoltage);
    }

    TEST_CASE("a full floor makes the network-aware search passive") {
        const testutil::Bundled b;
        const auto setup = b.setup();
        auto config = HcSearchConfig{};
        config.doe.factor = 1.0;
        for (auto level : {EnergyLevel::low, EnergyLevel::high}) {
            const auto sessions = fleet(level);
            const auto passive = passive_hc(setup, sessions, config);
            const auto na = network_aware_hc(setup, sessions, config);
            CHECK(na.hc == passive.hc);
            CHECK(na.limiting_factor == passive.limiting_factor);
        }
    }

    TEST_CASE("envelope control raises hosting capacity") {
        const testutil::Bundled b;
        const auto setup = b.setup();
        for (auto level : {EnergyLevel::low, EnergyLevel::medium, EnergyLevel::high}) {
            const auto sessions = fleet(level);
            const auto passive = passive_hc(setup, sessions, HcSearchConfig{});
            const auto na = network_aware_hc(setup, sessions, HcSearchConfig{});
            CHECK(na.hc > passive.hc);
            CHECK(passive.limiting_factor == LimitingFactor::undervoltage);
        }
    }

    TEST_CASE("an incident outranks a simultaneous QoS breach") {
        const testutil::Bundled b;
        auto config = grid({10});
        config.qos_threshold = 0.99;
        const auto r = network_aware_hc(b.setup(), fleet(EnergyLevel::medium), config);
        REQUIRE(r.failing());
        CHECK(r.failing()->qos_breached);
        CHECK(!r.failing()->incidents.empty());
        CHECK(r.limiting_factor == LimitingFactor::undervoltage);
        CHECK(r.qos_breached_with_incident);

        CandidateResult only_qos;
        only_qos.qos_breached = true;
        CHECK(failure_reason(only_qos) == LimitingFactor::aggregated_qos);
        CHECK(!failure_reason(CandidateResult{}));
    }

    TEST_CASE("EV-count sweep uses a fleet prefix at a fixed power") {
        const testutil::Bundled b;
        auto config = grid({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
        config.dimension = SweepDimension::ev_count;
        config.ev_count_power_kw = 11.0;
        const auto r = passive_hc(b.setup(), fleet(EnergyLevel::high), config);
        for (const auto& c : r.candidates) {
            CHECK(c.ev_count == static_cast<std::size_t>(c.value));
            CHECK(c.hc_power_kw == 11.0);
        }
        CHECK(r.hc < 12.0);
        auto too_many = grid({13});
        too_many.dimension = SweepDimension::ev_count;
        CHECK_THROWS_AS(passive_hc(b.setup(), fleet(EnergyLevel::high), too_many), ConfigError);
        auto fractional = grid({1.5});
        fractional.dimension = SweepDimension::ev_count;
        CHECK_THROWS_AS(fractional.validate(), ConfigError);
    }

    TEST_CASE("search configuration is validated") {
        CHECK_THROWS_AS(grid({}).validate(), ConfigError);
        CHECK_THROWS_AS(grid({2, 1}).validate(), ConfigError);
        CHECK_THROWS_AS(grid({0, 1}).validate(), ConfigError);
        auto c = grid({1});
        c.qos_threshold = 0.0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }

    TEST_CASE("sweeps do not depend on the worker count") {
        const testutil::Bundled b;
        const std::vector<LabelledFleet> fleets{{"medium", fleet(EnergyLevel::medium)},
                                                {"high", fleet(EnergyLevel::high)}};
        const std::vector<double> deltas{0.0, 0.05, 0.1};
        const std::vector<double> factors{0.2, 0.5};
        const auto one = sensitivity_sweep(b.setup(), fleets, deltas, factors, HcSearchConfig{}, 1);
        const auto four = sensitivity_sweep(b.setup(), fleets, deltas, factors, HcSearchConfig{}, 4);
        CHECK(one.size() == 12);
        CHECK(export_sweep(one) == export_sweep(four));

        const std::vector<double> thresholds{0.6, 0.9};
        const auto t1 = threshold_sweep(b.setup(), fleets, thresholds, HcSearchConfig{}, 1);
        const auto t3 = threshold_sweep(b.setup(), fleets, thresholds, HcSearchConfig{}, 3);
        CHECK(export_sweep(t1) == export_sweep(t3));
        for (std::size_t i = 0; i + 1 < t1.size(); i += 2) {
            CHECK(t1[i].nahc >= t1[i + 1].nahc);
        }
    }
}
