#include "evhc/qos.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>

using namespace evhc;

TEST_SUITE("qos") {
    TEST_CASE("individual QoS is the delivered fraction") {
        CHECK(qos_individual(10.0, 6.0) == doctest::Approx(0.6));
        CHECK(qos_individual(10.0, 10.0) == 1.0);
        CHECK(qos_individual(10.0, 0.0) == 0.0);
        CHECK_THROWS_AS(qos_individual(0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(qos_individual(10.0, 11.0), std::invalid_argument);
        CHECK_THROWS_AS(qos_individual(10.0, -1.0), std::invalid_argument);
    }

    TEST_CASE("aggregated QoS is energy weighted") {
        const std::vector<EnergyPair> pairs{{10.0, 6.0}, {30.0, 30.0}};
        CHECK(qos_aggregated(pairs) == doctest::Approx(0.9));
        const std::vector<EnergyPair> none{{0.0, 0.0}};
        CHECK_THROWS_AS(qos_aggregated(none), std::invalid_argument);
    }

    TEST_CASE("random fleets satisfy the report identities") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<CustomerEnergy> cs;
            double sum_e = 0.0;
            double sum_na = 0.0;
            const int n = 1 + static_cast<int>(u(rng) * 20);
            for (int i = 0; i < n; ++i) {
                const double e = u(rng) < 0.1 && i > 0 ? 0.0 : 1.0 + 29.0 * u(rng);
                const double na = e * u(rng);
                cs.push_back({"H" + std::to_string(i), "N" + std::to_string(i), {e, e > 0.0 ? na : 0.0}});
                sum_e += e;
                sum_na += e > 0.0 ? na : 0.0;
            }
            const auto r = build_qos_report(cs);
            CHECK(r.aggregated == doctest::Approx(sum_na / sum_e).epsilon(1e-12));
            CHECK(r.aggregated >= 0.0);
            CHECK(r.aggregated <= 1.0);
            CHECK(r.minimum <= r.aggregated + 1e-12);
            CHECK(r.aggregated <= r.maximum + 1e-12);
            CHECK(r.customers.size() + r.excluded.size() == cs.size());
            for (const auto& c : r.customers) {
                CHECK(c.qos >= r.minimum);
            }
        }
    }

    TEST_CASE("zero-baseline customers are listed but excluded") {
        const std::vector<CustomerEnergy> cs{{"A", "N1", {10.0, 5.0}}, {"B", "N2", {0.0, 0.0}}};
        const auto r = build_qos_report(cs);
        CHECK(r.customers.size() == 1);
        REQUIRE(r.excluded.size() == 1);
        CHECK(r.excluded[0] == "B");
        CHECK(r.aggregated == 0.5);
        CHECK(r.minimum_customer == "A");
    }

    TEST_CASE("export ends with aggregated and minimum rows") {
        const std::vector<CustomerEnergy> cs{{"A", "N1", {10.0, 6.0}}, {"B", "N2", {10.0, 10.0}}};
        const auto text = export_qos(build_qos_report(cs));
        CHECK(text.find("aggregated,,,,0.800000\n") != std::string::npos);
        CHECK(text.find("minimum,A,,,0.600000\n") != std::string::npos);
    }
}
