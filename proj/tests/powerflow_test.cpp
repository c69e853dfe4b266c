#include "evhc/bundled.hpp"
#include "evhc/errors.hpp"
#include "evhc/powerflow.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace evhc;

namespace {

// Receiving-end voltage (pu) of a single line feeding a constant-power load, per phase.
double two_bus_voltage_pu(double r, double x, double p_kw_total, double q_kvar_total) {
    const double vs = 230.0;
    const double p = p_kw_total * 1000.0 / 3.0;
    const double q = q_kvar_total * 1000.0 / 3.0;
    const double a = vs * vs - 2.0 * (r * p + x * q);
    const double z2 = r * r + x * x;
    const double s2 = p * p + q * q;
    return std::sqrt((a + std::sqrt(a * a - 4.0 * z2 * s2)) / 2.0) / vs;
}

InjectionSet random_injections(std::size_t n, std::mt19937_64& rng, double max_kw) {
    std::uniform_real_distribution<double> p(0.0, max_kw);
    auto inj = InjectionSet::zeros(n);
    for (std::size_t h = 0; h < n; ++h) {
        inj.p_kw[h] = p(rng);
        inj.q_kvar[h] = 0.3 * inj.p_kw[h];
    }
    return inj;
}

}  // namespace

TEST_SUITE("powerflow") {
    TEST_CASE("two-bus case matches the closed form") {
        const double cases[][4] = {{0.1, 0.05, 10.0, 3.0}, {0.3, 0.08, 25.0, 0.0}, {0.05, 0.2, 40.0, 15.0},
                                   {0.2, 0.0, 5.0, 1.0},   {0.0, 0.1, 30.0, 10.0}, {0.15, 0.07, 0.0, 0.0}};
        for (const auto& c : cases) {
            const auto f = testutil::two_bus(c[0], c[1]);
            auto inj = InjectionSet::zeros(1);
            inj.p_kw[0] = c[2];
            inj.q_kvar[0] = c[3];
            const auto sol = solve(f, inj);
            REQUIRE(sol.converged());
            CHECK(std::abs(sol.voltage_magnitude(1) - two_bus_voltage_pu(c[0], c[1], c[2], c[3])) < 1e-8);
        }
    }

    TEST_CASE("no load leaves every node at 1 pu") {
        const auto f = bundled::feeder();
        const auto sol = solve(f, InjectionSet::zeros(f.households().size()));
        CHECK(sol.converged());
        for (std::size_t n = 0; n < f.nodes().size(); ++n) {
            CHECK(sol.voltage_magnitude(n) == doctest::Approx(1.0).epsilon(1e-15));
        }
        CHECK(sol.losses_kw == 0.0);
    }

    TEST_CASE("power balance on every converged random solution") {
        const auto f = bundled::feeder();
        std::mt19937_64 rng(3);
        int converged = 0;
        for (int trial = 0; trial < 300; ++trial) {
            const auto inj = random_injections(f.households().size(), rng, 15.0);
            const auto sol = solve(f, inj);
            if (!sol.converged()) {
                continue;
            }
            ++converged;
            double p = 0.0;
            double q = 0.0;
            for (std::size_t h = 0; h < inj.p_kw.size(); ++h) {
                p += inj.p_kw[h];
                q += inj.q_kvar[h];
            }
            double q_losses = 0.0;
            for (std::size_t b = 0; b < f.branches().size(); ++b) {
                q_losses += sol.branch_current_a[b] * sol.branch_current_a[b] * f.branches()[b].x_ohm * 3.0 / 1000.0;
            }
            const double p_expected = p + sol.losses_kw;
            CHECK(std::abs(sol.slack_power_kva.real() - p_expected) <= 1e-6 * p_expected);
            CHECK(std::abs(sol.slack_power_kva.imag() - (q + q_losses)) <= 1e-6 * (q + q_losses));
        }
        CHECK(converged > 250);
    }

    TEST_CASE("voltage never rises away from the slack under load") {
        const auto f = bundled::feeder();
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            const auto sol = solve(f, random_injections(f.households().size(), rng, 10.0));
            REQUIRE(sol.converged());
            for (std::size_t n = 0; n < f.nodes().size(); ++n) {
                if (const auto p = f.parent_node(n)) {
                    CHECK(sol.voltage_magnitude(n) <= sol.voltage_magnitude(*p) + 1e-12);
                }
            }
        }
    }

    TEST_CASE("uniform 8 kW puts the lowest voltage at the electrically farthest household") {
        const auto f = bundled::feeder();
        auto inj = InjectionSet::zeros(12);
        std::fill(inj.p_kw.begin(), inj.p_kw.end(), 8.0);
        const auto sol = solve(f, inj);
        REQUIRE(sol.converged());
        std::size_t farthest = 0;
        std::size_t lowest = 0;
        for (std::size_t h = 0; h < 12; ++h) {
            if (path_impedance_ohm(f, h) > path_impedance_ohm(f, farthest)) {
                farthest = h;
            }
            if (sol.voltage_magnitude(f.household_node(h)) < sol.voltage_magnitude(f.household_node(lowest))) {
                lowest = h;
            }
        }
        CHECK(lowest == farthest);
    }

    TEST_CASE("collapse and non-convergence are reported, not thrown") {
        const auto f = testutil::two_bus(0.5, 0.2);
        auto inj = InjectionSet::zeros(1);
        inj.p_kw[0] = 500.0;
        const auto sol = solve(f, inj);
        CHECK(sol.status == SolveStatus::voltage_collapse);
        CHECK(!sol.diagnostic.empty());

        inj.p_kw[0] = 20.0;
        PowerFlowOptions opts;
        opts.max_iterations = 1;
        const auto partial = solve(f, inj, opts);
        CHECK(partial.status == SolveStatus::not_converged);
        CHECK(partial.iterations == 1);
    }

    TEST_CASE("injection size mismatch is a simulation error naming the step") {
        const auto f = testutil::two_bus(0.1, 0.1);
        CHECK_THROWS_AS(solve(f, InjectionSet::zeros(2)), SimulationError);
        std::vector<InjectionSet> steps{InjectionSet::zeros(1), InjectionSet::zeros(3)};
        try {
            solve_horizon(f, steps);
            FAIL("expected an error");
        } catch (const SimulationError& e) {
            CHECK(std::string(e.what()).find("step 1") != std::string::npos);
        }
    }

    TEST_CASE("branch current equals the load current on a single line") {
        const auto f = testutil::two_bus(0.1, 0.0);
        auto inj = InjectionSet::zeros(1);
        inj.p_kw[0] = 6.9;
        const auto sol = solve(f, inj);
        const double v = sol.voltage_magnitude(1) * 230.0;
        CHECK(sol.branch_current_a[0] == doctest::Approx(2300.0 / v).epsilon(1e-9));
    }
}
