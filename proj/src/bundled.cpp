#include "evhc/bundled.hpp"

#include <array>
#include <cmath>
#include <string>

namespace evhc::bundled {

namespace {

struct Cable {
    double r_ohm_per_km;
    double x_ohm_per_km;
    double ampacity_a;
};

// Aluminium four-core LV cables.
constexpr Cable kAl150{0.206, 0.080, 240.0};
constexpr Cable kAl95{0.320, 0.082, 185.0};
constexpr Cable kAl50{0.641, 0.086, 125.0};

struct Span {
    const char* from;
    const char* to;
    double length_m;
    Cable cable;
};

// Long trunk N00..N06; each trunk node feeds two short service cables.
constexpr std::array<Span, 18> kSpans{{
    {"N00", "N01", 480.0, kAl150},
    {"N01", "N02", 400.0, kAl150},
    {"N02", "N03", 400.0, kAl150},
    {"N03", "N04", 360.0, kAl95},
    {"N04", "N05", 360.0, kAl95},
    {"N05", "N06", 320.0, kAl95},
    {"N01", "N07", 60.0, kAl50},
    {"N01", "N08", 80.0, kAl50},
    {"N02", "N09", 70.0, kAl50},
    {"N02", "N10", 60.0, kAl50},
    {"N03", "N11", 80.0, kAl50},
    {"N03", "N12", 60.0, kAl50},
    {"N04", "N13", 70.0, kAl50},
    {"N04", "N14", 80.0, kAl50},
    {"N05", "N15", 60.0, kAl50},
    {"N05", "N16", 70.0, kAl50},
    {"N06", "N17", 80.0, kAl50},
    {"N06", "N18", 60.0, kAl50},
}};

constexpr std::array<const char*, 12> kHouseholdNodes{
    "N07", "N08", "N09", "N10", "N11", "N12", "N13", "N14", "N15", "N16", "N17", "N18",
};

// Relative size of each household's demand.
constexpr std::array<double, 12> kHouseholdScale{1.00, 0.85, 1.15, 0.95, 1.05, 0.90,
                                                 1.20, 0.80, 1.10, 1.00, 0.90, 1.10};

std::string two_digit(std::size_t i) {
    return (i < 10 ? "0" : "") + std::to_string(i);
}

double winter_shape_kw(double hour) {
    auto bump = [](double h, double centre, double width) {
        // Circular distance so the evening peak tails into the night.
        double d = std::abs(h - centre);
        d = std::min(d, 24.0 - d);
        return std::exp(-(d / width) * (d / width));
    };
    const double daytime = (hour >= 9.0 && hour < 16.0) ? 0.15 : 0.0;
    return 0.25 + daytime + 0.55 * bump(hour, 7.5, 1.0) + 1.35 * bump(hour, 19.0, 1.8);
}

}  // namespace

FeederModel feeder() {
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < 19; ++i) {
        nodes.push_back(Node{"N" + two_digit(i), i == 0, std::nullopt});
    }
    std::vector<Branch> branches;
    for (std::size_t b = 0; b < kSpans.size(); ++b) {
        const auto& s = kSpans[b];
        const double km = s.length_m / 1000.0;
        branches.push_back(Branch{"L" + two_digit(b + 1), s.from, s.to, s.cable.r_ohm_per_km * km,
                                  s.cable.x_ohm_per_km * km, s.cable.ampacity_a});
    }
    std::vector<Household> households;
    for (std::size_t h = 0; h < kHouseholdNodes.size(); ++h) {
        households.push_back(Household{"H" + two_digit(h + 1), kHouseholdNodes[h]});
    }
    return FeederModel("bundled-19-node", std::move(nodes), std::move(branches), std::move(households), 100.0, 230.0,
                       3);
}

BaselineProfiles baseline(const FeederModel& feeder, const Horizon& horizon) {
    BaselineProfiles out;
    const auto& hh = feeder.households();
    for (std::size_t h = 0; h < hh.size(); ++h) {
        BaselineLoadProfile p{hh[h].id, {}};
        const double scale = kHouseholdScale[h % kHouseholdScale.size()];
        for (std::size_t t = 0; t < horizon.steps; ++t) {
            const double hour = (static_cast<double>(t) + 0.5) * horizon.step_hours;
            // Four decimals, matching the CSV written by write_baseline_csv.
            p.power_kw.push_back(std::round(scale * winter_shape_kw(hour) * 1e4) / 1e4);
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace evhc::bundled
