#include "evhc/qos.hpp"

#include "evhc/errors.hpp"
#include "evhc/table.hpp"

#include <algorithm>
#include <stdexcept>

namespace evhc {

namespace {

// Round-off between two energy sums of the same trajectory stays far below this.
constexpr double kRelativeSlack = 1e-9;

}  // namespace

double qos_individual(double e_baseline_kwh, double e_network_aware_kwh) {
    if (!(e_baseline_kwh > 0.0)) {
        throw std::invalid_argument("QoS undefined for a customer without baseline energy");
    }
    if (e_network_aware_kwh < 0.0 || e_network_aware_kwh > e_baseline_kwh * (1.0 + kRelativeSlack)) {
        throw std::invalid_argument("network-aware energy " + format_shortest(e_network_aware_kwh) +
                                    " kWh outside [0, " + format_shortest(e_baseline_kwh) + "]");
    }
    return std::min(1.0, e_network_aware_kwh / e_baseline_kwh);
}

double qos_aggregated(std::span<const EnergyPair> pairs) {
    double sum_e = 0.0;
    double sum_na = 0.0;
    for (const auto& p : pairs) {
        if (p.baseline_kwh > 0.0) {
            sum_e += p.baseline_kwh;
            sum_na += p.network_aware_kwh;
        }
    }
    if (!(sum_e > 0.0)) {
        throw std::invalid_argument("aggregated QoS undefined: no customer has baseline energy");
    }
    return std::min(1.0, sum_na / sum_e);
}

QosReport build_qos_report(std::span<const CustomerEnergy> customers) {
    QosReport r;
    std::vector<EnergyPair> pairs;
    bool first = true;
    for (const auto& c : customers) {
        if (!(c.energy.baseline_kwh > 0.0)) {
            r.excluded.push_back(c.household);
            continue;
        }
        const double q = qos_individual(c.energy.baseline_kwh, c.energy.network_aware_kwh);
        r.customers.push_back({c.household, c.node, c.energy.baseline_kwh, c.energy.network_aware_kwh, q});
        pairs.push_back(c.energy);
        if (first || q < r.minimum) {
            r.minimum = q;
            r.minimum_customer = c.household;
        }
        r.maximum = first ? q : std::max(r.maximum, q);
        first = false;
    }
    r.aggregated = qos_aggregated(pairs);
    return r;
}

std::string export_qos(const QosReport& report) {
    CsvWriter out({"customer", "node", "e_baseline_kwh", "e_network_aware_kwh", "qos"});
    for (const auto& c : report.customers) {
        out.cell(c.household).cell(c.node).cell(c.e_baseline_kwh, 6).cell(c.e_network_aware_kwh, 6).cell(c.qos, 6);
        out.end_row();
    }
    out.cell("aggregated").cell("").cell("").cell("").cell(report.aggregated, 6);
    out.end_row();
    out.cell("minimum").cell(report.minimum_customer).cell("").cell("").cell(report.minimum, 6);
    out.end_row();
    return out.str();
}

}  // namespace evhc
