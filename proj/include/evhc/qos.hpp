#pragma once

#include <span>
#include <string>
#include <vector>

namespace evhc {

/// Energy-based quality of service of one customer: e_network_aware / e_baseline.
/// Requires e_baseline > 0 and 0 <= e_network_aware <= e_baseline.
double qos_individual(double e_baseline_kwh, double e_network_aware_kwh);

struct EnergyPair {
    double baseline_kwh = 0.0;
    double network_aware_kwh = 0.0;
};

/// Fleet QoS: sum of network-aware energy over sum of baseline energy.
/// Pairs with zero baseline contribute nothing; throws if every baseline is zero.
double qos_aggregated(std::span<const EnergyPair> pairs);

struct CustomerQos {
    std::string household;
    std::string node;
    double e_baseline_kwh = 0.0;
    double e_network_aware_kwh = 0.0;
    double qos = 1.0;
};

struct QosReport {
    std::vector<CustomerQos> customers;   // customers with a positive baseline only
    std::vector<std::string> excluded;    // zero-baseline customers
    double aggregated = 1.0;
    double minimum = 1.0;
    std::string minimum_customer;
    double maximum = 1.0;
};

struct CustomerEnergy {
    std::string household;
    std::string node;
    EnergyPair energy;
};

QosReport build_qos_report(std::span<const CustomerEnergy> customers);

/// customer, node, E, E_na, QoS rows followed by aggregated and minimum lines.
std::string export_qos(const QosReport& report);

}  // namespace evhc
