#pragma once

#include <stdexcept>
#include <string>

namespace evhc {

/// Malformed or inconsistent input (feeder document, fleet file, scenario file).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure raised while simulating an otherwise valid configuration.
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evhc
