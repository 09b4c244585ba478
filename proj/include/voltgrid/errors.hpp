#pragma once

#include <stdexcept>
#include <string>

namespace voltgrid {

/// Invalid grid topology or sensitivity data.
struct GridError : std::runtime_error {
    explicit GridError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Scenario file could not be parsed (CLI exit code 2).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Runtime failure inside a simulation: power-flow divergence, protocol
/// violation, barrier deadlock (CLI exit code 3).
struct SimulationError : std::runtime_error {
    explicit SimulationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace voltgrid
