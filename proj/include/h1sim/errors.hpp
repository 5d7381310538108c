#pragma once

#include <stdexcept>
#include <string>

namespace h1sim {

// Bad user input: configuration files, CLI values, out-of-range parameters.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The solver produced something unusable (NaN blowup, non-converged run).
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Post-processing cannot extract a meaningful result from otherwise valid data
// (multi-mode contamination, probe on a nodal plane, empty aperture, ...).
struct analysis_error : std::runtime_error {
  explicit analysis_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace h1sim
