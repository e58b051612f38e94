#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fixpoint {

// Malformed arguments: dimension mismatches, out-of-range parameters,
// non-finite inputs.
struct argument_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A schedule or scheme precondition failed; the message carries the verdict
// report. CLI maps this to exit code 1.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterate left the tracked region or went non-finite.
struct divergence_error : std::runtime_error {
  std::size_t step;
  divergence_error(const std::string& msg, std::size_t step_)
      : std::runtime_error(msg), step(step_) {}
};

// Config files, trace files, and other IO problems. CLI maps this to exit
// code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The projection oracle could not certify a target (infeasible witness,
// non-convergence, or cross-check disagreement).
struct oracle_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fixpoint
