#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eqins {

// Input matrix violated the antisymmetry precondition of vee().
struct NotSkewError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Matrix is singular beyond recovery (nearest-rotation projection).
struct DegenerateMatrixError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// 2x2 scale block of a SIM2(3) element is not invertible.
struct SingularScaleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Gain parameters outside the admissible region.
struct GainDomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Sample series shorter than the requested excitation window.
struct WindowTooLongError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A simulated state exceeded the blow-up guard; carries the offending step.
struct NumericalBlowupError : std::runtime_error {
  NumericalBlowupError(std::size_t step, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(step)),
        step_index(step) {}
  std::size_t step_index;
};

}  // namespace eqins
