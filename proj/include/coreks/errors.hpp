#pragma once

#include <stdexcept>
#include <string>

namespace coreks {

// Precondition / contract violations (caller bug).
struct contract_error : std::logic_error {
  explicit contract_error(const std::string& msg) : std::logic_error(msg) {}
};

// Invalid configuration values (bad user input).
struct config_error : std::invalid_argument {
  explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed container files; offset is the byte position of the problem.
struct format_error : std::runtime_error {
  size_t offset;
  format_error(const std::string& msg, size_t off)
      : std::runtime_error(msg + " (byte offset " + std::to_string(off) + ")"), offset(off) {}
};

// Solver produced non-finite values; step names the update that blew up.
struct divergence_error : std::runtime_error {
  std::string step;
  divergence_error(const std::string& which, int iteration)
      : std::runtime_error("non-finite values in " + which + " at iteration " +
                           std::to_string(iteration)),
        step(which) {}
};

// Statistical routine fed an input with no usable variance.
struct degenerate_input_error : std::invalid_argument {
  explicit degenerate_input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

struct calibration_error : std::runtime_error {
  explicit calibration_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace coreks
