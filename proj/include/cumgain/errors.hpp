#pragma once

// Error categories surfaced across file and configuration boundaries. The
// command-line layer maps each to a stable machine-parsable code; in-library
// contract violations use the std exception types directly.

#include <stdexcept>
#include <string>

namespace cumgain {

// A configuration value failed validation; the message names the field.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& message) : std::runtime_error(message) {}
};

// Input text could not be parsed; the message carries line context.
struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& message) : std::runtime_error(message) {}
};

// Stored artifacts disagree with each other (e.g. a trace replayed against a
// scenario it was not produced from, or a corrupt trace file).
struct integrity_error : std::runtime_error {
  explicit integrity_error(const std::string& message) : std::runtime_error(message) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace cumgain
