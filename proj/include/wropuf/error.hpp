#pragma once

#include <stdexcept>
#include <string>

namespace wropuf {

// Invalid parameter set or campaign configuration. `field()` names the
// offending setting so front ends can report it.
class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string field, const std::string &what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string &field() const noexcept { return field_; }

private:
  std::string field_;
};

// Bad argument to an otherwise pure operation (length mismatch, empty set...).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Voltage outside the range where the linear period model stays positive.
class ModelRangeError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A waveform was queried past the end of its realized toggle sequence.
class TraceExhausted : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

// Malformed or incomplete dataset file.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace wropuf
