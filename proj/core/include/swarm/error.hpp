#pragma once

#include <stdexcept>
#include <string>

namespace swarm {

/// Malformed configuration or input file; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or a solver that cannot make progress; exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dataset or model file that cannot be decoded. `section()` names the
/// part of the file where decoding stopped.
class FormatError : public std::runtime_error {
public:
  FormatError(std::string section, const std::string& what)
      : std::runtime_error(section + ": " + what), section_(std::move(section)) {}

  const std::string& section() const noexcept { return section_; }

private:
  std::string section_;
};

}  // namespace swarm
