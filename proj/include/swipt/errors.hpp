#pragma once

#include <stdexcept>
#include <string>

namespace swipt {

/// Raised when a config file or flag value cannot be parsed. `line` is
/// 1-based, or 0 when the problem is not tied to a particular line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// The requested harvested-energy target exceeds what any policy in the
/// family can deliver.
class InfeasibleTarget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive enumeration would exceed the configured work bound.
class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dominance comparison needs the optimal curve outside its energy span.
class ExtrapolationRequired : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swipt
