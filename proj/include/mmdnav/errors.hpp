#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mmdnav {

// Malformed or inconsistent configuration (bad mixture weights, schema errors).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough samples to estimate a statistic.
class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PlanningError : public std::runtime_error {
 public:
  explicit PlanningError(const std::string& what, std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(step ? what + " (step " + std::to_string(*step) + ")" : what), step_(step) {}

  std::optional<std::size_t> step() const { return step_; }

 private:
  std::optional<std::size_t> step_;
};

}  // namespace mmdnav
