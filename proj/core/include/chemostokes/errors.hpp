#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace chemostokes {

/// A field value that is NaN or infinite reached an operation that requires finite data.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (flat index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A time step that would break a discrete invariant (positivity, projection, ...).
class StepRejected : public std::runtime_error {
 public:
  StepRejected(std::string stage, const std::string& diagnosis, double worst = 0.0,
               std::size_t location = 0)
      : std::runtime_error(stage + ": " + diagnosis),
        stage_(std::move(stage)),
        worst_(worst),
        location_(location) {}
  const std::string& stage() const noexcept { return stage_; }
  double worst_value() const noexcept { return worst_; }
  std::size_t location() const noexcept { return location_; }

 private:
  std::string stage_;
  double worst_;
  std::size_t location_;
};

/// Invalid configuration text or parameter values. line is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace chemostokes
