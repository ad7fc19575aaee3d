#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vibronic {

/// Invalid configuration or arguments. Carries the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// The numerics could not deliver what was asked (shortfalls, divergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LevelShortfall : public NumericalError {
 public:
  LevelShortfall(std::size_t requested, std::size_t found)
      : NumericalError("requested " + std::to_string(requested) +
                       " bound levels but only " + std::to_string(found) +
                       " were found"),
        requested_(requested),
        found_(found) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t found() const noexcept { return found_; }

 private:
  std::size_t requested_;
  std::size_t found_;
};

class PropagationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two wavefunctions (or a wavefunction and an operator) live on different grids.
class GridMismatch : public std::invalid_argument {
 public:
  GridMismatch() : std::invalid_argument("grid mismatch") {}
};

}  // namespace vibronic
