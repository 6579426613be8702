#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace arsched {

/// Simulation time in integer seconds.
using Time = std::int64_t;

/// Zero-based processing element index.
using PeId = std::uint32_t;

/// Stands for "no reservation bounds this rectangle on the right".
/// Orders after every finite time.
inline constexpr Time kOpenEnd = std::numeric_limits<Time>::max();

struct ClusterConfig {
  std::uint32_t n_pes = 1024;
};

// Error hierarchy. InvariantError and its children indicate a bug in the
// caller or the engine; ConfigError is user input.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

class OverlapError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

class NotPresentError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

class PreconditionError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

}  // namespace arsched
