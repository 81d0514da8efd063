// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mrflow {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of a vector operation do not share a layout.
class ConformanceError : public Error {
 public:
  using Error::Error;
};

/// A collective or exchange protocol was used out of order.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Point-to-point or collective transport failed (including a peer task
/// aborting while others wait on it).
class CommunicationError : public Error {
 public:
  using Error::Error;
};

/// A physical quantity left its admissible domain (e.g. nonpositive
/// internal energy in the equation of state).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration or argument.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unrecoverable integrator or algebraic solver failure.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A dense cell block of the Newton matrix could not be factored.
class FactorizationError : public SolverError {
 public:
  FactorizationError(const std::string& what, std::size_t block)
      : SolverError(what), block_(block) {}
  std::size_t block() const noexcept { return block_; }

 private:
  std::size_t block_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrflow
