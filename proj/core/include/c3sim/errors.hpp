#pragma once

#include <stdexcept>
#include <string>

namespace c3sim {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed structural input: ragged matrices, width mismatches.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// An operation was invoked in a state that does not permit it.
class StateError : public Error {
 public:
  using Error::Error;
};

// Integer-mode decoding met an equation that contradicts recovered values.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

// A scheduler asked the engine for something the contract forbids.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Timestamps that cannot come from a causal trace (Tr < Tx).
class TraceCorruption : public Error {
 public:
  using Error::Error;
};

// The per-run simulated-event cap was hit.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace c3sim
