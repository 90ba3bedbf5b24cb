#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <stdexcept>
#include <string>

namespace xrbench {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sample or input violates its construction invariants (zero elapsed time, etc).
class InvalidSample : public Error {
 public:
  using Error::Error;
};

// Wrong number of inputs (gate needs exactly five samples, empty sequences).
class ArityError : public Error {
 public:
  using Error::Error;
};

// Value outside the mathematical domain of an operation (log of p <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Schema or range violation in user-provided data; names the offending field.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DuplicateKeyError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Bench output that no supported parser understands. Carries the first unmatched line.
class ParseFailure : public Error {
 public:
  ParseFailure(const std::string& what, std::string line)
      : Error(what), line_(std::move(line)) {}
  const std::string& line() const noexcept { return line_; }

 private:
  std::string line_;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Memory sampler could not take a single reading.
class NoSampleError : public Error {
 public:
  using Error::Error;
};

class ProbeError : public Error {
 public:
  using Error::Error;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

}  // namespace xrbench
