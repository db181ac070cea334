// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rectlaw {

/// Base of every error thrown by the library. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based and counts the header row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input parsed but violates a data invariant (non-positive loss, bad n_params).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A curve names a model missing from the metadata, or a lookup misses.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Not enough data for the requested computation.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace rectlaw
