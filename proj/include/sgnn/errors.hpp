#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sgnn {

// Base for everything the engine throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flags, bad config values, empty grids. CLI exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Mismatched dimensions between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Anything wrong with input data. CLI exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

enum class ValidationKind {
  node_out_of_range,
  feature_rows_mismatch,
  label_count_mismatch,
  label_out_of_range,
  mask_overlap,
  mask_size_mismatch,
};

const char* to_string(ValidationKind kind);

class ValidationError : public DataError {
 public:
  ValidationError(ValidationKind kind, std::int64_t node, const std::string& what)
      : DataError(what), kind_(kind), node_(node) {}

  ValidationKind kind() const noexcept { return kind_; }
  // Offending node index, or -1 when the error is not tied to one node.
  std::int64_t node() const noexcept { return node_; }

 private:
  ValidationKind kind_;
  std::int64_t node_;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : DataError("line " + std::to_string(line) + ": " + msg), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class StatsMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class ChecksumMismatchError : public DataError {
 public:
  using DataError::DataError;
};

// Non-finite value produced inside the engine. CLI exit code 3.
class NumericFault : public Error {
 public:
  using Error::Error;
};

// A loss was requested over an empty node set.
class EmptyMaskError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgnn
