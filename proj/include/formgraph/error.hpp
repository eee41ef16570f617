#pragma once

#include <stdexcept>
#include <string>

namespace formgraph {

// Error families map onto CLI exit codes: usage 1, data 2, numeric 3.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public NumericError {
 public:
  using NumericError::NumericError;
};

class UnsupportedBeta : public UsageError {
 public:
  using UsageError::UsageError;
};

class MissingFile : public DataError {
 public:
  using DataError::DataError;
};

class MalformedAnnotation : public DataError {
 public:
  using DataError::DataError;
};

class VersionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class SchemaMismatch : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace formgraph
