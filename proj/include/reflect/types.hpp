#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace reflect {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: files, tokens, shapes. CLI exit code 2.
struct DataError : Error {
  using Error::Error;
};

struct ParseError : DataError {
  using DataError::DataError;
};

struct DimensionError : DataError {
  using DataError::DataError;
};

struct UnknownTokenError : DataError {
  explicit UnknownTokenError(std::string t)
      : DataError("unknown token: " + t), token(std::move(t)) {}
  std::string token;
};

// A side label (M/F) was required but is not available.
struct KnowledgeError : DataError {
  using DataError::DataError;
};

// Numeric failures: degenerate geometry, divergence. CLI exit code 3.
struct NumericError : Error {
  using Error::Error;
};

struct ZeroNormError : NumericError {
  using NumericError::NumericError;
};

struct DegenerateMirrorError : NumericError {
  using NumericError::NumericError;
};

}  // namespace reflect
