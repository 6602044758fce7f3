// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace tchgr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameters or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A value lies outside its admissible domain.
class RangeError : public Error {
 public:
  using Error::Error;
};

// An API was called in a way its contract forbids.
class UsageError : public Error {
 public:
  using Error::Error;
};

// An object was used in the wrong lifecycle state.
class StateError : public Error {
 public:
  using Error::Error;
};

// Inconsistent input data (labels, annotations, subject sets).
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Non-finite values encountered during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tchgr
