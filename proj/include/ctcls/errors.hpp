// Copyright 2026 The ctclassify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTCLS_ERRORS_HPP
#define CTCLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ctcls {

/// Process exit codes, one per error family.
enum class ExitCode : int {
  Ok = 0,
  Failure = 1,
  Config = 2,
  Data = 3,
  Training = 4,
  Io = 5,
};

/// Base of all errors raised by the pipeline. Carries the exit code the
/// CLI reports for its family.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode exit_code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& w) : Error(ExitCode::Config, w) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& w) : Error(ExitCode::Data, w) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& w) : Error(ExitCode::Training, w) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& w) : Error(ExitCode::Io, w) {}
};

// -- data family ------------------------------------------------------------

/// A dataset split is missing one of the expected class directories (or a
/// whole split directory is absent).
class MissingClassDirectory : public DataError {
 public:
  using DataError::DataError;
};

/// A class directory exists but holds zero readable images.
class EmptyClass : public DataError {
 public:
  using DataError::DataError;
};

/// The file could not be decoded as an image.
class DecodeError : public DataError {
 public:
  using DataError::DataError;
};

/// A requested split would leave one side of one class empty.
class DegenerateSplit : public DataError {
 public:
  using DataError::DataError;
};

class EmptyDataset : public DataError {
 public:
  using DataError::DataError;
};

/// Metric evaluation over zero samples.
class EmptyEvaluation : public DataError {
 public:
  using DataError::DataError;
};

/// A run is too short for the requested analysis.
class InsufficientHistory : public DataError {
 public:
  using DataError::DataError;
};

// -- config family ----------------------------------------------------------

/// The named node does not exist in the architecture; the message lists the
/// valid truncation points.
class UnknownNode : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A weights archive does not match the architecture (shape or missing
/// tensor).
class WeightsMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// -- training family --------------------------------------------------------

class ShapeMismatch : public TrainingError {
 public:
  using TrainingError::TrainingError;
};

/// The linear part of an affine transform is non-invertible.
class SingularTransform : public TrainingError {
 public:
  using TrainingError::TrainingError;
};

/// A NaN/Inf gradient aborted an optimizer step.
class NonFiniteGradient : public TrainingError {
 public:
  using TrainingError::TrainingError;
};

}  // namespace ctcls

#endif  // CTCLS_ERRORS_HPP
