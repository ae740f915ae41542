// Copyright 2026 The stsvm Authors.
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

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace stsvm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

/// Stable error identifiers, used verbatim in CLI error records.
enum class ErrorCode {
  MissingFile,
  EmptyFile,
  RaggedRows,
  NonNumericCell,
  NonFiniteFeature,
  InvalidLabel,
  EmptyDataset,
  DimMismatch,
  LengthMismatch,
  SingleClass,
  NoPositiveTargets,
  NoNegativeTargets,
  InvalidKernelCount,
  InsufficientPositives,
  PsdViolation,
  SolverFailure,
  InvalidArgument,
  IoError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NoPositiveTargets: return "NoPositiveTargets";
    case ErrorCode::NoNegativeTargets: return "NoNegativeTargets";
    case ErrorCode::InvalidKernelCount: return "InvalidKernelCount";
    case ErrorCode::InsufficientPositives: return "InsufficientPositives";
    case ErrorCode::PsdViolation: return "PsdViolation";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace stsvm
