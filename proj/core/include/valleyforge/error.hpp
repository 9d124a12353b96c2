// Copyright 2026 The ValleyForge Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VALLEYFORGE_ERROR_HPP_
#define VALLEYFORGE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace valleyforge {

enum class ErrorCode {
  // dataio
  MissingColumn,
  EmptyFile,
  UnmappableCategory,
  AllRowsDropped,
  DimensionMismatch,
  DegenerateSplit,
  BadShape,
  // features
  TooFewRows,
  WeightOutOfRange,
  BadK,
  // sev_eb
  PopulationTooSmall,
  NonFiniteInput,
  NonFiniteFitness,
  UnknownFunction,
  // network
  ShapeMismatch,
  StaleTrace,
  EmptyTable,
  // metrics
  LengthMismatch,
  SingleClass,
  // pipeline
  ConfigInvalid,
  SchemaMismatch,
  VersionMismatch,
  CorruptArtifact,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// CLI prints it as `ERROR <code>: <message>`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace valleyforge

#endif  // VALLEYFORGE_ERROR_HPP_
