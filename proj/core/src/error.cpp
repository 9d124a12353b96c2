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

#include "valleyforge/error.hpp"

namespace valleyforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::UnmappableCategory: return "UnmappableCategory";
    case ErrorCode::AllRowsDropped: return "AllRowsDropped";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::PopulationTooSmall: return "PopulationTooSmall";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonFiniteFitness: return "NonFiniteFitness";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::StaleTrace: return "StaleTrace";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptArtifact: return "CorruptArtifact";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace valleyforge
