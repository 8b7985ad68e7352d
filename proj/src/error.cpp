// Copyright 2026 The hbench Authors. All Rights Reserved.
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

#include "hbench/error.hpp"

namespace hbench {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kProjectiveDivergence: return "ProjectiveDivergence";
    case ErrorCode::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
    case ErrorCode::kDegenerateQuad: return "DegenerateQuad";
    case ErrorCode::kMarginViolation: return "MarginViolation";
    case ErrorCode::kInsufficientCorrespondences: return "InsufficientCorrespondences";
    case ErrorCode::kNoModelFound: return "NoModelFound";
    case ErrorCode::kEstimationFailed: return "EstimationFailed";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kTrailingData: return "TrailingData";
    case ErrorCode::kDuplicateName: return "DuplicateName";
    case ErrorCode::kWeightManifestMismatch: return "WeightManifestMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace hbench
