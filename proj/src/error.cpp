// Copyright 2026 The FuzzSplore Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fuzzsplore/error.hpp"

namespace fuzzsplore {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingId: return "MissingId";
    case ErrorKind::MalformedField: return "MalformedField";
    case ErrorKind::ParentNotSmaller: return "ParentNotSmaller";
    case ErrorKind::EmptyQueue: return "EmptyQueue";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::ExecutorFailure: return "ExecutorFailure";
    case ErrorKind::CoverageMissing: return "CoverageMissing";
    case ErrorKind::CoverageMalformed: return "CoverageMalformed";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::MapSizeMismatch: return "MapSizeMismatch";
    case ErrorKind::ExecutorThresholdExceeded: return "ExecutorThresholdExceeded";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::UnknownFuzzer: return "UnknownFuzzer";
    case ErrorKind::ArtifactMalformed: return "ArtifactMalformed";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace fuzzsplore
