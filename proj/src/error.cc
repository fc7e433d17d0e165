// Copyright 2026 The FairRank Authors.
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

#include "fairrank/error.h"

namespace fairrank {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kEmptyPopulation: return "EmptyPopulation";
    case ErrorCode::kMissingLabel: return "MissingLabel";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kInvalidScore: return "InvalidScore";
    case ErrorCode::kZeroBaseProportion: return "ZeroBaseProportion";
    case ErrorCode::kInvalidRank: return "InvalidRank";
    case ErrorCode::kDegenerateRatio: return "DegenerateRatio";
    case ErrorCode::kUnknownCandidate: return "UnknownCandidate";
    case ErrorCode::kInsufficientCandidates: return "InsufficientCandidates";
    case ErrorCode::kUnknownMatrix: return "UnknownMatrix";
    case ErrorCode::kInvalidMatrix: return "InvalidMatrix";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fairrank
