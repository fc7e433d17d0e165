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

#ifndef FAIRRANK_ERROR_H_
#define FAIRRANK_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairrank {

enum class ErrorCode {
  kInvalidLabel,
  kEmptyPopulation,
  kMissingLabel,
  kDuplicateId,
  kInvalidScore,
  kZeroBaseProportion,
  kInvalidRank,
  kDegenerateRatio,
  kUnknownCandidate,
  kInsufficientCandidates,
  kUnknownMatrix,
  kInvalidMatrix,
  kInvalidDistribution,
  kInvalidConfig,
  kParseError,
  kUnknownColumn,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every library failure is reported through this exception. The code lets
// callers (and tests) distinguish failure kinds without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairrank

#endif  // FAIRRANK_ERROR_H_
