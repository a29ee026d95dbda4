// Copyright 2026 The HRC Co-Assembly Authors
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

#ifndef HRC_ERROR_HPP_
#define HRC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hrc {

// Numeric values are mirrored by hrc_status in hrc.h.
enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kNoAvoidCapsule = 3,
  kInconsistentObservation = 4,
  kInadmissibleEvent = 5,
  kUnreachableGoal = 6,
  kInfeasiblePlan = 7,
  kDivergence = 8,
  kTimeout = 9,
  kIo = 10,
  kParse = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hrc

#endif  // HRC_ERROR_HPP_
