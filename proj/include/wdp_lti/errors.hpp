//
// Copyright 2026 The wdp-lti Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef WDP_LTI_ERRORS_HPP_
#define WDP_LTI_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace wdp_lti {

enum class ErrorCode {
  kDimensionMismatch,
  kNotSymmetric,
  kNotPsd,
  kSingularCovariance,
  kUnsupportedEpsilon,
  kZeroNoise,
  kInvalidArgument,
  kPublicStateMismatch,
  kInvalidConfig,
  kIo,
};

constexpr std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kNotSymmetric:
      return "NotSymmetric";
    case ErrorCode::kNotPsd:
      return "NotPsd";
    case ErrorCode::kSingularCovariance:
      return "SingularCovariance";
    case ErrorCode::kUnsupportedEpsilon:
      return "UnsupportedEpsilon";
    case ErrorCode::kZeroNoise:
      return "ZeroNoise";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kPublicStateMismatch:
      return "PublicStateMismatch";
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kIo:
      return "Io";
  }
  return "Unknown";
}

// All recoverable failures in the library are reported through this type.
// The code is what callers branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wdp_lti

#endif  // WDP_LTI_ERRORS_HPP_
