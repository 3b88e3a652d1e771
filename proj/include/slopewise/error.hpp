// Copyright 2026 The Slopewise Authors
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

#ifndef SLOPEWISE_ERROR_HPP_
#define SLOPEWISE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace slopewise {

enum class ErrorCode {
  kInvalidArgument,
  kYawAtBranchCut,
  kNonMonotonicTime,
  kOutOfBounds,
  kImplausibleGravityNorm,
  kMalformedRow,
  kWindowTooShort,
  kNoDominantAxis,
  kIllConditioned,
  kInsufficientSamples,
  kNonFinitePower,
  kEndpointMismatch,
  kNoPath,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kYawAtBranchCut: return "YawAtBranchCut";
    case ErrorCode::kNonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kImplausibleGravityNorm: return "ImplausibleGravityNorm";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kWindowTooShort: return "WindowTooShort";
    case ErrorCode::kNoDominantAxis: return "NoDominantAxis";
    case ErrorCode::kIllConditioned: return "IllConditioned";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kNonFinitePower: return "NonFinitePower";
    case ErrorCode::kEndpointMismatch: return "EndpointMismatch";
    case ErrorCode::kNoPath: return "NoPath";
  }
  return "Unknown";
}

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse errors carry the offending 1-based input line.
class LineError : public Error {
 public:
  LineError(ErrorCode code, std::size_t line, const std::string& what)
      : Error(code, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace slopewise

#endif  // SLOPEWISE_ERROR_HPP_
