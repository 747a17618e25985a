// Copyright 2026 The Counterbot Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace counterbot {

/// Machine-readable failure categories. The string form (see to_string) is
/// what the HTTP APIs put in their error bodies.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParse,
  kMissingColumn,
  kDuplicateHandle,
  kUnknownLabel,
  kSingleClass,
  kEmptyClass,
  kDimensionMismatch,
  kNanFeature,
  kOutOfRange,
  kPrecondition,
  kTransport,
  kHttpStatus,
  kMalformedResponse,
  kMissingAttribute,
  kTimeout,
  kScorerFailure,
  kInvalidTransition,
  kNotFound,
  kTooLong,
  kEmptyText,
  kUnauthorized,
  kStorage,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A scorer family failed while building a feature vector. `family()` names
/// the family ("toxicity", "hate", "sentiment").
class FeatureError : public Error {
 public:
  FeatureError(std::string family, ErrorCode cause, const std::string& message)
      : Error(cause, family + ": " + message), family_(std::move(family)) {}

  const std::string& family() const noexcept { return family_; }

 private:
  std::string family_;
};

}  // namespace counterbot
