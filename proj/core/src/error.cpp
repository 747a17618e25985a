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

#include "counterbot/error.hpp"

namespace counterbot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kMissingColumn: return "missing_column";
    case ErrorCode::kDuplicateHandle: return "duplicate_handle";
    case ErrorCode::kUnknownLabel: return "unknown_label";
    case ErrorCode::kSingleClass: return "single_class";
    case ErrorCode::kEmptyClass: return "empty_class";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kNanFeature: return "nan_feature";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kHttpStatus: return "http_status";
    case ErrorCode::kMalformedResponse: return "malformed_response";
    case ErrorCode::kMissingAttribute: return "missing_attribute";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kScorerFailure: return "scorer_failure";
    case ErrorCode::kInvalidTransition: return "invalid_transition";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kTooLong: return "too_long";
    case ErrorCode::kEmptyText: return "empty_text";
    case ErrorCode::kUnauthorized: return "unauthorized";
    case ErrorCode::kStorage: return "storage_error";
  }
  return "unknown";
}

}  // namespace counterbot
