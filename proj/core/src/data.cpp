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

#include "counterbot/data.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "counterbot/error.hpp"

namespace counterbot {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("COUNTERBOT_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
#ifdef COUNTERBOT_SOURCE_DATA_DIR
  if (std::filesystem::exists(COUNTERBOT_SOURCE_DATA_DIR)) return COUNTERBOT_SOURCE_DATA_DIR;
#endif
#ifdef COUNTERBOT_INSTALL_DATA_DIR
  return COUNTERBOT_INSTALL_DATA_DIR;
#else
  return "data";
#endif
}

std::filesystem::path data_file(std::string_view name) {
  auto path = data_dir() / name;
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIo, fmt::format("bundled data file '{}' not found", path.string()));
  }
  return path;
}

}  // namespace counterbot
