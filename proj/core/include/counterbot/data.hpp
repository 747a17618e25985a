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

#include <filesystem>
#include <string_view>

namespace counterbot {

/// Directory holding the bundled lexicons, name table and demo corpora.
/// Resolution order: $COUNTERBOT_DATA_DIR, the source tree's core/data, the
/// installed share/counterbot directory.
std::filesystem::path data_dir();

/// data_dir() / name; throws Error(kIo) when the file does not exist.
std::filesystem::path data_file(std::string_view name);

}  // namespace counterbot
