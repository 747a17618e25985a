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

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace counterbot::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. A UTF-8 BOM on the first record is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input.
  std::optional<Row> next();

  /// 1-based physical line where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

/// Header row lookup. `require` throws Error(kMissingColumn) naming the column.
class Header {
 public:
  explicit Header(Row names) : names_(std::move(names)) {}

  std::optional<std::size_t> find(std::string_view column) const;
  std::size_t require(std::string_view column) const;
  const Row& names() const { return names_; }

 private:
  Row names_;
};

std::string escape_field(std::string_view field);
void write_row(std::ostream& out, const Row& row);

}  // namespace counterbot::csv
