/*
 * Copyright 2026 The mistriage Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mistriage::csv {

struct Row {
  std::vector<std::string> fields;
  // 1-based physical line on which the row starts.
  std::size_t line = 0;
  // Set when the row ended inside an open quoted field.
  bool unterminated_quote = false;
};

// RFC 4180 reader: quoted fields may contain delimiters, doubled quotes and
// line breaks. CRLF and LF line endings are both accepted. Blank lines are
// skipped.
std::vector<Row> parse(std::string_view text, char delimiter = ',');

// Quotes a field only when it contains the delimiter, a quote or a newline.
std::string escape(std::string_view field, char delimiter = ',');

std::string format_row(const std::vector<std::string>& fields,
                       char delimiter = ',');

}  // namespace mistriage::csv
