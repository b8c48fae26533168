// Copyright 2026 The Bubble Audit Authors
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

// Line-delimited JSON and CSV helpers shared by the file formats in core.
// Private to the library.

#ifndef BUBBLE_AUDIT_SRC_RECORD_IO_H_
#define BUBBLE_AUDIT_SRC_RECORD_IO_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace bubble_audit::internal {

using Json = nlohmann::ordered_json;

// Calls `fn` for every non-blank line parsed as JSON. Stops at the first
// error; the returned status names the file and line.
absl::Status ForEachJsonLine(
    const std::string& path,
    const std::function<absl::Status(const Json&, int line_no)>& fn);

absl::Status WriteJsonLines(const std::string& path,
                            const std::vector<Json>& records);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

// Typed field access with errors that name the field.
absl::StatusOr<std::string> GetString(const Json& j, const char* key);
absl::StatusOr<int64_t> GetInt(const Json& j, const char* key);
absl::StatusOr<double> GetDouble(const Json& j, const char* key);
absl::StatusOr<bool> GetBool(const Json& j, const char* key);

// RFC 4180 parsing: quoted fields, doubled quotes, embedded newlines.
absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    std::string_view text);
std::string CsvEscape(std::string_view field);
std::string CsvLine(const std::vector<std::string>& fields);

// Fixed six-decimal rendering used by every CSV export.
std::string FormatDecimal(double value, int decimals = 6);

}  // namespace bubble_audit::internal

#endif  // BUBBLE_AUDIT_SRC_RECORD_IO_H_
