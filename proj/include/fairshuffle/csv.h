// Copyright 2026 The Fairshuffle Authors
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

#ifndef FAIRSHUFFLE_CSV_H_
#define FAIRSHUFFLE_CSV_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace fairshuffle {

using CsvRecord = std::vector<std::string>;

// Parses RFC 4180 text: comma separated, optional double-quoted fields with
// "" as an escaped quote, CRLF or LF record terminators. A trailing newline
// does not produce an empty record.
absl::StatusOr<std::vector<CsvRecord>> ParseCsv(std::string_view text);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string EscapeCsvField(std::string_view field);

// Writes records with LF terminators.
std::string FormatCsv(const std::vector<CsvRecord>& records);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_CSV_H_
