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

#include "fairshuffle/tabular.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "fairshuffle/csv.h"
#include "fairshuffle/status_macros.h"

namespace fairshuffle {

std::string_view ColumnKindName(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kIdentifier:
      return "identifier";
    case ColumnKind::kCategorical:
      return "categorical";
    case ColumnKind::kNumeric:
      return "numeric";
    case ColumnKind::kProtected:
      return "protected";
  }
  return "unknown";
}

std::optional<ColumnKind> ParseColumnKind(std::string_view name) {
  if (name == "identifier") return ColumnKind::kIdentifier;
  if (name == "categorical") return ColumnKind::kCategorical;
  if (name == "numeric") return ColumnKind::kNumeric;
  if (name == "protected") return ColumnKind::kProtected;
  return std::nullopt;
}

absl::StatusOr<Schema> Schema::Create(std::vector<Column> columns) {
  Schema schema;
  std::set<std::string> seen;
  int ids = 0;
  int protecteds = 0;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Column& c = columns[i];
    if (c.name.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema column ", i, " has an empty name"));
    }
    if (!seen.insert(c.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate schema column '", c.name, "'"));
    }
    if (c.kind == ColumnKind::kIdentifier) {
      ++ids;
      schema.id_index_ = i;
    } else if (c.kind == ColumnKind::kProtected) {
      ++protecteds;
      schema.protected_index_ = i;
    }
  }
  if (ids != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "schema needs exactly one identifier column, found ", ids));
  }
  if (protecteds != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "schema needs exactly one protected column, found ", protecteds));
  }
  schema.columns_ = std::move(columns);
  return schema;
}

std::optional<std::size_t> Schema::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<ColumnKind> Schema::KindOf(std::string_view name) const {
  auto i = IndexOf(name);
  if (!i) return std::nullopt;
  return columns_[*i].kind;
}

std::vector<std::string> Schema::AttributeNames() const {
  std::vector<std::string> names;
  for (const Column& c : columns_) {
    if (c.kind == ColumnKind::kCategorical || c.kind == ColumnKind::kNumeric) {
      names.push_back(c.name);
    }
  }
  return names;
}

absl::StatusOr<Table> Table::Create(Schema schema, std::vector<Row> rows) {
  std::set<std::string> ids;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row& row = rows[r];
    if (row.size() != schema.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", r + 1, " has ", row.size(), " values, schema has ",
          schema.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Column& col = schema.column(c);
      const bool numeric = col.kind == ColumnKind::kNumeric;
      if (numeric != std::holds_alternative<double>(row[c])) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", r + 1, ": column '", col.name,
                         "' expects a ", std::string(ColumnKindName(col.kind)), " value"));
      }
      if (numeric && !std::isfinite(std::get<double>(row[c]))) {
        return absl::InvalidArgumentError(absl::StrCat(
            "row ", r + 1, ": column '", col.name, "' is not finite"));
      }
      if (!numeric && std::get<std::string>(row[c]).empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "row ", r + 1, ": missing value in column '", col.name, "'"));
      }
    }
    const std::string& id = std::get<std::string>(row[schema.id_index()]);
    if (!ids.insert(id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r + 1, ": duplicate identifier '", id, "'"));
    }
  }
  return Table(std::move(schema), std::move(rows));
}

const std::string& Table::id(std::size_t row) const {
  return std::get<std::string>(rows_[row][schema_.id_index()]);
}

const std::string& Table::protected_value(std::size_t row) const {
  return std::get<std::string>(rows_[row][schema_.protected_index()]);
}

namespace {

absl::StatusOr<double> ParseDouble(const std::string& text) {
  double value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", text, "' is not a finite number"));
  }
  return value;
}

}  // namespace

absl::StatusOr<Table> ParseTable(std::string_view csv_text,
                                 const Schema& schema) {
  ASSIGN_OR_RETURN(std::vector<CsvRecord> records, ParseCsv(csv_text));
  if (records.empty()) {
    return absl::InvalidArgumentError("input has no header row");
  }
  const CsvRecord& header = records.front();
  // header position -> schema position
  std::vector<std::size_t> slot(header.size());
  std::vector<bool> filled(schema.size(), false);
  for (std::size_t h = 0; h < header.size(); ++h) {
    auto idx = schema.IndexOf(header[h]);
    if (!idx) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown column '", header[h], "' in header"));
    }
    if (filled[*idx]) {
      return absl::InvalidArgumentError(
          absl::StrCat("column '", header[h], "' repeated in header"));
    }
    filled[*idx] = true;
    slot[h] = *idx;
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!filled[c]) {
      return absl::InvalidArgumentError(absl::StrCat(
          "schema column '", schema.column(c).name, "' missing from header"));
    }
  }

  std::vector<Row> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord& record = records[r];
    if (record.size() == 1 && record[0].empty()) continue;  // blank line
    if (record.size() != header.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("data row ", r, " has ", record.size(),
                       " fields, header has ", header.size()));
    }
    Row row(schema.size());
    for (std::size_t h = 0; h < record.size(); ++h) {
      const Column& col = schema.column(slot[h]);
      if (record[h].empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "data row ", r, ": missing value in column '", col.name, "'"));
      }
      if (col.kind == ColumnKind::kNumeric) {
        auto value = ParseDouble(record[h]);
        if (!value.ok()) {
          return absl::InvalidArgumentError(
              absl::StrCat("data row ", r, ", column '", col.name,
                           "': ", std::string(value.status().message())));
        }
        row[slot[h]] = *value;
      } else {
        row[slot[h]] = record[h];
      }
    }
    rows.push_back(std::move(row));
  }
  return Table::Create(schema, std::move(rows));
}

absl::StatusOr<Table> LoadTable(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseTable(buffer.str(), schema);
}

std::string FormatNumber(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string FormatTable(const Table& table) {
  std::vector<CsvRecord> records;
  records.reserve(table.n() + 1);
  CsvRecord header;
  for (const Column& c : table.schema().columns()) header.push_back(c.name);
  records.push_back(std::move(header));
  for (const Row& row : table.rows()) {
    CsvRecord record;
    record.reserve(row.size());
    for (const Value& v : row) {
      if (const double* d = std::get_if<double>(&v)) {
        record.push_back(FormatNumber(*d));
      } else {
        record.push_back(std::get<std::string>(v));
      }
    }
    records.push_back(std::move(record));
  }
  return FormatCsv(records);
}

std::vector<std::size_t> EncodedTable::ColumnsOf(
    std::string_view attribute) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].attribute == attribute) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> EncodedTable::ColumnIndex(
    std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> EncodedTable::RowOf(std::string_view id) const {
  auto it = row_index_.find(std::string(id));
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

bool EncodedTable::SameData(const EncodedTable& other) const {
  return schema == other.schema && column_map == other.column_map &&
         columns == other.columns && ids == other.ids && tags == other.tags &&
         matrix == other.matrix;
}

void EncodedTable::RebuildIndex() {
  row_index_.clear();
  for (std::size_t i = 0; i < ids.size(); ++i) row_index_.emplace(ids[i], i);
}

EncodedTable EncodeOneHot(const Table& table) {
  const Schema& schema = table.schema();
  EncodedTable out;
  out.schema = schema;

  // Level vocabularies, sorted for a row-order independent layout.
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const Column& col = schema.column(c);
    if (col.kind != ColumnKind::kCategorical) continue;
    std::set<std::string> levels;
    for (const Row& row : table.rows()) {
      levels.insert(std::get<std::string>(row[c]));
    }
    if (levels.size() == 1) {
      out.warnings.push_back(
          absl::StrCat("categorical column '", col.name,
                       "' has a single observed level; encoded as one "
                       "constant indicator"));
    }
    out.column_map[col.name] =
        std::vector<std::string>(levels.begin(), levels.end());
  }

  for (std::size_t c = 0; c < schema.size(); ++c) {
    const Column& col = schema.column(c);
    if (col.kind == ColumnKind::kNumeric) {
      out.columns.push_back({col.name, col.name, std::nullopt});
    } else if (col.kind == ColumnKind::kCategorical) {
      for (const std::string& level : out.column_map[col.name]) {
        out.columns.push_back(
            {absl::StrCat(col.name, "=", level), col.name, level});
      }
    }
  }

  out.ids.reserve(table.n());
  out.tags.reserve(table.n());
  out.matrix.reserve(table.n());
  for (std::size_t r = 0; r < table.n(); ++r) {
    const Row& row = table.rows()[r];
    out.ids.push_back(table.id(r));
    out.tags.push_back(table.protected_value(r));
    std::vector<double> values;
    values.reserve(out.columns.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const Column& col = schema.column(c);
      if (col.kind == ColumnKind::kNumeric) {
        values.push_back(std::get<double>(row[c]));
      } else if (col.kind == ColumnKind::kCategorical) {
        const std::string& v = std::get<std::string>(row[c]);
        for (const std::string& level : out.column_map[col.name]) {
          values.push_back(level == v ? 1.0 : 0.0);
        }
      }
    }
    out.matrix.push_back(std::move(values));
  }
  out.RebuildIndex();
  return out;
}

absl::StatusOr<Table> DecodeOneHot(const EncodedTable& encoded) {
  const Schema& schema = encoded.schema;
  std::vector<Row> rows;
  rows.reserve(encoded.n());
  for (std::size_t r = 0; r < encoded.n(); ++r) {
    const std::vector<double>& values = encoded.matrix[r];
    if (values.size() != encoded.columns.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row '", encoded.ids[r], "' has ", values.size(),
          " encoded values, expected ", encoded.columns.size()));
    }
    Row row(schema.size());
    std::size_t m = 0;
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const Column& col = schema.column(c);
      switch (col.kind) {
        case ColumnKind::kIdentifier:
          row[c] = encoded.ids[r];
          break;
        case ColumnKind::kProtected:
          row[c] = encoded.tags[r];
          break;
        case ColumnKind::kNumeric:
          row[c] = values[m++];
          break;
        case ColumnKind::kCategorical: {
          const auto& levels = encoded.column_map.at(col.name);
          int set = 0;
          std::size_t chosen = 0;
          for (std::size_t l = 0; l < levels.size(); ++l) {
            const double v = values[m + l];
            if (v == 1.0) {
              ++set;
              chosen = l;
            } else if (v != 0.0) {
              set = -1;
              break;
            }
          }
          if (set != 1) {
            return absl::InvalidArgumentError(absl::StrCat(
                "row '", encoded.ids[r], "': attribute '", col.name,
                "' does not have exactly one indicator set"));
          }
          row[c] = levels[chosen];
          m += levels.size();
          break;
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return Table::Create(schema, std::move(rows));
}

}  // namespace fairshuffle
