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

#ifndef FAIRSHUFFLE_TABULAR_H_
#define FAIRSHUFFLE_TABULAR_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"

namespace fairshuffle {

enum class ColumnKind { kIdentifier, kCategorical, kNumeric, kProtected };

std::string_view ColumnKindName(ColumnKind kind);
std::optional<ColumnKind> ParseColumnKind(std::string_view name);

struct Column {
  std::string name;
  ColumnKind kind;

  friend bool operator==(const Column&, const Column&) = default;
};

// Ordered column list with exactly one identifier and one protected column.
class Schema {
 public:
  // Empty schema; only Create() produces a usable one.
  Schema() = default;

  static absl::StatusOr<Schema> Create(std::vector<Column> columns);

  const std::vector<Column>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  const Column& column(std::size_t i) const { return columns_[i]; }

  std::size_t id_index() const { return id_index_; }
  std::size_t protected_index() const { return protected_index_; }
  const std::string& id_name() const { return columns_[id_index_].name; }
  const std::string& protected_name() const {
    return columns_[protected_index_].name;
  }

  std::optional<std::size_t> IndexOf(std::string_view name) const;
  std::optional<ColumnKind> KindOf(std::string_view name) const;

  // Names of every column except the identifier and protected ones
  // (the k attributes that queries and shuffling operate on), schema order.
  std::vector<std::string> AttributeNames() const;

  friend bool operator==(const Schema& a, const Schema& b) {
    return a.columns_ == b.columns_;
  }

 private:
  std::vector<Column> columns_;
  std::size_t id_index_ = 0;
  std::size_t protected_index_ = 0;
};

// Identifier, protected and categorical cells hold text; numeric cells hold
// a double.
using Value = std::variant<std::string, double>;
using Row = std::vector<Value>;

class Table {
 public:
  // Validates cell types and identifier uniqueness.
  static absl::StatusOr<Table> Create(Schema schema, std::vector<Row> rows);

  const Schema& schema() const { return schema_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t n() const { return rows_.size(); }

  const std::string& id(std::size_t row) const;
  const std::string& protected_value(std::size_t row) const;

  friend bool operator==(const Table&, const Table&) = default;

 private:
  Table(Schema schema, std::vector<Row> rows)
      : schema_(std::move(schema)), rows_(std::move(rows)) {}

  Schema schema_;
  std::vector<Row> rows_;
};

// Parses CSV text whose header names exactly the schema's columns (any
// order). Row order is preserved; values are stored in schema order.
absl::StatusOr<Table> ParseTable(std::string_view csv_text,
                                 const Schema& schema);
absl::StatusOr<Table> LoadTable(const std::string& path, const Schema& schema);

// Header in schema order, numerics in shortest round-trip form.
std::string FormatTable(const Table& table);

std::string FormatNumber(double value);

// One matrix column of an encoded table: either a numeric pass-through
// (level unset) or the indicator for one categorical level.
struct EncodedColumn {
  std::string name;
  std::string attribute;
  std::optional<std::string> level;

  friend bool operator==(const EncodedColumn&, const EncodedColumn&) = default;
};

struct EncodedTable {
  Schema schema;
  // Categorical attribute -> its levels, in indicator-column order (sorted).
  std::map<std::string, std::vector<std::string>> column_map;
  // Matrix columns: schema order, categoricals expanded in place. The
  // identifier and protected columns are carried separately, unexpanded.
  std::vector<EncodedColumn> columns;
  std::vector<std::string> ids;
  std::vector<std::string> tags;
  std::vector<std::vector<double>> matrix;
  std::vector<std::string> warnings;

  std::size_t n() const { return ids.size(); }

  // Matrix column indices belonging to an attribute (empty if unknown).
  std::vector<std::size_t> ColumnsOf(std::string_view attribute) const;
  std::optional<std::size_t> ColumnIndex(std::string_view name) const;
  std::optional<std::size_t> RowOf(std::string_view id) const;

  // Total column count including identifier and protected.
  std::size_t width() const { return columns.size() + 2; }

  // Compares data only (schema, columns, ids, tags, matrix).
  bool SameData(const EncodedTable& other) const;

  void RebuildIndex();

 private:
  std::unordered_map<std::string, std::size_t> row_index_;
};

EncodedTable EncodeOneHot(const Table& table);
absl::StatusOr<Table> DecodeOneHot(const EncodedTable& encoded);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_TABULAR_H_
