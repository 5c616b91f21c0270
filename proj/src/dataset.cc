/*
 * Copyright 2026 The Exposition Authors.
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

#include "exposition/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <utility>

#include "exposition/error.h"
#include "exposition/format.h"

namespace exposition {

std::string_view column_kind_name(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

std::optional<std::size_t> ColumnSchema::level_index(
    std::string_view level) const {
  const auto it = std::lower_bound(levels.begin(), levels.end(), level);
  if (it == levels.end() || *it != level) return std::nullopt;
  return static_cast<std::size_t>(it - levels.begin());
}

std::string ColumnSchema::render(double value) const {
  if (is_numeric()) return format_shortest(value);
  const auto index = static_cast<std::size_t>(value);
  if (value < 0 || index >= levels.size() ||
      static_cast<double>(index) != value) {
    throw LevelError("invalid level index " + format_shortest(value) +
                     " for column '" + name + "'");
  }
  return levels[index];
}

double ColumnSchema::parse(std::string_view text) const {
  if (is_numeric()) {
    const auto number = parse_number(text);
    if (!number) {
      throw ParseError("'" + std::string(text) +
                       "' is not a number (column '" + name + "')");
    }
    return *number;
  }
  const auto index = level_index(text);
  if (!index) {
    throw LevelError("unknown level '" + std::string(text) +
                     "' for column '" + name + "'");
  }
  return static_cast<double>(*index);
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0;
  const char* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// ---------------------------------------------------------------------------
// Rows

Rows::Rows(std::shared_ptr<const Schema> schema, std::size_t n_rows)
    : schema_(std::move(schema)),
      n_rows_(n_rows),
      values_(n_rows * schema_->size(), 0.0) {}

Rows::Rows(std::shared_ptr<const Schema> schema, std::vector<double> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
  const std::size_t width = schema_->size();
  if (width == 0) {
    if (!values_.empty()) {
      throw SchemaError("row values supplied for an empty schema");
    }
    return;
  }
  if (values_.size() % width != 0) {
    throw SchemaError("row buffer is not a multiple of the schema width");
  }
  n_rows_ = values_.size() / width;
}

Rows Rows::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, n_rows_);
  begin = std::min(begin, end);
  return Rows(schema_, std::vector<double>(values_.begin() + begin * n_cols(),
                                           values_.begin() + end * n_cols()));
}

Rows Rows::select(std::span<const std::size_t> row_indices) const {
  std::vector<double> values;
  values.reserve(row_indices.size() * n_cols());
  for (const std::size_t r : row_indices) {
    const auto source = row(r);
    values.insert(values.end(), source.begin(), source.end());
  }
  return Rows(schema_, std::move(values));
}

void Rows::append_row(std::span<const double> row) {
  if (row.size() != n_cols()) {
    throw SchemaError("appended row has " + std::to_string(row.size()) +
                      " values, schema has " + std::to_string(n_cols()));
  }
  values_.insert(values_.end(), row.begin(), row.end());
  ++n_rows_;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Schema schema, std::vector<std::vector<double>> columns,
                 std::optional<std::string> target)
    : schema_(std::move(schema)),
      columns_(std::move(columns)),
      target_(std::move(target)) {
  if (columns_.size() != schema_.size()) {
    throw SchemaError("column count does not match schema");
  }
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  std::set<std::string_view> names;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const ColumnSchema& column = schema_[c];
    if (!names.insert(column.name).second) {
      throw SchemaError("duplicate column name '" + column.name + "'");
    }
    if (columns_[c].size() != n_rows_) {
      throw SchemaError("column '" + column.name + "' has " +
                        std::to_string(columns_[c].size()) +
                        " values, expected " + std::to_string(n_rows_));
    }
    if (column.is_numeric()) {
      if (!column.levels.empty()) {
        throw SchemaError("numeric column '" + column.name +
                          "' carries levels");
      }
      for (const double v : columns_[c]) {
        if (!std::isfinite(v)) {
          throw MissingValueError("non-finite value in column '" +
                                  column.name + "'");
        }
      }
    } else {
      if (column.levels.empty()) {
        throw SchemaError("categorical column '" + column.name +
                          "' has no levels");
      }
      if (std::adjacent_find(column.levels.begin(), column.levels.end(),
                             std::greater_equal<>()) != column.levels.end()) {
        throw SchemaError("levels of '" + column.name +
                          "' are not sorted and unique");
      }
      for (const double v : columns_[c]) {
        column.render(v);  // Throws on an out-of-table index.
      }
    }
  }
  std::optional<std::size_t> target_index;
  if (target_) {
    target_index = column_index(*target_);
    if (!target_index) {
      throw SchemaError("target column '" + *target_ + "' does not exist");
    }
  }
  Schema features;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (target_index && *target_index == c) continue;
    feature_indices_.push_back(c);
    features.push_back(schema_[c]);
  }
  feature_schema_ = std::make_shared<const Schema>(std::move(features));
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].name == name) return c;
  }
  return std::nullopt;
}

std::span<const double> Dataset::target_values() const {
  if (!target_) throw SchemaError("dataset has no target column");
  return columns_[*column_index(*target_)];
}

Rows Dataset::features() const {
  Rows rows(feature_schema_, n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (std::size_t f = 0; f < feature_indices_.size(); ++f) {
      rows(r, f) = columns_[feature_indices_[f]][r];
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

// Splits a CSV document into records of raw field strings. Quoted fields may
// contain separators, doubled quotes and line breaks.
std::vector<std::vector<std::string>> read_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw ParseError("quote inside unquoted field on record " +
                           std::to_string(records.size() + 1));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
    ++i;
  }
  if (in_quotes) throw ParseError("unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

}  // namespace

Dataset load_dataset_text(std::string_view csv,
                          std::optional<std::string> target) {
  if (csv.size() >= 3 && csv.substr(0, 3) == "\xEF\xBB\xBF") csv.remove_prefix(3);
  auto records = read_records(csv);
  // Blank lines carry no data.
  std::erase_if(records, [](const std::vector<std::string>& r) {
    return r.size() == 1 && r.front().empty();
  });
  if (records.empty()) throw ParseError("missing header row");
  const std::vector<std::string>& header = records.front();
  const std::size_t width = header.size();
  std::set<std::string_view> seen;
  for (const auto& name : header) {
    if (name.empty()) throw SchemaError("empty column name in header");
    if (!seen.insert(name).second) {
      throw SchemaError("duplicate header '" + name + "'");
    }
  }
  const std::size_t n_rows = records.size() - 1;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw ParseError("record " + std::to_string(r + 1) + " has " +
                       std::to_string(records[r].size()) +
                       " fields, header has " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (records[r][c].empty()) {
        throw MissingValueError("empty cell at record " +
                                std::to_string(r + 1) + ", column '" +
                                header[c] + "'");
      }
    }
  }

  Schema schema(width);
  std::vector<std::vector<double>> columns(width);
  for (std::size_t c = 0; c < width; ++c) {
    ColumnSchema& column = schema[c];
    column.name = header[c];
    std::vector<double>& values = columns[c];
    values.reserve(n_rows);
    bool numeric = true;
    for (std::size_t r = 1; r <= n_rows && numeric; ++r) {
      const auto number = parse_number(records[r][c]);
      if (number) {
        values.push_back(*number);
      } else {
        numeric = false;
      }
    }
    if (numeric) continue;
    column.kind = ColumnKind::kCategorical;
    std::set<std::string> levels;
    for (std::size_t r = 1; r <= n_rows; ++r) levels.insert(records[r][c]);
    column.levels.assign(levels.begin(), levels.end());
    values.clear();
    for (std::size_t r = 1; r <= n_rows; ++r) {
      values.push_back(static_cast<double>(*column.level_index(records[r][c])));
    }
  }
  return Dataset(std::move(schema), std::move(columns), std::move(target));
}

Dataset load_dataset(std::istream& csv, std::optional<std::string> target) {
  const std::string text{std::istreambuf_iterator<char>(csv),
                         std::istreambuf_iterator<char>()};
  return load_dataset_text(text, std::move(target));
}

Dataset load_dataset_file(const std::string& path,
                          std::optional<std::string> target) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return load_dataset(in, std::move(target));
}

}  // namespace exposition
