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

// Immutable tabular data and row-major slices of it.
//
// Numeric cells are stored as doubles. Categorical cells are stored as the
// index (as a double) of the value in the column's sorted level table, so a
// row of any schema is a plain span of doubles.

#ifndef EXPOSITION_DATASET_H_
#define EXPOSITION_DATASET_H_

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace exposition {

enum class ColumnKind { kNumeric, kCategorical };

std::string_view column_kind_name(ColumnKind kind);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Sorted, unique. Empty for numeric columns.
  std::vector<std::string> levels;

  bool is_numeric() const { return kind == ColumnKind::kNumeric; }
  std::optional<std::size_t> level_index(std::string_view level) const;
  // Human readable rendering of a stored cell value.
  std::string render(double value) const;
  // Parses a textual cell against this column. Throws LevelError for an
  // unknown level and ParseError for a non-numeric numeric cell.
  double parse(std::string_view text) const;
};

using Schema = std::vector<ColumnSchema>;

// Row-major table over a fixed schema. This is what predictors consume.
class Rows {
 public:
  Rows() : schema_(std::make_shared<const Schema>()) {}
  Rows(std::shared_ptr<const Schema> schema, std::size_t n_rows);
  Rows(std::shared_ptr<const Schema> schema, std::vector<double> values);

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& shared_schema() const {
    return schema_;
  }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return schema_->size(); }

  double operator()(std::size_t row, std::size_t col) const {
    return values_[row * n_cols() + col];
  }
  double& operator()(std::size_t row, std::size_t col) {
    return values_[row * n_cols() + col];
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * n_cols(), n_cols()};
  }
  std::span<double> row(std::size_t r) {
    return {values_.data() + r * n_cols(), n_cols()};
  }
  std::span<const double> values() const { return values_; }

  Rows slice(std::size_t begin, std::size_t end) const;
  Rows select(std::span<const std::size_t> row_indices) const;
  void append_row(std::span<const double> row);

 private:
  std::shared_ptr<const Schema> schema_;
  std::size_t n_rows_ = 0;
  std::vector<double> values_;
};

class Dataset {
 public:
  // Validates the column layout and level tables. `columns[i]` holds the
  // values of `schema[i]`.
  Dataset(Schema schema, std::vector<std::vector<double>> columns,
          std::optional<std::string> target);

  const Schema& schema() const { return schema_; }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return schema_.size(); }
  const std::optional<std::string>& target() const { return target_; }

  std::span<const double> column(std::size_t index) const {
    return columns_[index];
  }
  std::optional<std::size_t> column_index(std::string_view name) const;

  // Indices of all non-target columns, in schema order.
  const std::vector<std::size_t>& feature_indices() const {
    return feature_indices_;
  }
  // Schema restricted to the non-target columns.
  const std::shared_ptr<const Schema>& feature_schema() const {
    return feature_schema_;
  }
  std::span<const double> target_values() const;
  // All rows, non-target columns only.
  Rows features() const;

 private:
  Schema schema_;
  std::vector<std::vector<double>> columns_;
  std::optional<std::string> target_;
  std::size_t n_rows_ = 0;
  std::vector<std::size_t> feature_indices_;
  std::shared_ptr<const Schema> feature_schema_;
};

// Parses RFC 4180 style CSV with a mandatory header row. A column is numeric
// iff every cell parses as a finite decimal number.
Dataset load_dataset(std::istream& csv, std::optional<std::string> target);
Dataset load_dataset_text(std::string_view csv,
                          std::optional<std::string> target);
Dataset load_dataset_file(const std::string& path,
                          std::optional<std::string> target);

// Strict finite-decimal parse of a whole cell.
std::optional<double> parse_number(std::string_view text);

}  // namespace exposition

#endif  // EXPOSITION_DATASET_H_
