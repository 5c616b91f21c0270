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

// The uniform result of every method: a long-format result table, a chart
// payload for rendering, and the parameters needed to reproduce it.
//
// Serialized form (field names are fixed):
//   {"kind": ..., "model_label": ...,
//    "result": {"columns": [names...], "values": [[col0...], [col1...]]},
//    "chart": {"type": <chart type>, ...},
//    "meta": {...}}

#ifndef EXPOSITION_EXPLANATION_H_
#define EXPOSITION_EXPLANATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace exposition {

using Json = nlohmann::json;

// Optional doubles serialize `nullopt` as null and mark undefined values.
using ColumnValues =
    std::variant<std::vector<double>, std::vector<std::int64_t>,
                 std::vector<std::string>, std::vector<std::optional<double>>>;

struct ResultColumn {
  std::string name;
  ColumnValues values;
};

class ResultTable {
 public:
  // Throws std::invalid_argument on a length mismatch or duplicate name.
  void add(std::string name, ColumnValues values);

  std::size_t n_rows() const;
  const std::vector<ResultColumn>& columns() const { return columns_; }
  const ResultColumn* find(std::string_view name) const;

  // Typed accessors; throw std::out_of_range when absent or of another type.
  const std::vector<double>& numbers(std::string_view name) const;
  const std::vector<std::int64_t>& integers(std::string_view name) const;
  const std::vector<std::string>& strings(std::string_view name) const;
  const std::vector<std::optional<double>>& optionals(
      std::string_view name) const;

 private:
  std::vector<ResultColumn> columns_;
};

struct Explanation {
  std::string kind;
  std::string model_label;
  ResultTable result;
  Json chart = Json::object();
  Json meta = Json::object();
};

Json to_json(const ResultTable& table);
Json to_json(const Explanation& explanation);

// Compact, deterministic JSON text. This exact byte sequence is what the CLI
// writes and what the HTTP service returns.
std::string serialize(const Explanation& explanation);

}  // namespace exposition

#endif  // EXPOSITION_EXPLANATION_H_
