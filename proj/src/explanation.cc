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

#include "exposition/explanation.h"

#include <stdexcept>

namespace exposition {
namespace {

std::size_t length_of(const ColumnValues& values) {
  return std::visit([](const auto& v) { return v.size(); }, values);
}

template <typename T>
const std::vector<T>& typed(const ResultTable& table, std::string_view name) {
  const ResultColumn* column = table.find(name);
  if (column == nullptr) {
    throw std::out_of_range("no result column '" + std::string(name) + "'");
  }
  const auto* values = std::get_if<std::vector<T>>(&column->values);
  if (values == nullptr) {
    throw std::out_of_range("result column '" + std::string(name) +
                            "' has another type");
  }
  return *values;
}

}  // namespace

void ResultTable::add(std::string name, ColumnValues values) {
  if (find(name) != nullptr) {
    throw std::invalid_argument("duplicate result column '" + name + "'");
  }
  if (!columns_.empty() && length_of(values) != n_rows()) {
    throw std::invalid_argument("result column '" + name + "' has " +
                                std::to_string(length_of(values)) +
                                " values, table has " +
                                std::to_string(n_rows()));
  }
  columns_.push_back({std::move(name), std::move(values)});
}

std::size_t ResultTable::n_rows() const {
  return columns_.empty() ? 0 : length_of(columns_.front().values);
}

const ResultColumn* ResultTable::find(std::string_view name) const {
  for (const auto& column : columns_) {
    if (column.name == name) return &column;
  }
  return nullptr;
}

const std::vector<double>& ResultTable::numbers(std::string_view name) const {
  return typed<double>(*this, name);
}
const std::vector<std::int64_t>& ResultTable::integers(
    std::string_view name) const {
  return typed<std::int64_t>(*this, name);
}
const std::vector<std::string>& ResultTable::strings(
    std::string_view name) const {
  return typed<std::string>(*this, name);
}
const std::vector<std::optional<double>>& ResultTable::optionals(
    std::string_view name) const {
  return typed<std::optional<double>>(*this, name);
}

Json to_json(const ResultTable& table) {
  Json names = Json::array();
  Json values = Json::array();
  for (const auto& column : table.columns()) {
    names.push_back(column.name);
    Json array = Json::array();
    std::visit(
        [&array](const auto& v) {
          for (const auto& cell : v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(cell)>,
                                         std::optional<double>>) {
              array.push_back(cell ? Json(*cell) : Json(nullptr));
            } else {
              array.push_back(cell);
            }
          }
        },
        column.values);
    values.push_back(std::move(array));
  }
  return Json{{"columns", std::move(names)}, {"values", std::move(values)}};
}

Json to_json(const Explanation& explanation) {
  return Json{{"kind", explanation.kind},
              {"model_label", explanation.model_label},
              {"result", to_json(explanation.result)},
              {"chart", explanation.chart},
              {"meta", explanation.meta}};
}

std::string serialize(const Explanation& explanation) {
  return to_json(explanation).dump(-1, ' ', false,
                                   Json::error_handler_t::replace);
}

}  // namespace exposition
