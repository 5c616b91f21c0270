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

#ifndef EXPOSITION_TESTS_TEST_UTIL_H_
#define EXPOSITION_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exposition/dataset.h"
#include "exposition/explainer.h"
#include "exposition/predictor.h"

namespace exposition::testing {

inline ColumnSchema numeric(std::string name) {
  return ColumnSchema{std::move(name), ColumnKind::kNumeric, {}};
}

inline ColumnSchema categorical(std::string name,
                                std::vector<std::string> levels) {
  return ColumnSchema{std::move(name), ColumnKind::kCategorical,
                      std::move(levels)};
}

// Numeric feature columns plus a numeric target named "y".
inline std::shared_ptr<const Dataset> numeric_data(
    const std::vector<std::string>& names,
    const std::vector<std::vector<double>>& columns,
    const std::vector<double>& y) {
  Schema schema;
  for (const auto& n : names) schema.push_back(numeric(n));
  schema.push_back(numeric("y"));
  auto all = columns;
  all.push_back(y);
  return std::make_shared<const Dataset>(std::move(schema), std::move(all),
                                         "y");
}

// n rows of p independent uniform(-1, 1) features x1..xp; y = 0.
inline std::shared_ptr<const Dataset> uniform_data(std::size_t n,
                                                   std::size_t p,
                                                   std::uint64_t seed,
                                                   double lo = -1,
                                                   double hi = 1) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns(p, std::vector<double>(n));
  for (std::size_t j = 0; j < p; ++j) {
    names.push_back("x" + std::to_string(j + 1));
    for (std::size_t i = 0; i < n; ++i) columns[j][i] = u(engine);
  }
  return numeric_data(names, columns, std::vector<double>(n, 0.0));
}

using RowFn = std::function<double(std::span<const double>)>;

inline std::shared_ptr<const Explainer> explain_fn(
    std::shared_ptr<const Dataset> data, RowFn fn,
    std::string label = "model",
    std::optional<TaskType> task = TaskType::kRegression,
    std::uint64_t seed = 42) {
  return std::make_shared<const Explainer>(
      std::make_shared<FunctionPredictor>(std::move(fn)), std::move(data),
      std::move(label), task, seed);
}

inline bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

}  // namespace exposition::testing

#endif  // EXPOSITION_TESTS_TEST_UTIL_H_
