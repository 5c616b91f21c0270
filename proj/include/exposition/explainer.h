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

#ifndef EXPOSITION_EXPLAINER_H_
#define EXPOSITION_EXPLAINER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exposition/dataset.h"
#include "exposition/explanation.h"
#include "exposition/predictor.h"

namespace exposition {

enum class TaskType { kRegression, kClassification };

std::string_view task_name(TaskType task);

// One value per non-target column, in feature-schema order.
struct Instance {
  std::vector<double> values;
};

// Binds a predictor to a dataset. Immutable after construction; every
// explanation method takes one.
//
// Construction validates the predictor: the first min(10, n) rows are scored
// twice and must agree bitwise and in length, and classification scores must
// lie in [0, 1].
class Explainer {
 public:
  Explainer(std::shared_ptr<const Predictor> predictor,
            std::shared_ptr<const Dataset> data, std::string label,
            std::optional<TaskType> task = std::nullopt,
            std::uint64_t seed = 42);

  const Predictor& predictor() const { return *predictor_; }
  const std::shared_ptr<const Predictor>& shared_predictor() const {
    return predictor_;
  }
  const Dataset& data() const { return *data_; }
  const std::shared_ptr<const Dataset>& shared_data() const { return data_; }
  const std::string& label() const { return label_; }
  TaskType task() const { return task_; }
  std::uint64_t seed() const { return seed_; }

  const Schema& feature_schema() const { return *data_->feature_schema(); }
  std::size_t n_features() const { return feature_schema().size(); }
  // Feature rows of the whole dataset.
  const Rows& features() const { return features_; }
  std::span<const double> target() const { return data_->target_values(); }

  // Index of a feature by name; SchemaError when unknown.
  std::size_t feature_index(std::string_view name) const;

 private:
  std::shared_ptr<const Predictor> predictor_;
  std::shared_ptr<const Dataset> data_;
  std::string label_;
  TaskType task_;
  std::uint64_t seed_;
  Rows features_;
};

// Scores rows through the explainer's predictor. Rows must carry the feature
// schema; unknown categorical level indices raise LevelError.
std::vector<double> predict_batch(const Explainer& explainer,
                                  const Rows& rows);

double predict_instance(const Explainer& explainer, const Instance& instance);

// Instance taken from a dataset row; ParameterError when out of range.
Instance instance_from_row(const Explainer& explainer, std::size_t row);

// Applies what-if overrides {variable: value}. Numeric variables take numbers
// (or numeric strings); categorical variables take level names.
Instance apply_overrides(const Explainer& explainer, Instance instance,
                         const Json& overrides);

// Regression: MSE, RMSE, MAE, R^2. Classification (cutoff 0.5): accuracy,
// precision, recall, F1, AUC.
Explanation model_performance(const Explainer& explainer);

}  // namespace exposition

#endif  // EXPOSITION_EXPLAINER_H_
