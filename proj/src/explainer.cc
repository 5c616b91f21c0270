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

#include "exposition/explainer.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <utility>

#include "exposition/error.h"
#include "exposition/format.h"
#include "exposition/metrics.h"

namespace exposition {
namespace {

constexpr std::size_t kProbeRows = 10;

bool same_schema(const Schema& a, const Schema& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].kind != b[i].kind ||
        a[i].levels != b[i].levels) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string_view task_name(TaskType task) {
  return task == TaskType::kRegression ? "regression" : "classification";
}

Explainer::Explainer(std::shared_ptr<const Predictor> predictor,
                     std::shared_ptr<const Dataset> data, std::string label,
                     std::optional<TaskType> task, std::uint64_t seed)
    : predictor_(std::move(predictor)),
      data_(std::move(data)),
      label_(std::move(label)),
      seed_(seed) {
  if (!predictor_) throw ParameterError("explainer needs a predictor");
  if (!data_) throw ParameterError("explainer needs a dataset");
  if (label_.empty()) throw ParameterError("explainer label is empty");
  if (data_->n_rows() == 0) throw SchemaError("dataset has no rows");
  if (!data_->target()) throw SchemaError("dataset has no target column");
  if (data_->feature_indices().empty()) {
    throw SchemaError("dataset has no explanatory columns");
  }
  const auto target_index = *data_->column_index(*data_->target());
  if (!data_->schema()[target_index].is_numeric()) {
    throw SchemaError("target column '" + *data_->target() +
                      "' must be numeric");
  }
  const auto y = data_->target_values();
  const bool binary = std::all_of(y.begin(), y.end(), [](double v) {
    return v == 0.0 || v == 1.0;
  });
  task_ = task.value_or(binary ? TaskType::kClassification
                               : TaskType::kRegression);
  if (task_ == TaskType::kClassification && !binary) {
    throw ParameterError("classification requires a target coded {0, 1}");
  }
  features_ = data_->features();

  const Rows probe = features_.slice(0, kProbeRows);
  const std::vector<double> first = predictor_->predict(probe);
  const std::vector<double> second = predictor_->predict(probe);
  if (first.size() != probe.n_rows() || second.size() != probe.n_rows()) {
    throw PredictorContractError(
        "predictor returned " + std::to_string(first.size()) +
        " scores for " + std::to_string(probe.n_rows()) + " rows");
  }
  if (std::memcmp(first.data(), second.data(),
                  first.size() * sizeof(double)) != 0) {
    throw NonDeterministicPredictorError(
        "predictor gave different scores for identical rows");
  }
  if (task_ == TaskType::kClassification) {
    for (const double s : first) {
      if (!(s >= 0.0 && s <= 1.0)) {
        throw RangeError("classification score " + format_shortest(s) +
                         " outside [0, 1]");
      }
    }
  }
}

std::size_t Explainer::feature_index(std::string_view name) const {
  const Schema& schema = feature_schema();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema[f].name == name) return f;
  }
  throw SchemaError("unknown variable '" + std::string(name) + "'");
}

std::vector<double> predict_batch(const Explainer& explainer,
                                  const Rows& rows) {
  if (rows.n_rows() == 0) return {};
  if (rows.shared_schema() != explainer.data().feature_schema() &&
      !same_schema(rows.schema(), explainer.feature_schema())) {
    throw SchemaError("rows do not conform to the explainer's feature schema");
  }
  const Schema& schema = rows.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (schema[c].is_numeric()) continue;
    for (std::size_t r = 0; r < rows.n_rows(); ++r) {
      schema[c].render(rows(r, c));  // Throws LevelError.
    }
  }
  std::vector<double> scores = explainer.predictor().predict(rows);
  if (scores.size() != rows.n_rows()) {
    throw PredictorContractError(
        "predictor returned " + std::to_string(scores.size()) +
        " scores for " + std::to_string(rows.n_rows()) + " rows");
  }
  return scores;
}

double predict_instance(const Explainer& explainer, const Instance& instance) {
  return predict_batch(explainer,
                       Rows(explainer.data().feature_schema(), instance.values))
      .front();
}

Instance instance_from_row(const Explainer& explainer, std::size_t row) {
  if (row >= explainer.data().n_rows()) {
    throw ParameterError("row " + std::to_string(row) + " out of range (" +
                         std::to_string(explainer.data().n_rows()) + " rows)");
  }
  const auto values = explainer.features().row(row);
  return Instance{{values.begin(), values.end()}};
}

Instance apply_overrides(const Explainer& explainer, Instance instance,
                         const Json& overrides) {
  if (overrides.is_null()) return instance;
  if (!overrides.is_object()) {
    throw ParameterError("overrides must be an object {variable: value}");
  }
  for (const auto& [name, value] : overrides.items()) {
    const std::size_t f = explainer.feature_index(name);
    const ColumnSchema& column = explainer.feature_schema()[f];
    if (value.is_number() && column.is_numeric()) {
      const double v = value.get<double>();
      if (!std::isfinite(v)) {
        throw ParameterError("override for '" + name + "' is not finite");
      }
      instance.values[f] = v;
    } else if (value.is_string()) {
      instance.values[f] = column.parse(value.get<std::string>());
    } else {
      throw ParameterError("override for '" + name + "' must be a " +
                           (column.is_numeric() ? "number" : "level name"));
    }
  }
  return instance;
}

Explanation model_performance(const Explainer& explainer) {
  const std::vector<double> scores =
      predict_batch(explainer, explainer.features());
  const auto y = explainer.target();
  Explanation out;
  out.kind = "performance";
  out.model_label = explainer.label();
  std::vector<std::string> names;
  std::vector<double> values;
  if (explainer.task() == TaskType::kRegression) {
    const RegressionMetrics m = regression_metrics(y, scores);
    names = {"mse", "rmse", "mae", "r2"};
    values = {m.mse, m.rmse, m.mae, m.r2};
  } else {
    const ClassificationMetrics m = classification_metrics(y, scores, 0.5);
    names = {"accuracy", "precision", "recall", "f1", "auc"};
    values = {m.accuracy, m.precision, m.recall, m.f1, m.auc};
    out.meta["cutoff"] = 0.5;
  }
  Json metrics = Json::object();
  for (std::size_t i = 0; i < names.size(); ++i) metrics[names[i]] = values[i];
  out.result.add("metric", names);
  out.result.add("value", values);
  out.chart = {{"type", "performance"}, {"metrics", metrics}};
  out.meta["task"] = task_name(explainer.task());
  out.meta["n"] = explainer.data().n_rows();
  return out;
}

}  // namespace exposition
