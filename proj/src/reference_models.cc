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

#include "exposition/reference_models.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "exposition/error.h"
#include "exposition/external_predictor.h"

namespace exposition {
namespace {

constexpr double kRidgeJitter = 1e-10;
constexpr int kRefinementSteps = 3;
constexpr double kMinPivot = 1e-8;

// Design matrix (row-major, without the intercept column) for the non-target
// columns of `data`.
std::vector<double> design_matrix(const Dataset& data,
                                  const DesignEncoder& encoder) {
  const Rows x = data.features();
  const std::size_t width = encoder.width();
  std::vector<double> out(x.n_rows() * width);
  for (std::size_t r = 0; r < x.n_rows(); ++r) {
    encoder.encode(x.row(r), std::span<double>(out.data() + r * width, width));
  }
  return out;
}

std::span<const double> numeric_target(const Dataset& data) {
  if (!data.target()) throw SchemaError("dataset has no target column");
  const auto index = *data.column_index(*data.target());
  if (!data.schema()[index].is_numeric()) {
    throw SchemaError("target column must be numeric");
  }
  return data.target_values();
}

double sigmoid(double z) {
  const double p = 1.0 / (1.0 + std::exp(-z));
  constexpr double kLow = std::numeric_limits<double>::denorm_min();
  const double high = std::nextafter(1.0, 0.0);
  return std::min(std::max(p, kLow), high);
}

}  // namespace

DesignEncoder::DesignEncoder(const Schema& schema) {
  for (const ColumnSchema& column : schema) {
    if (column.is_numeric()) {
      slots_.push_back({true, names_.size(), 0});
      names_.push_back(column.name);
    } else {
      slots_.push_back({false, names_.size(), column.levels.size()});
      for (std::size_t l = 1; l < column.levels.size(); ++l) {
        names_.push_back(column.name + "=" + column.levels[l]);
      }
    }
  }
}

void DesignEncoder::encode(std::span<const double> row,
                           std::span<double> out) const {
  for (std::size_t c = 0; c < slots_.size(); ++c) {
    const Slot& slot = slots_[c];
    if (slot.numeric) {
      out[slot.offset] = row[c];
      continue;
    }
    for (std::size_t l = 1; l < slot.n_levels; ++l) {
      out[slot.offset + l - 1] = row[c] == static_cast<double>(l) ? 1.0 : 0.0;
    }
  }
}

// ---------------------------------------------------------------------------

LinearModel::LinearModel(const Schema& schema, double intercept,
                         std::vector<double> coefficients)
    : encoder_(schema),
      intercept_(intercept),
      coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != encoder_.width()) {
    throw ParameterError("linear model expects " +
                         std::to_string(encoder_.width()) +
                         " coefficients, got " +
                         std::to_string(coefficients_.size()));
  }
}

double LinearModel::linear_predictor(std::span<const double> row) const {
  std::vector<double> features(encoder_.width());
  encoder_.encode(row, features);
  double z = intercept_;
  for (std::size_t k = 0; k < features.size(); ++k) {
    z += coefficients_[k] * features[k];
  }
  return z;
}

std::vector<double> LinearModel::predict(const Rows& rows) const {
  std::vector<double> out(rows.n_rows());
  for (std::size_t r = 0; r < rows.n_rows(); ++r) {
    out[r] = linear_predictor(rows.row(r));
  }
  return out;
}

Json LinearModel::to_spec() const {
  Json coefficients = Json::object();
  for (std::size_t k = 0; k < coefficients_.size(); ++k) {
    coefficients[encoder_.names()[k]] = coefficients_[k];
  }
  return {{"type", "linear"},
          {"intercept", intercept_},
          {"coefficients", std::move(coefficients)}};
}

LogisticModel::LogisticModel(const Schema& schema, double intercept,
                             std::vector<double> coefficients)
    : linear_(schema, intercept, std::move(coefficients)) {}

std::vector<double> LogisticModel::predict(const Rows& rows) const {
  std::vector<double> out(rows.n_rows());
  for (std::size_t r = 0; r < rows.n_rows(); ++r) {
    out[r] = sigmoid(linear_.linear_predictor(rows.row(r)));
  }
  return out;
}

// ---------------------------------------------------------------------------

LinearModel fit_linear(const Dataset& data) {
  const auto y = numeric_target(data);
  const Schema& schema = *data.feature_schema();
  const DesignEncoder encoder(schema);
  const std::vector<double> x = design_matrix(data, encoder);
  const std::size_t n = data.n_rows();
  const std::size_t k = encoder.width() + 1;  // Column 0 is the intercept.
  if (n == 0) throw SingularError("no rows to fit");

  auto cell = [&](std::size_t r, std::size_t c) {
    return c == 0 ? 1.0 : x[r * (k - 1) + c - 1];
  };
  std::vector<double> gram(k * k, 0.0), xty(k, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      const double xi = cell(r, i);
      xty[i] += xi * y[r];
      for (std::size_t j = 0; j <= i; ++j) gram[i * k + j] += xi * cell(r, j);
    }
  }
  std::vector<double> scale(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(gram[i * k + i] > 0)) {
      throw SingularError("design column " + std::to_string(i) +
                          " is identically zero");
    }
    scale[i] = std::sqrt(gram[i * k + i]);
  }
  // Scaled lower triangle, jittered, then factored in place.
  std::vector<double> l(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      l[i * k + j] = gram[i * k + j] / (scale[i] * scale[j]);
    }
    l[i * k + i] += kRidgeJitter;
  }
  for (std::size_t j = 0; j < k; ++j) {
    double pivot = l[j * k + j];
    for (std::size_t m = 0; m < j; ++m) pivot -= l[j * k + m] * l[j * k + m];
    if (!(pivot > kMinPivot)) {
      throw SingularError("design matrix is rank deficient (column " +
                          std::to_string(j) + ")");
    }
    const double root = std::sqrt(pivot);
    l[j * k + j] = root;
    for (std::size_t i = j + 1; i < k; ++i) {
      double v = l[i * k + j];
      for (std::size_t m = 0; m < j; ++m) v -= l[i * k + m] * l[j * k + m];
      l[i * k + j] = v / root;
    }
  }
  auto solve = [&](std::vector<double> v) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t m = 0; m < i; ++m) v[i] -= l[i * k + m] * v[m];
      v[i] /= l[i * k + i];
    }
    for (std::size_t i = k; i-- > 0;) {
      for (std::size_t m = i + 1; m < k; ++m) v[i] -= l[m * k + i] * v[m];
      v[i] /= l[i * k + i];
    }
    return v;
  };
  // Solve L L^T z = D^-1 X^T y, then beta = D^-1 z. A few refinement steps
  // against the unjittered system remove the bias the jitter introduces.
  std::vector<double> b(k);
  for (std::size_t i = 0; i < k; ++i) b[i] = xty[i] / scale[i];
  auto scaled = [&](std::size_t i, std::size_t j) {
    return (i >= j ? gram[i * k + j] : gram[j * k + i]) / (scale[i] * scale[j]);
  };
  std::vector<double> z = solve(b);
  for (int step = 0; step < kRefinementSteps; ++step) {
    std::vector<double> r(k);
    for (std::size_t i = 0; i < k; ++i) {
      r[i] = b[i];
      for (std::size_t j = 0; j < k; ++j) r[i] -= scaled(i, j) * z[j];
    }
    const std::vector<double> dz = solve(std::move(r));
    for (std::size_t i = 0; i < k; ++i) z[i] += dz[i];
  }
  std::vector<double> coefficients(k - 1);
  for (std::size_t i = 1; i < k; ++i) coefficients[i - 1] = z[i] / scale[i];
  return LinearModel(schema, z[0] / scale[0], std::move(coefficients));
}

LogisticModel fit_logistic(const Dataset& data, std::size_t iterations,
                           double learning_rate) {
  const auto y = numeric_target(data);
  for (const double v : y) {
    if (v != 0.0 && v != 1.0) {
      throw ParameterError("logistic regression needs a target coded {0, 1}");
    }
  }
  if (!(learning_rate > 0)) throw ParameterError("learning_rate must be > 0");
  const Schema& schema = *data.feature_schema();
  const DesignEncoder encoder(schema);
  std::vector<double> x = design_matrix(data, encoder);
  const std::size_t n = data.n_rows();
  const std::size_t width = encoder.width();
  if (n == 0) throw ParameterError("no rows to fit");

  std::vector<double> mean(width, 0.0), sd(width, 1.0);
  for (std::size_t c = 0; c < width; ++c) {
    for (std::size_t r = 0; r < n; ++r) mean[c] += x[r * width + c];
    mean[c] /= static_cast<double>(n);
    double ss = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = x[r * width + c] - mean[c];
      ss += d * d;
    }
    const double s = std::sqrt(ss / static_cast<double>(n));
    if (s > 0) sd[c] = s;
    for (std::size_t r = 0; r < n; ++r) {
      x[r * width + c] = (x[r * width + c] - mean[c]) / sd[c];
    }
  }

  double bias = 0;
  std::vector<double> w(width, 0.0), grad(width);
  for (std::size_t it = 0; it < iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0;
    for (std::size_t r = 0; r < n; ++r) {
      double z = bias;
      for (std::size_t c = 0; c < width; ++c) z += w[c] * x[r * width + c];
      const double residual = 1.0 / (1.0 + std::exp(-z)) - y[r];
      grad_bias += residual;
      for (std::size_t c = 0; c < width; ++c) {
        grad[c] += residual * x[r * width + c];
      }
    }
    bias -= learning_rate * grad_bias / static_cast<double>(n);
    for (std::size_t c = 0; c < width; ++c) {
      w[c] -= learning_rate * grad[c] / static_cast<double>(n);
    }
  }
  std::vector<double> coefficients(width);
  double intercept = bias;
  for (std::size_t c = 0; c < width; ++c) {
    coefficients[c] = w[c] / sd[c];
    intercept -= coefficients[c] * mean[c];
  }
  return LogisticModel(schema, intercept, std::move(coefficients));
}

TreeModel fit_tree(const Dataset& data, const TreeParams& params) {
  const auto y = numeric_target(data);
  return TreeModel(RegressionTree::fit(data.features(), y, params));
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Predictor> load_model(const Json& spec,
                                            const Dataset& data) {
  if (!spec.is_object() || !spec.contains("type") ||
      !spec["type"].is_string()) {
    throw ParameterError("model specification needs a string \"type\"");
  }
  const std::string type = spec["type"].get<std::string>();
  try {
    if (type == "linear") {
      if (!spec.contains("coefficients")) {
        return std::make_shared<LinearModel>(fit_linear(data));
      }
      const Schema& schema = *data.feature_schema();
      const DesignEncoder encoder(schema);
      std::vector<double> coefficients(encoder.width(), 0.0);
      for (const auto& [name, value] : spec["coefficients"].items()) {
        const auto& names = encoder.names();
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
          throw ParameterError("unknown design column '" + name + "'");
        }
        coefficients[static_cast<std::size_t>(it - names.begin())] =
            value.get<double>();
      }
      return std::make_shared<LinearModel>(
          schema, spec.value("intercept", 0.0), std::move(coefficients));
    }
    if (type == "logistic") {
      return std::make_shared<LogisticModel>(
          fit_logistic(data, spec.value("iterations", std::size_t{500}),
                       spec.value("learning_rate", 0.1)));
    }
    if (type == "tree") {
      return std::make_shared<TreeModel>(
          fit_tree(data, {spec.value("max_depth", std::size_t{3}),
                          spec.value("min_leaf", std::size_t{5})}));
    }
    if (type == "external") {
      std::vector<std::string> command;
      const Json& raw = spec.at("command");
      if (raw.is_string()) {
        command = {"/bin/sh", "-c", raw.get<std::string>()};
      } else {
        command = raw.get<std::vector<std::string>>();
      }
      if (command.empty()) throw ParameterError("external command is empty");
      const double seconds = spec.value("timeout", 30.0);
      return std::make_shared<ExternalPredictor>(
          std::move(command),
          std::chrono::milliseconds(static_cast<long long>(seconds * 1000)));
    }
  } catch (const Json::exception& e) {
    throw ParameterError("invalid " + type + " model specification: " +
                         e.what());
  }
  throw ParameterError("unknown model type '" + type + "'");
}

std::shared_ptr<const Predictor> load_model_file(const std::string& path,
                                                 const Dataset& data) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open model file '" + path + "'");
  Json spec;
  try {
    spec = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParameterError("model file '" + path + "' is not JSON: " + e.what());
  }
  return load_model(spec, data);
}

}  // namespace exposition
