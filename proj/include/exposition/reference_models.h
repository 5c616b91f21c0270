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

// Built-in predictors and the model specification file.
//
// Linear and logistic models see categorical columns one-hot encoded with the
// first level dropped: a column `c` with levels [a, b, d] contributes
// indicator features `c=b` and `c=d`.
//
// Model specification (JSON):
//   {"type": "linear"}                         fitted by least squares
//   {"type": "linear", "intercept": 1, "coefficients": {"x": 2, "c=b": -1}}
//   {"type": "logistic", "iterations": 500, "learning_rate": 0.1}
//   {"type": "tree", "max_depth": 3, "min_leaf": 5}
//   {"type": "external", "command": ["prog", "arg"], "timeout": 10}

#ifndef EXPOSITION_REFERENCE_MODELS_H_
#define EXPOSITION_REFERENCE_MODELS_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "exposition/cart.h"
#include "exposition/dataset.h"
#include "exposition/explanation.h"
#include "exposition/predictor.h"

namespace exposition {

// Numeric columns pass through; categorical columns become drop-first
// indicators.
class DesignEncoder {
 public:
  explicit DesignEncoder(const Schema& schema);

  std::size_t width() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  void encode(std::span<const double> row, std::span<double> out) const;

 private:
  struct Slot {
    bool numeric;
    std::size_t offset;
    std::size_t n_levels;
  };
  std::vector<Slot> slots_;
  std::vector<std::string> names_;
};

class LinearModel : public Predictor {
 public:
  // `coefficients` follows the encoder's design columns.
  LinearModel(const Schema& schema, double intercept,
              std::vector<double> coefficients);

  std::vector<double> predict(const Rows& rows) const override;

  // intercept + sum_k coefficient_k * feature_k, summed in design order.
  double linear_predictor(std::span<const double> row) const;

  double intercept() const { return intercept_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const DesignEncoder& encoder() const { return encoder_; }
  Json to_spec() const;

 private:
  DesignEncoder encoder_;
  double intercept_;
  std::vector<double> coefficients_;
};

// Scores sigmoid(intercept + w . x), kept strictly inside (0, 1).
class LogisticModel : public Predictor {
 public:
  LogisticModel(const Schema& schema, double intercept,
                std::vector<double> coefficients);

  std::vector<double> predict(const Rows& rows) const override;
  const LinearModel& linear() const { return linear_; }

 private:
  LinearModel linear_;
};

class TreeModel : public Predictor {
 public:
  explicit TreeModel(RegressionTree tree) : tree_(std::move(tree)) {}

  std::vector<double> predict(const Rows& rows) const override {
    return tree_.predict(rows);
  }
  const RegressionTree& tree() const { return tree_; }

 private:
  RegressionTree tree_;
};

// Ordinary least squares on the non-target columns via the normal equations.
// The Gram matrix is scaled to unit diagonal and 1e-10 is added to that
// diagonal; a Cholesky pivot below 1e-8 raises SingularError. The solution
// is then refined against the unjittered system.
LinearModel fit_linear(const Dataset& data);

// Full-batch gradient descent on mean log loss. Design columns are
// standardized during fitting and the weights mapped back afterwards.
LogisticModel fit_logistic(const Dataset& data, std::size_t iterations = 500,
                           double learning_rate = 0.1);

TreeModel fit_tree(const Dataset& data, const TreeParams& params);

// Builds the predictor a specification describes, fitting on `data` where the
// type requires it.
std::shared_ptr<const Predictor> load_model(const Json& spec,
                                            const Dataset& data);
std::shared_ptr<const Predictor> load_model_file(const std::string& path,
                                                 const Dataset& data);

}  // namespace exposition

#endif  // EXPOSITION_REFERENCE_MODELS_H_
