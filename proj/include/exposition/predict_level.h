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

// Local explanations of a single instance: break-down attributions, sampled
// Shapley values and ceteris-paribus profiles.
//
// Attributions are interventional. A background sample of dataset rows is
// drawn once per call; "fixing" a variable overwrites that column of every
// background row with the instance value, and a variable's contribution is the
// change in the mean prediction over the background.

#ifndef EXPOSITION_PREDICT_LEVEL_H_
#define EXPOSITION_PREDICT_LEVEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exposition/dataset.h"
#include "exposition/explainer.h"
#include "exposition/explanation.h"

namespace exposition {

// Mean prediction over rows, summed in row order.
double mean_prediction(const Explainer& explainer, const Rows& rows);

// Seeded background sample of min(background_size, n) rows, ascending.
Rows background_sample(const Explainer& explainer, std::size_t background_size,
                       std::uint64_t seed);

struct Attribution {
  // Feature indices in the order they were fixed.
  std::vector<std::size_t> order;
  // Indexed by feature index (not by position in `order`).
  std::vector<double> contributions;
  double intercept = 0;
  double prediction = 0;
};

// Break-down along a fixed ordering over a given background. `order` must be
// a permutation of the feature indices.
Attribution break_down_attribution(const Explainer& explainer,
                                   const Instance& instance,
                                   const Rows& background,
                                   std::span<const std::size_t> order);

// Variables by descending |E[f | x_j fixed] - E[f]|, ties by column order.
std::vector<std::size_t> default_break_down_order(const Explainer& explainer,
                                                  const Instance& instance,
                                                  const Rows& background);

struct BreakDownOptions {
  // Variable names; must name every feature exactly once.
  std::optional<std::vector<std::string>> order;
  std::size_t background_size = 100;
  std::optional<std::uint64_t> seed;  // Defaults to the explainer's seed.
};

Explanation break_down(const Explainer& explainer, const Instance& instance,
                       const BreakDownOptions& options = {});

struct ShapleyOptions {
  std::size_t b = 25;
  std::size_t background_size = 100;
  // Average over all p! orderings instead of sampling. Requires p <= 8.
  bool full_enumeration = false;
  std::optional<std::uint64_t> seed;
};

inline constexpr std::size_t kMaxEnumeratedFeatures = 8;

// The `b` orderings the sampled estimator draws for `seed`; ordering i comes
// from its own substream so it is independent of evaluation order.
std::vector<std::vector<std::size_t>> sampled_orderings(std::size_t n_features,
                                                        std::size_t b,
                                                        std::uint64_t seed);

// All n! orderings in lexicographic order.
std::vector<std::vector<std::size_t>> all_orderings(std::size_t n_features);

Explanation shapley_values(const Explainer& explainer, const Instance& instance,
                           const ShapleyOptions& options = {});

struct CeterisParibusOptions {
  std::optional<std::vector<std::string>> variables;
  std::size_t grid_size = 51;
  bool uniform_grid = false;
};

Explanation ceteris_paribus(const Explainer& explainer,
                            const Instance& instance,
                            const CeterisParibusOptions& options = {});

// Evaluation grid for one column. Numeric: linear-interpolation quantiles at
// grid_size equally spaced probabilities (or equally spaced values between
// min and max when `uniform`), deduplicated and ascending. Categorical: all
// level indices in level order.
std::vector<double> grid_for_variable(
    const Dataset& data, std::string_view variable, std::size_t grid_size,
    bool uniform = false);

// Linear-interpolation quantiles of `values` at grid_size equally spaced
// probabilities in [0, 1], deduplicated and ascending.
std::vector<double> quantile_grid(std::vector<double> values,
                                  std::size_t grid_size);

}  // namespace exposition

#endif  // EXPOSITION_PREDICT_LEVEL_H_
