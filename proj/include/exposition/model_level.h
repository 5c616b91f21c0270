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

// Dataset-level explanations: permutation importance, PDP/ALE/ICE profiles,
// residual diagnostics and a surrogate tree.

#ifndef EXPOSITION_MODEL_LEVEL_H_
#define EXPOSITION_MODEL_LEVEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exposition/cart.h"
#include "exposition/explainer.h"
#include "exposition/explanation.h"

namespace exposition {

enum class ImportanceLoss { kRmse, kOneMinusAuc };
enum class ImportanceMode { kRaw, kDifference, kRatio };

std::string_view loss_name(ImportanceLoss loss);
std::string_view mode_name(ImportanceMode mode);
ImportanceLoss parse_loss(std::string_view name);
ImportanceMode parse_mode(std::string_view name);

// Loss of `scores` against `y` for the given loss.
double importance_loss(ImportanceLoss loss, std::span<const double> y,
                       std::span<const double> scores);

struct ImportanceOptions {
  // Defaults to rmse for regression and one_minus_auc for classification.
  std::optional<ImportanceLoss> loss;
  ImportanceMode mode = ImportanceMode::kDifference;
  std::size_t b = 10;
  std::size_t sample_size = 1000;
  std::optional<std::uint64_t> seed;
};

// Rows scored: a seeded sample of min(sample_size, n) rows (all rows, in
// order, when sample_size >= n). Baseline loss L0 on the sample. For variable
// j and repetition b, column j is permuted with substream (seed, j, b) and the
// loss L_jb recomputed. The synthetic `_baseline_` row permutes whole rows of
// the explanatory columns with substream (seed, p, b).
//
// Mean loss is accumulated as L0 + (sum_b (L_jb - L0)) / B, so a column whose
// permutation leaves every prediction unchanged has difference exactly 0 and
// ratio exactly 1. Importance: raw = mean loss, difference = mean - L0,
// ratio = mean / L0.
Explanation permutation_importance(const Explainer& explainer,
                                   const ImportanceOptions& options = {});

enum class ProfileKind { kPdp, kAle, kIce };

std::string_view profile_kind_name(ProfileKind kind);
ProfileKind parse_profile_kind(std::string_view name);

struct ProfileOptions {
  ProfileKind kind = ProfileKind::kPdp;
  std::optional<std::vector<std::string>> variables;
  std::size_t grid_size = 51;
  std::size_t sample_size = 100;
  bool center_ice = true;
  std::optional<std::uint64_t> seed;
};

// pdp: per grid point, mean over the sampled rows of their ceteris-paribus
// predictions (summed in row order). ice: the per-row curves, each shifted by
// its value at the first grid point when center_ice. ale (numeric only):
// grid_size - 1 quantile bins over the sampled values, empty bins merged into
// their left neighbor; per-bin mean of f(upper edge) - f(lower edge);
// accumulated left to right and centered so the bin-count weighted mean of
// the bin midpoint values is 0.
Explanation model_profile(const Explainer& explainer,
                          const ProfileOptions& options = {});

// Residuals y - y_hat on every row, sorted by |residual| descending with ties
// broken by row id ascending.
Explanation residual_diagnostics(const Explainer& explainer);

struct SurrogateOptions {
  std::size_t max_depth = 3;
  std::size_t min_leaf = 5;
};

struct SurrogateFit {
  RegressionTree tree;
  // R^2 of tree output against black-box output on the training rows; 1 when
  // the black box is constant and matched exactly.
  double fidelity = 0;
};

SurrogateFit fit_surrogate(const Explainer& explainer,
                           const SurrogateOptions& options = {});

Explanation fit_surrogate_tree(const Explainer& explainer,
                               const SurrogateOptions& options = {});

}  // namespace exposition

#endif  // EXPOSITION_MODEL_LEVEL_H_
