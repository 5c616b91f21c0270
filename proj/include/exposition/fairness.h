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

// Group fairness of binary classifiers.
//
// Rows are split by a categorical protected attribute; each subgroup gets a
// confusion matrix at its own cutoff (predicted positive iff score >= cutoff)
// and five rates:
//   TPR = TP / (TP + FN)      ACC = (TP + TN) / n     PPV = TP / (TP + FP)
//   FPR = FP / (FP + TN)      STP = (TP + FP) / n
// A rate with a zero denominator is undefined. Each unprivileged subgroup's
// rate is divided by the privileged subgroup's; a defined ratio outside
// [epsilon, 1 / epsilon] is a violation.

#ifndef EXPOSITION_FAIRNESS_H_
#define EXPOSITION_FAIRNESS_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exposition/explainer.h"
#include "exposition/explanation.h"

namespace exposition {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t n() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct SubgroupConfusion {
  std::vector<std::string> subgroups;
  std::vector<ConfusionCounts> counts;  // Parallel to `subgroups`.
  std::vector<double> cutoffs;          // Parallel to `subgroups`.
  // Subgroups dropped for having no rows, and similar notes.
  std::vector<std::string> warnings;
};

// Subgroup name -> cutoff. Subgroups not listed use 0.5.
using CutoffMap = std::map<std::string, double, std::less<>>;

inline constexpr double kDefaultCutoff = 0.5;

// Tally from raw arrays. `group[i]` indexes into `group_names`.
SubgroupConfusion tally_confusion(std::span<const double> y,
                                  std::span<const double> scores,
                                  std::span<const std::size_t> group,
                                  const std::vector<std::string>& group_names,
                                  const CutoffMap& cutoffs = {});

// Requires a classification explainer and a categorical protected column.
SubgroupConfusion subgroup_confusion(const Explainer& explainer,
                                     std::string_view protected_column,
                                     const CutoffMap& cutoffs = {});

enum class FairnessMetric { kTpr = 0, kAcc, kPpv, kFpr, kStp };

inline constexpr std::array<FairnessMetric, 5> kFairnessMetrics = {
    FairnessMetric::kTpr, FairnessMetric::kAcc, FairnessMetric::kPpv,
    FairnessMetric::kFpr, FairnessMetric::kStp};

std::string_view metric_name(FairnessMetric metric);

using MetricValues = std::array<std::optional<double>, 5>;

struct MetricScores {
  std::vector<std::string> subgroups;
  std::vector<MetricValues> values;  // Indexed by subgroup, then metric.

  std::optional<double> get(std::string_view subgroup,
                            FairnessMetric metric) const;
};

MetricScores fairness_metrics(const SubgroupConfusion& confusion);

// r < epsilon || r > 1 / epsilon.
bool is_violation(double ratio, double epsilon);

enum class Verdict { kFair, kBorderline, kNotFair };

std::string_view verdict_name(Verdict verdict);

struct Violation {
  std::string subgroup;
  FairnessMetric metric;
  double ratio;
};

struct FairnessReport {
  std::string privileged;
  double epsilon = 0.8;
  MetricScores scores;
  // Indexed like scores.subgroups; the privileged entry holds exact 1s.
  std::vector<MetricValues> ratios;
  std::vector<Violation> violations;
  // Metrics dropped because the privileged value is undefined or zero.
  std::vector<FairnessMetric> skipped_metrics;
  std::size_t undefined_ratios = 0;  // Among metrics that were not skipped.
  Verdict verdict = Verdict::kFair;
  std::vector<std::string> narrative;
};

// Throws ParameterError when `privileged` is not a subgroup or epsilon is not
// in (0, 1).
FairnessReport fairness_report(const SubgroupConfusion& confusion,
                               std::string_view privileged, double epsilon,
                               std::string_view context = "");

struct FairnessOptions {
  std::string protected_column;
  std::string privileged;
  double epsilon = 0.8;
  CutoffMap cutoffs;
};

Explanation fairness_check(const Explainer& explainer,
                           const FairnessOptions& options);

struct ParityLoss {
  // Sum over unprivileged subgroups of |ln(m_sub / m_priv)|. nullopt when the
  // privileged value is undefined or zero.
  MetricValues values;
  // "<subgroup>:<metric>" entries skipped for undefined or zero values.
  std::vector<std::string> skipped;
};

ParityLoss parity_loss(const MetricScores& scores, std::string_view privileged);

}  // namespace exposition

#endif  // EXPOSITION_FAIRNESS_H_
