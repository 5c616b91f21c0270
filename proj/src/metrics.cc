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

#include "exposition/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "exposition/error.h"

namespace exposition {

RegressionMetrics regression_metrics(std::span<const double> y,
                                     std::span<const double> predicted) {
  RegressionMetrics m;
  const std::size_t n = y.size();
  if (n == 0) return m;
  double mean_y = 0;
  for (const double v : y) mean_y += v;
  mean_y /= static_cast<double>(n);
  double sse = 0, sst = 0, sae = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - predicted[i];
    sse += e * e;
    sae += std::abs(e);
    sst += (y[i] - mean_y) * (y[i] - mean_y);
  }
  m.mse = sse / static_cast<double>(n);
  m.rmse = std::sqrt(m.mse);
  m.mae = sae / static_cast<double>(n);
  if (sst == 0) {
    m.r2 = sse == 0 ? 1.0 : 0.0;
  } else {
    m.r2 = 1.0 - sse / sst;
  }
  return m;
}

double rmse(std::span<const double> y, std::span<const double> predicted) {
  double sse = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - predicted[i];
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(y.size()));
}

double auc(std::span<const double> y, std::span<const double> scores) {
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return scores[a] < scores[b];
  });
  double positive_rank_sum = 0;
  double n_positive = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    // Ranks i+1..j+1 share their average.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2;
    for (std::size_t k = i; k <= j; ++k) {
      if (y[order[k]] == 1) {
        positive_rank_sum += rank;
        n_positive += 1;
      }
    }
    i = j + 1;
  }
  const double n_negative = static_cast<double>(n) - n_positive;
  if (n_positive == 0 || n_negative == 0) {
    throw DegenerateTargetError("AUC is undefined for a single-class target");
  }
  return (positive_rank_sum - n_positive * (n_positive + 1) / 2) /
         (n_positive * n_negative);
}

ClassificationMetrics classification_metrics(std::span<const double> y,
                                             std::span<const double> scores,
                                             double cutoff) {
  ClassificationMetrics m;
  m.auc = auc(y, scores);
  double tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool predicted = scores[i] >= cutoff;
    const bool actual = y[i] == 1;
    if (predicted && actual) tp += 1;
    if (predicted && !actual) fp += 1;
    if (!predicted && !actual) tn += 1;
    if (!predicted && actual) fn += 1;
  }
  m.accuracy = (tp + tn) / static_cast<double>(y.size());
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0
             ? 2 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

}  // namespace exposition
