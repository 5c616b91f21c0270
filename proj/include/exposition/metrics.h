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

#ifndef EXPOSITION_METRICS_H_
#define EXPOSITION_METRICS_H_

#include <span>

namespace exposition {

struct RegressionMetrics {
  double mse = 0;
  double rmse = 0;
  double mae = 0;
  double r2 = 0;
};

struct ClassificationMetrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double auc = 0;
};

// R^2 uses the zero-variance convention: 1 for a perfect fit of a constant
// target, 0 otherwise.
RegressionMetrics regression_metrics(std::span<const double> y,
                                     std::span<const double> predicted);

// Predicted positive iff score >= cutoff. Precision, recall and F1 are 0 when
// their denominator is 0.
ClassificationMetrics classification_metrics(std::span<const double> y,
                                             std::span<const double> scores,
                                             double cutoff = 0.5);

// Area under the ROC curve from the Mann-Whitney rank statistic with tied
// scores sharing their average rank. Throws DegenerateTargetError when `y`
// does not contain both classes.
double auc(std::span<const double> y, std::span<const double> scores);

double rmse(std::span<const double> y, std::span<const double> predicted);

}  // namespace exposition

#endif  // EXPOSITION_METRICS_H_
