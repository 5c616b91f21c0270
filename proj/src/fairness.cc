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

#include "exposition/fairness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "exposition/error.h"
#include "exposition/format.h"

namespace exposition {
namespace {

std::optional<double> ratio_of(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::string fixed3(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3f", v);
  return buffer;
}

std::size_t subgroup_index(const std::vector<std::string>& subgroups,
                           std::string_view name) {
  const auto it = std::find(subgroups.begin(), subgroups.end(), name);
  if (it == subgroups.end()) {
    throw ParameterError("unknown subgroup '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - subgroups.begin());
}

}  // namespace

std::string_view metric_name(FairnessMetric metric) {
  switch (metric) {
    case FairnessMetric::kTpr:
      return "TPR";
    case FairnessMetric::kAcc:
      return "ACC";
    case FairnessMetric::kPpv:
      return "PPV";
    case FairnessMetric::kFpr:
      return "FPR";
    case FairnessMetric::kStp:
      return "STP";
  }
  return "";
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::kFair:
      return "fair";
    case Verdict::kBorderline:
      return "borderline";
    case Verdict::kNotFair:
      return "not_fair";
  }
  return "";
}

SubgroupConfusion tally_confusion(std::span<const double> y,
                                  std::span<const double> scores,
                                  std::span<const std::size_t> group,
                                  const std::vector<std::string>& group_names,
                                  const CutoffMap& cutoffs) {
  for (const auto& [name, cutoff] : cutoffs) {
    if (std::find(group_names.begin(), group_names.end(), name) ==
        group_names.end()) {
      throw ParameterError("cutoff given for unknown subgroup '" + name + "'");
    }
    if (!(cutoff >= 0.0 && cutoff <= 1.0)) {
      throw ParameterError("cutoff for '" + name + "' outside [0, 1]");
    }
  }
  std::vector<ConfusionCounts> all(group_names.size());
  std::vector<double> all_cutoffs(group_names.size(), kDefaultCutoff);
  for (std::size_t g = 0; g < group_names.size(); ++g) {
    if (const auto it = cutoffs.find(group_names[g]); it != cutoffs.end()) {
      all_cutoffs[g] = it->second;
    }
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    ConfusionCounts& c = all[group[i]];
    const bool predicted = scores[i] >= all_cutoffs[group[i]];
    const bool actual = y[i] == 1.0;
    if (predicted && actual) ++c.tp;
    if (predicted && !actual) ++c.fp;
    if (!predicted && !actual) ++c.tn;
    if (!predicted && actual) ++c.fn;
  }
  SubgroupConfusion out;
  for (std::size_t g = 0; g < group_names.size(); ++g) {
    if (all[g].n() == 0) {
      out.warnings.push_back("subgroup '" + group_names[g] +
                             "' has no rows and is excluded");
      continue;
    }
    out.subgroups.push_back(group_names[g]);
    out.counts.push_back(all[g]);
    out.cutoffs.push_back(all_cutoffs[g]);
  }
  return out;
}

SubgroupConfusion subgroup_confusion(const Explainer& explainer,
                                     std::string_view protected_column,
                                     const CutoffMap& cutoffs) {
  if (explainer.task() != TaskType::kClassification) {
    throw ParameterError("fairness analysis requires a classification task");
  }
  const Dataset& data = explainer.data();
  const auto column = data.column_index(protected_column);
  if (!column) {
    throw SchemaError("unknown protected column '" +
                      std::string(protected_column) + "'");
  }
  const ColumnSchema& schema = data.schema()[*column];
  if (schema.is_numeric()) {
    throw ParameterError("protected column '" + schema.name +
                         "' must be categorical");
  }
  const std::vector<double> scores =
      predict_batch(explainer, explainer.features());
  const auto values = data.column(*column);
  std::vector<std::size_t> group(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    group[i] = static_cast<std::size_t>(values[i]);
  }
  return tally_confusion(explainer.target(), scores, group, schema.levels,
                         cutoffs);
}

std::optional<double> MetricScores::get(std::string_view subgroup,
                                        FairnessMetric metric) const {
  return values[subgroup_index(subgroups, subgroup)]
               [static_cast<std::size_t>(metric)];
}

MetricScores fairness_metrics(const SubgroupConfusion& confusion) {
  MetricScores out;
  out.subgroups = confusion.subgroups;
  for (const ConfusionCounts& c : confusion.counts) {
    MetricValues v;
    v[static_cast<std::size_t>(FairnessMetric::kTpr)] = ratio_of(c.tp, c.tp + c.fn);
    v[static_cast<std::size_t>(FairnessMetric::kAcc)] = ratio_of(c.tp + c.tn, c.n());
    v[static_cast<std::size_t>(FairnessMetric::kPpv)] = ratio_of(c.tp, c.tp + c.fp);
    v[static_cast<std::size_t>(FairnessMetric::kFpr)] = ratio_of(c.fp, c.fp + c.tn);
    v[static_cast<std::size_t>(FairnessMetric::kStp)] = ratio_of(c.tp + c.fp, c.n());
    out.values.push_back(v);
  }
  return out;
}

bool is_violation(double ratio, double epsilon) {
  return ratio < epsilon || ratio > 1.0 / epsilon;
}

FairnessReport fairness_report(const SubgroupConfusion& confusion,
                               std::string_view privileged, double epsilon,
                               std::string_view context) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ParameterError("epsilon must lie in (0, 1), got " +
                         format_shortest(epsilon));
  }
  FairnessReport report;
  report.privileged = std::string(privileged);
  report.epsilon = epsilon;
  report.scores = fairness_metrics(confusion);
  const std::vector<std::string>& subgroups = report.scores.subgroups;
  const std::size_t priv = subgroup_index(subgroups, privileged);
  const MetricValues& priv_values = report.scores.values[priv];
  const double upper = 1.0 / epsilon;

  std::vector<std::string>& lines = report.narrative;
  if (!context.empty()) lines.emplace_back(context);
  lines.push_back("Privileged subgroup: '" + report.privileged + "'.");
  lines.push_back("A metric ratio (subgroup / privileged) is acceptable in [" +
                  format_shortest(epsilon) + ", " + format_shortest(upper) +
                  "] (epsilon = " + format_shortest(epsilon) + ").");
  for (const std::string& warning : confusion.warnings) {
    lines.push_back("Warning: " + warning + ".");
  }

  report.ratios.assign(subgroups.size(), MetricValues{});
  for (const FairnessMetric metric : kFairnessMetrics) {
    const auto m = static_cast<std::size_t>(metric);
    const std::string name(metric_name(metric));
    const std::optional<double> base = priv_values[m];
    if (!base || *base == 0.0) {
      report.skipped_metrics.push_back(metric);
      lines.push_back("Warning: " + name + " is " +
                      (base ? "zero" : "undefined") +
                      " for the privileged subgroup; " + name + " skipped.");
      continue;
    }
    std::string line = name + ":";
    std::size_t metric_violations = 0;
    for (std::size_t g = 0; g < subgroups.size(); ++g) {
      if (g == priv) {
        report.ratios[g][m] = 1.0;
        continue;
      }
      const std::optional<double> value = report.scores.values[g][m];
      if (!value) {
        ++report.undefined_ratios;
        line += " " + subgroups[g] + " undefined (skipped);";
        continue;
      }
      const double ratio = *value / *base;
      report.ratios[g][m] = ratio;
      const bool violation = is_violation(ratio, epsilon);
      line += " " + subgroups[g] + " " + fixed3(ratio) +
              (violation ? " VIOLATION;" : " ok;");
      if (violation) {
        ++metric_violations;
        report.violations.push_back({subgroups[g], metric, ratio});
      }
    }
    if (line.back() == ';') line.pop_back();
    if (line.back() == ':') line += " no unprivileged subgroups";
    lines.push_back(line);
    if (metric == FairnessMetric::kFpr && metric_violations > 0) {
      lines.push_back("Note: an FPR ratio above " + format_shortest(upper) +
                      " means the subgroup receives more false positives than "
                      "the privileged one.");
    }
  }
  lines.push_back("Undefined metric ratios skipped: " +
                  std::to_string(report.undefined_ratios) + ".");

  const std::size_t count = report.violations.size();
  report.verdict = count == 0   ? Verdict::kFair
                   : count == 1 ? Verdict::kBorderline
                                : Verdict::kNotFair;
  std::string summary = "Verdict: " + std::string(verdict_name(report.verdict)) +
                        " (" + std::to_string(count) + " violation" +
                        (count == 1 ? "" : "s");
  for (std::size_t i = 0; i < count; ++i) {
    const Violation& v = report.violations[i];
    summary += (i == 0 ? ": " : ", ") + std::string(metric_name(v.metric)) +
               " for '" + v.subgroup + "' at " + fixed3(v.ratio);
  }
  lines.push_back(summary + ").");
  return report;
}

ParityLoss parity_loss(const MetricScores& scores,
                       std::string_view privileged) {
  const std::size_t priv = subgroup_index(scores.subgroups, privileged);
  ParityLoss out;
  for (const FairnessMetric metric : kFairnessMetrics) {
    const auto m = static_cast<std::size_t>(metric);
    const std::optional<double> base = scores.values[priv][m];
    if (!base || *base == 0.0) continue;
    double total = 0;
    for (std::size_t g = 0; g < scores.subgroups.size(); ++g) {
      if (g == priv) continue;
      const std::optional<double> value = scores.values[g][m];
      if (!value || *value == 0.0) {
        out.skipped.push_back(scores.subgroups[g] + ":" +
                              std::string(metric_name(metric)));
        continue;
      }
      total += std::abs(std::log(*value / *base));
    }
    out.values[m] = total;
  }
  return out;
}

Explanation fairness_check(const Explainer& explainer,
                           const FairnessOptions& options) {
  const SubgroupConfusion confusion =
      subgroup_confusion(explainer, options.protected_column, options.cutoffs);
  const FairnessReport report = fairness_report(
      confusion, options.privileged, options.epsilon,
      "Fairness check of model '" + explainer.label() +
          "' on protected attribute '" + options.protected_column + "'.");
  const ParityLoss parity = parity_loss(report.scores, options.privileged);

  std::vector<std::string> subgroup_column, metric_column;
  std::vector<std::optional<double>> score_column, ratio_column;
  std::vector<std::int64_t> violation_column, privileged_column;
  Json metrics = Json::array();
  for (const FairnessMetric metric : kFairnessMetrics) {
    const auto m = static_cast<std::size_t>(metric);
    const bool skipped =
        std::find(report.skipped_metrics.begin(), report.skipped_metrics.end(),
                  metric) != report.skipped_metrics.end();
    Json entries = Json::array();
    for (std::size_t g = 0; g < report.scores.subgroups.size(); ++g) {
      const std::string& subgroup = report.scores.subgroups[g];
      const std::optional<double> score = report.scores.values[g][m];
      const std::optional<double> ratio = report.ratios[g][m];
      const bool is_priv = subgroup == report.privileged;
      const bool violation = !is_priv && ratio &&
                             is_violation(*ratio, report.epsilon);
      subgroup_column.push_back(subgroup);
      metric_column.emplace_back(metric_name(metric));
      score_column.push_back(score);
      ratio_column.push_back(ratio);
      violation_column.push_back(violation ? 1 : 0);
      privileged_column.push_back(is_priv ? 1 : 0);
      entries.push_back({{"subgroup", subgroup},
                         {"score", score ? Json(*score) : Json(nullptr)},
                         {"ratio", ratio ? Json(*ratio) : Json(nullptr)},
                         {"privileged", is_priv},
                         {"violation", violation}});
    }
    metrics.push_back({{"metric", metric_name(metric)},
                       {"skipped", skipped},
                       {"subgroups", std::move(entries)}});
  }

  Explanation out;
  out.kind = "fairness";
  out.model_label = explainer.label();
  out.result.add("subgroup", std::move(subgroup_column));
  out.result.add("metric", std::move(metric_column));
  out.result.add("score", std::move(score_column));
  out.result.add("ratio", std::move(ratio_column));
  out.result.add("violation", std::move(violation_column));
  out.result.add("privileged", std::move(privileged_column));

  Json parity_json = Json::object();
  for (const FairnessMetric metric : kFairnessMetrics) {
    const auto& v = parity.values[static_cast<std::size_t>(metric)];
    parity_json[std::string(metric_name(metric))] = v ? Json(*v) : Json(nullptr);
  }
  Json confusion_json = Json::array();
  for (std::size_t g = 0; g < confusion.subgroups.size(); ++g) {
    const ConfusionCounts& c = confusion.counts[g];
    confusion_json.push_back({{"subgroup", confusion.subgroups[g]},
                              {"cutoff", confusion.cutoffs[g]},
                              {"tp", c.tp},
                              {"fp", c.fp},
                              {"tn", c.tn},
                              {"fn", c.fn}});
  }
  out.chart = {{"type", "fairness_check"},
               {"epsilon", report.epsilon},
               {"band", {report.epsilon, 1.0 / report.epsilon}},
               {"privileged", report.privileged},
               {"metrics", std::move(metrics)},
               {"verdict", verdict_name(report.verdict)},
               {"narrative", report.narrative},
               {"parity_loss", std::move(parity_json)},
               {"parity_loss_skipped", parity.skipped},
               {"confusion", std::move(confusion_json)}};
  Json cutoffs = Json::object();
  for (const auto& [name, value] : options.cutoffs) cutoffs[name] = value;
  out.meta = {{"protected", options.protected_column},
              {"privileged", options.privileged},
              {"epsilon", options.epsilon},
              {"cutoffs", std::move(cutoffs)},
              {"verdict", verdict_name(report.verdict)},
              {"violations", report.violations.size()}};
  return out;
}

}  // namespace exposition
