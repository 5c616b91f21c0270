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

#include "exposition/model_level.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exposition/error.h"
#include "exposition/metrics.h"
#include "exposition/parallel.h"
#include "exposition/predict_level.h"
#include "exposition/random.h"

namespace exposition {
namespace {

std::vector<std::size_t> resolve_variables(
    const Explainer& explainer,
    const std::optional<std::vector<std::string>>& names) {
  std::vector<std::size_t> out;
  if (!names) {
    out.resize(explainer.n_features());
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  for (const auto& name : *names) out.push_back(explainer.feature_index(name));
  return out;
}

std::vector<std::size_t> sample_rows(const Explainer& explainer,
                                     std::size_t sample_size,
                                     std::uint64_t seed) {
  if (sample_size == 0) throw ParameterError("sample_size must be at least 1");
  Rng rng = Rng::substream(seed, StreamTag::kRowSample);
  return sample_without_replacement(explainer.data().n_rows(), sample_size,
                                    rng);
}

}  // namespace

// ---------------------------------------------------------------------------
// Permutation importance

std::string_view loss_name(ImportanceLoss loss) {
  return loss == ImportanceLoss::kRmse ? "rmse" : "one_minus_auc";
}

std::string_view mode_name(ImportanceMode mode) {
  switch (mode) {
    case ImportanceMode::kRaw:
      return "raw";
    case ImportanceMode::kDifference:
      return "difference";
    case ImportanceMode::kRatio:
      return "ratio";
  }
  return "";
}

ImportanceLoss parse_loss(std::string_view name) {
  if (name == "rmse") return ImportanceLoss::kRmse;
  if (name == "one_minus_auc") return ImportanceLoss::kOneMinusAuc;
  throw ParameterError("unknown loss '" + std::string(name) + "'");
}

ImportanceMode parse_mode(std::string_view name) {
  if (name == "raw") return ImportanceMode::kRaw;
  if (name == "difference") return ImportanceMode::kDifference;
  if (name == "ratio") return ImportanceMode::kRatio;
  throw ParameterError("unknown importance mode '" + std::string(name) + "'");
}

double importance_loss(ImportanceLoss loss, std::span<const double> y,
                       std::span<const double> scores) {
  if (loss == ImportanceLoss::kRmse) return rmse(y, scores);
  return 1.0 - auc(y, scores);
}

Explanation permutation_importance(const Explainer& explainer,
                                   const ImportanceOptions& options) {
  const ImportanceLoss loss =
      options.loss.value_or(explainer.task() == TaskType::kRegression
                                ? ImportanceLoss::kRmse
                                : ImportanceLoss::kOneMinusAuc);
  const bool loss_fits_task =
      (loss == ImportanceLoss::kRmse) ==
      (explainer.task() == TaskType::kRegression);
  if (!loss_fits_task) {
    throw ParameterError("loss '" + std::string(loss_name(loss)) +
                         "' does not fit a " +
                         std::string(task_name(explainer.task())) + " task");
  }
  if (options.b < 1) throw ParameterError("B must be at least 1");
  const std::uint64_t seed = options.seed.value_or(explainer.seed());
  const std::size_t p = explainer.n_features();

  const std::vector<std::size_t> rows =
      sample_rows(explainer, options.sample_size, seed);
  const Rows x = explainer.features().select(rows);
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = explainer.target()[rows[i]];
  const double baseline_loss =
      importance_loss(loss, y, predict_batch(explainer, x));

  // Index p is the `_baseline_` row (whole-row permutation).
  std::vector<std::vector<double>> dropout(p + 1,
                                           std::vector<double>(options.b));
  parallel_for((p + 1) * options.b, [&](std::size_t task) {
    const std::size_t j = task / options.b;
    const std::size_t b = task % options.b;
    Rng rng = Rng::substream(seed, StreamTag::kPermutation, {j, b});
    const std::vector<std::size_t> perm = random_permutation(x.n_rows(), rng);
    Rows permuted = x;
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
      if (j == p) {
        for (std::size_t c = 0; c < p; ++c) permuted(i, c) = x(perm[i], c);
      } else {
        permuted(i, j) = x(perm[i], j);
      }
    }
    dropout[j][b] = importance_loss(loss, y, predict_batch(explainer, permuted));
  });

  auto mean_loss = [&](const std::vector<double>& losses) {
    double delta = 0;
    for (const double l : losses) delta += l - baseline_loss;
    return baseline_loss + delta / static_cast<double>(losses.size());
  };
  auto importance = [&](double mean) {
    switch (options.mode) {
      case ImportanceMode::kRaw:
        return mean;
      case ImportanceMode::kDifference:
        return mean - baseline_loss;
      case ImportanceMode::kRatio:
        return mean / baseline_loss;
    }
    return mean;
  };

  std::vector<double> means(p + 1);
  for (std::size_t j = 0; j <= p; ++j) means[j] = mean_loss(dropout[j]);
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return means[a] > means[b];
                   });

  std::vector<std::string> variable;
  std::vector<double> mean_column, importance_column;
  Json bars = Json::array();
  auto push = [&](const std::string& name, double mean,
                  const std::vector<double>& losses) {
    variable.push_back(name);
    mean_column.push_back(mean);
    importance_column.push_back(importance(mean));
    bars.push_back({{"variable", name},
                    {"mean_loss", mean},
                    {"importance", importance_column.back()},
                    {"dropout", losses}});
  };
  push("_full_model_", baseline_loss, {});
  for (const std::size_t j : order) {
    push(explainer.feature_schema()[j].name, means[j], dropout[j]);
  }
  push("_baseline_", means[p], dropout[p]);

  Explanation out;
  out.kind = "importance";
  out.model_label = explainer.label();
  out.result.add("variable", std::move(variable));
  out.result.add("mean_loss", std::move(mean_column));
  out.result.add("importance", std::move(importance_column));
  out.chart = {{"type", "importance"},
               {"loss", loss_name(loss)},
               {"mode", mode_name(options.mode)},
               {"full_model_loss", baseline_loss},
               {"bars", std::move(bars)}};
  out.meta = {{"seed", seed},
              {"B", options.b},
              {"sample_size", options.sample_size},
              {"sample_rows", rows.size()},
              {"loss", loss_name(loss)},
              {"mode", mode_name(options.mode)}};
  return out;
}

// ---------------------------------------------------------------------------
// Profiles

std::string_view profile_kind_name(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::kPdp:
      return "pdp";
    case ProfileKind::kAle:
      return "ale";
    case ProfileKind::kIce:
      return "ice";
  }
  return "";
}

ProfileKind parse_profile_kind(std::string_view name) {
  if (name == "pdp") return ProfileKind::kPdp;
  if (name == "ale") return ProfileKind::kAle;
  if (name == "ice") return ProfileKind::kIce;
  throw ParameterError("unknown profile kind '" + std::string(name) + "'");
}

namespace {

struct AleCurve {
  std::vector<double> edges;
  std::vector<double> values;
  std::vector<std::size_t> bin_counts;
};

// Bin index of `v`: bin k covers (edges[k], edges[k+1]], bin 0 also holds
// edges[0].
std::size_t ale_bin(const std::vector<double>& edges, double v) {
  const auto it = std::lower_bound(edges.begin() + 1, edges.end(), v);
  const auto k = static_cast<std::size_t>(it - (edges.begin() + 1));
  return std::min(k, edges.size() - 2);
}

AleCurve accumulated_local_effects(const Explainer& explainer, const Rows& x,
                                   std::size_t f, std::size_t grid_size) {
  std::vector<double> values(x.n_rows());
  for (std::size_t i = 0; i < x.n_rows(); ++i) values[i] = x(i, f);
  AleCurve curve;
  curve.edges = quantile_grid(values, grid_size);
  if (curve.edges.size() < 2) {
    curve.values.assign(curve.edges.size(), 0.0);
    return curve;
  }
  // Merge empty bins into their left neighbor by dropping their lower edge.
  for (;;) {
    std::vector<std::size_t> counts(curve.edges.size() - 1, 0);
    for (const double v : values) ++counts[ale_bin(curve.edges, v)];
    std::vector<double> kept{curve.edges.front()};
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k] == 0 && k > 0) {
        kept.back() = curve.edges[k + 1];
      } else {
        kept.push_back(curve.edges[k + 1]);
      }
    }
    if (kept.size() == curve.edges.size()) {
      curve.bin_counts = std::move(counts);
      break;
    }
    curve.edges = std::move(kept);
  }

  const std::size_t n_bins = curve.bin_counts.size();
  std::vector<std::size_t> bin_of(x.n_rows());
  for (std::size_t i = 0; i < x.n_rows(); ++i) {
    bin_of[i] = ale_bin(curve.edges, values[i]);
  }
  Rows lower = x, upper = x;
  for (std::size_t i = 0; i < x.n_rows(); ++i) {
    lower(i, f) = curve.edges[bin_of[i]];
    upper(i, f) = curve.edges[bin_of[i] + 1];
  }
  const std::vector<double> f_lower = predict_batch(explainer, lower);
  const std::vector<double> f_upper = predict_batch(explainer, upper);
  std::vector<double> delta_sum(n_bins, 0.0);
  for (std::size_t i = 0; i < x.n_rows(); ++i) {
    delta_sum[bin_of[i]] += f_upper[i] - f_lower[i];
  }
  curve.values.assign(n_bins + 1, 0.0);
  for (std::size_t k = 0; k < n_bins; ++k) {
    curve.values[k + 1] =
        curve.values[k] +
        delta_sum[k] / static_cast<double>(curve.bin_counts[k]);
  }
  double weighted = 0;
  for (std::size_t k = 0; k < n_bins; ++k) {
    weighted += static_cast<double>(curve.bin_counts[k]) *
                (curve.values[k] + curve.values[k + 1]) / 2;
  }
  const double shift = weighted / static_cast<double>(x.n_rows());
  for (double& v : curve.values) v -= shift;
  return curve;
}

}  // namespace

Explanation model_profile(const Explainer& explainer,
                          const ProfileOptions& options) {
  const std::vector<std::size_t> variables =
      resolve_variables(explainer, options.variables);
  const Schema& schema = explainer.feature_schema();
  if (options.kind == ProfileKind::kAle) {
    for (const std::size_t f : variables) {
      if (!schema[f].is_numeric()) {
        throw ParameterError("ale requires a numeric variable, '" +
                             schema[f].name + "' is categorical");
      }
    }
  }
  const std::uint64_t seed = options.seed.value_or(explainer.seed());
  const std::vector<std::size_t> rows =
      sample_rows(explainer, options.sample_size, seed);
  const Rows x = explainer.features().select(rows);
  const std::size_t m = x.n_rows();

  struct Profile {
    std::vector<double> grid;
    std::vector<double> values;              // pdp / ale
    std::vector<std::vector<double>> curves;  // ice, one per sampled row
  };
  std::vector<Profile> profiles(variables.size());
  parallel_for(variables.size(), [&](std::size_t v) {
    const std::size_t f = variables[v];
    Profile& profile = profiles[v];
    if (options.kind == ProfileKind::kAle) {
      AleCurve curve =
          accumulated_local_effects(explainer, x, f, options.grid_size);
      profile.grid = std::move(curve.edges);
      profile.values = std::move(curve.values);
      return;
    }
    profile.grid = grid_for_variable(explainer.data(), schema[f].name,
                                     options.grid_size);
    const std::size_t g_count = profile.grid.size();
    Rows sweep(explainer.data().feature_schema(), m * g_count);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t g = 0; g < g_count; ++g) {
        auto row = sweep.row(i * g_count + g);
        const auto source = x.row(i);
        std::copy(source.begin(), source.end(), row.begin());
        row[f] = profile.grid[g];
      }
    }
    const std::vector<double> scores = predict_batch(explainer, sweep);
    profile.curves.assign(m, std::vector<double>(g_count));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t g = 0; g < g_count; ++g) {
        profile.curves[i][g] = scores[i * g_count + g];
      }
    }
    profile.values.assign(g_count, 0.0);
    for (std::size_t g = 0; g < g_count; ++g) {
      double sum = 0;
      for (std::size_t i = 0; i < m; ++i) sum += profile.curves[i][g];
      profile.values[g] = sum / static_cast<double>(m);
    }
    if (options.kind == ProfileKind::kIce && options.center_ice) {
      for (auto& curve : profile.curves) {
        const double anchor = curve.front();
        for (double& value : curve) value -= anchor;
      }
    }
  });

  Explanation out;
  out.kind = "profile";
  out.model_label = explainer.label();
  std::vector<std::string> variable_column, label_column;
  std::vector<double> x_column, value_column;
  std::vector<std::int64_t> row_column;
  Json series = Json::array();
  for (std::size_t v = 0; v < variables.size(); ++v) {
    const ColumnSchema& column = schema[variables[v]];
    const Profile& profile = profiles[v];
    Json labels = Json::array();
    for (const double g : profile.grid) labels.push_back(column.render(g));
    Json entry = {{"variable", column.name},
                  {"variable_kind", column_kind_name(column.kind)},
                  {"x", profile.grid},
                  {"labels", labels}};
    if (options.kind == ProfileKind::kIce) {
      Json curves = Json::array();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t g = 0; g < profile.grid.size(); ++g) {
          variable_column.push_back(column.name);
          row_column.push_back(static_cast<std::int64_t>(rows[i]));
          x_column.push_back(profile.grid[g]);
          label_column.push_back(labels[g].get<std::string>());
          value_column.push_back(profile.curves[i][g]);
        }
        curves.push_back({{"row_id", rows[i]}, {"y", profile.curves[i]}});
      }
      entry["curves"] = std::move(curves);
    } else {
      for (std::size_t g = 0; g < profile.grid.size(); ++g) {
        variable_column.push_back(column.name);
        x_column.push_back(profile.grid[g]);
        label_column.push_back(labels[g].get<std::string>());
        value_column.push_back(profile.values[g]);
      }
      entry["y"] = profile.values;
    }
    series.push_back(std::move(entry));
  }
  out.result.add("variable", std::move(variable_column));
  if (options.kind == ProfileKind::kIce) {
    out.result.add("row_id", std::move(row_column));
  }
  out.result.add("x", std::move(x_column));
  out.result.add("x_label", std::move(label_column));
  out.result.add("value", std::move(value_column));
  out.chart = {{"type", "profile"},
               {"profile_kind", profile_kind_name(options.kind)},
               {"series", std::move(series)}};
  out.meta = {{"seed", seed},
              {"profile_kind", profile_kind_name(options.kind)},
              {"grid_size", options.grid_size},
              {"sample_size", options.sample_size},
              {"sample_rows", m}};
  if (options.kind == ProfileKind::kIce) {
    out.meta["center_ice"] = options.center_ice;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residuals

Explanation residual_diagnostics(const Explainer& explainer) {
  const std::vector<double> scores =
      predict_batch(explainer, explainer.features());
  const auto y = explainer.target();
  const std::size_t n = scores.size();
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - scores[i];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return std::abs(residual[a]) > std::abs(residual[b]);
                   });

  std::vector<std::int64_t> row_id(n);
  std::vector<double> y_column(n), y_hat(n), res(n), abs_res(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    row_id[k] = static_cast<std::int64_t>(i);
    y_column[k] = y[i];
    y_hat[k] = scores[i];
    res[k] = residual[i];
    abs_res[k] = std::abs(residual[i]);
  }

  // Histogram with Sturges' bin count over [min, max] residual.
  const auto [lo_it, hi_it] = std::minmax_element(residual.begin(), residual.end());
  const double lo = *lo_it, hi = *hi_it;
  const std::size_t n_bins =
      lo == hi ? 1
               : static_cast<std::size_t>(
                     std::ceil(std::log2(static_cast<double>(n)))) + 1;
  std::vector<double> edges(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k) {
    edges[k] = k == n_bins ? hi
                           : lo + (hi - lo) * static_cast<double>(k) /
                                      static_cast<double>(n_bins);
  }
  if (lo == hi) edges = {lo, hi};
  std::vector<std::size_t> counts(n_bins, 0);
  for (const double r : residual) {
    std::size_t k =
        static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), r) -
                                 edges.begin());
    k = k == 0 ? 0 : k - 1;
    ++counts[std::min(k, n_bins - 1)];
  }

  const RegressionMetrics m = regression_metrics(y, scores);
  Explanation out;
  out.kind = "residuals";
  out.model_label = explainer.label();
  out.result.add("row_id", row_id);
  out.result.add("y", std::move(y_column));
  out.result.add("y_hat", y_hat);
  out.result.add("residual", res);
  out.result.add("abs_residual", std::move(abs_res));
  out.chart = {{"type", "residuals"},
               {"scatter",
                {{"row_id", std::move(row_id)},
                 {"y_hat", std::move(y_hat)},
                 {"residual", std::move(res)}}},
               {"histogram", {{"edges", edges}, {"counts", counts}}},
               {"summary", {{"mae", m.mae}, {"rmse", m.rmse}}}};
  out.meta = {{"n", n}, {"task", task_name(explainer.task())}};
  return out;
}

// ---------------------------------------------------------------------------
// Surrogate

SurrogateFit fit_surrogate(const Explainer& explainer,
                           const SurrogateOptions& options) {
  const std::vector<double> black_box =
      predict_batch(explainer, explainer.features());
  SurrogateFit fit{RegressionTree::fit(explainer.features(), black_box,
                                       {options.max_depth, options.min_leaf}),
                   0.0};
  const std::vector<double> mimic = fit.tree.predict(explainer.features());
  fit.fidelity = regression_metrics(black_box, mimic).r2;
  return fit;
}

Explanation fit_surrogate_tree(const Explainer& explainer,
                               const SurrogateOptions& options) {
  const SurrogateFit fit = fit_surrogate(explainer, options);
  const Schema& schema = explainer.feature_schema();
  std::vector<std::int64_t> node_id, left, right, n;
  std::vector<std::string> variable, split;
  std::vector<double> value;
  const auto& nodes = fit.tree.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& node = nodes[i];
    node_id.push_back(static_cast<std::int64_t>(i));
    n.push_back(static_cast<std::int64_t>(node.n));
    value.push_back(node.value);
    if (node.is_leaf) {
      variable.emplace_back();
      split.emplace_back();
      left.push_back(-1);
      right.push_back(-1);
      continue;
    }
    const ColumnSchema& column = schema[node.feature];
    variable.push_back(column.name);
    if (column.is_numeric()) {
      split.push_back("< " + column.render(node.threshold));
    } else {
      std::string levels = "in {";
      for (std::size_t k = 0; k < node.left_levels.size(); ++k) {
        if (k > 0) levels += ", ";
        levels += column.levels[node.left_levels[k]];
      }
      split.push_back(levels + "}");
    }
    left.push_back(static_cast<std::int64_t>(node.left));
    right.push_back(static_cast<std::int64_t>(node.right));
  }

  Explanation out;
  out.kind = "surrogate";
  out.model_label = explainer.label();
  out.result.add("node_id", std::move(node_id));
  out.result.add("variable", std::move(variable));
  out.result.add("split", std::move(split));
  out.result.add("n", std::move(n));
  out.result.add("value", std::move(value));
  out.result.add("left", std::move(left));
  out.result.add("right", std::move(right));
  out.chart = {{"type", "tree"},
               {"fidelity", fit.fidelity},
               {"tree", fit.tree.to_json(schema)}};
  out.meta = {{"max_depth", options.max_depth},
              {"min_leaf", options.min_leaf},
              {"fidelity", fit.fidelity},
              {"depth", fit.tree.depth()},
              {"n_leaves", fit.tree.n_leaves()}};
  return out;
}

}  // namespace exposition
