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

#include "exposition/predict_level.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "exposition/error.h"
#include "exposition/parallel.h"
#include "exposition/random.h"

namespace exposition {
namespace {

std::string sign_of(double v) {
  if (v > 0) return "+";
  if (v < 0) return "-";
  return "0";
}

void check_instance(const Explainer& explainer, const Instance& instance) {
  if (instance.values.size() != explainer.n_features()) {
    throw SchemaError("instance has " + std::to_string(instance.values.size()) +
                      " values, expected " +
                      std::to_string(explainer.n_features()));
  }
  const Schema& schema = explainer.feature_schema();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (!std::isfinite(instance.values[f])) {
      throw ParameterError("instance value for '" + schema[f].name +
                           "' is not finite");
    }
    if (!schema[f].is_numeric()) schema[f].render(instance.values[f]);
  }
}

std::vector<std::size_t> resolve_order(
    const Explainer& explainer, const std::vector<std::string>& names) {
  std::vector<std::size_t> order;
  std::set<std::size_t> seen;
  for (const auto& name : names) {
    const std::size_t f = explainer.feature_index(name);
    if (!seen.insert(f).second) {
      throw SchemaError("variable '" + name + "' repeated in order");
    }
    order.push_back(f);
  }
  if (order.size() != explainer.n_features()) {
    throw SchemaError("order must list every variable exactly once");
  }
  return order;
}

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

Json instance_json(const Explainer& explainer, const Instance& instance) {
  Json out = Json::object();
  const Schema& schema = explainer.feature_schema();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema[f].is_numeric()) {
      out[schema[f].name] = instance.values[f];
    } else {
      out[schema[f].name] = schema[f].render(instance.values[f]);
    }
  }
  return out;
}

// Attribution table shared by break-down and Shapley: an intercept row, one
// row per variable in display order, and a prediction row.
void fill_attribution_table(const Explainer& explainer,
                            const Instance& instance,
                            std::span<const std::size_t> display_order,
                            std::span<const double> contributions,
                            std::span<const double> sd, double intercept,
                            double prediction, Explanation& out, Json& bars) {
  const Schema& schema = explainer.feature_schema();
  std::vector<std::string> variable, variable_name, variable_value, sign;
  std::vector<double> contribution, cumulative, sd_column;
  std::vector<std::int64_t> position;

  auto push = [&](std::string label, std::string name, std::string value,
                  double c, double cum, double s) {
    variable.push_back(std::move(label));
    variable_name.push_back(std::move(name));
    variable_value.push_back(std::move(value));
    contribution.push_back(c);
    cumulative.push_back(cum);
    sign.push_back(sign_of(c));
    sd_column.push_back(s);
    position.push_back(static_cast<std::int64_t>(position.size()));
  };

  push("intercept", "", "", intercept, intercept, 0.0);
  double running = intercept;
  for (std::size_t k = 0; k < display_order.size(); ++k) {
    const std::size_t f = display_order[k];
    const std::string value = schema[f].render(instance.values[f]);
    const double start = running;
    running += contributions[f];
    push(schema[f].name + " = " + value, schema[f].name, value,
         contributions[f], running, sd.empty() ? 0.0 : sd[f]);
    Json bar = {{"variable", schema[f].name},
                {"value_label", value},
                {"contribution", contributions[f]},
                {"start", start},
                {"end", running},
                {"sign", sign_of(contributions[f])}};
    if (!sd.empty()) bar["sd"] = sd[f];
    bars.push_back(std::move(bar));
  }
  push("prediction", "", "", prediction, prediction, 0.0);

  out.result.add("variable", std::move(variable));
  out.result.add("variable_name", std::move(variable_name));
  out.result.add("variable_value", std::move(variable_value));
  out.result.add("contribution", std::move(contribution));
  out.result.add("cumulative", std::move(cumulative));
  out.result.add("sign", std::move(sign));
  if (!sd.empty()) out.result.add("sd", std::move(sd_column));
  out.result.add("position", std::move(position));
}

}  // namespace

double mean_prediction(const Explainer& explainer, const Rows& rows) {
  const std::vector<double> scores = predict_batch(explainer, rows);
  double sum = 0;
  for (const double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

Rows background_sample(const Explainer& explainer, std::size_t background_size,
                       std::uint64_t seed) {
  if (background_size == 0) {
    throw ParameterError("background_size must be at least 1");
  }
  Rng rng = Rng::substream(seed, StreamTag::kBackground);
  const auto rows = sample_without_replacement(explainer.data().n_rows(),
                                               background_size, rng);
  return explainer.features().select(rows);
}

Attribution break_down_attribution(const Explainer& explainer,
                                   const Instance& instance,
                                   const Rows& background,
                                   std::span<const std::size_t> order) {
  Attribution out;
  out.order.assign(order.begin(), order.end());
  out.contributions.assign(explainer.n_features(), 0.0);
  Rows working = background;
  out.intercept = mean_prediction(explainer, working);
  double previous = out.intercept;
  for (const std::size_t f : order) {
    for (std::size_t r = 0; r < working.n_rows(); ++r) {
      working(r, f) = instance.values[f];
    }
    const double current = mean_prediction(explainer, working);
    out.contributions[f] = current - previous;
    previous = current;
  }
  out.prediction = predict_instance(explainer, instance);
  return out;
}

std::vector<std::size_t> default_break_down_order(const Explainer& explainer,
                                                  const Instance& instance,
                                                  const Rows& background) {
  const std::size_t p = explainer.n_features();
  const double baseline = mean_prediction(explainer, background);
  std::vector<double> effect(p);
  parallel_for(p, [&](std::size_t f) {
    Rows working = background;
    for (std::size_t r = 0; r < working.n_rows(); ++r) {
      working(r, f) = instance.values[f];
    }
    effect[f] = std::abs(mean_prediction(explainer, working) - baseline);
  });
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return effect[a] > effect[b];
                   });
  return order;
}

Explanation break_down(const Explainer& explainer, const Instance& instance,
                       const BreakDownOptions& options) {
  check_instance(explainer, instance);
  const std::uint64_t seed = options.seed.value_or(explainer.seed());
  const Rows background =
      background_sample(explainer, options.background_size, seed);
  const std::vector<std::size_t> order =
      options.order ? resolve_order(explainer, *options.order)
                    : default_break_down_order(explainer, instance, background);
  const Attribution attribution =
      break_down_attribution(explainer, instance, background, order);

  Explanation out;
  out.kind = "breakdown";
  out.model_label = explainer.label();
  Json bars = Json::array();
  fill_attribution_table(explainer, instance, order, attribution.contributions,
                         {}, attribution.intercept, attribution.prediction, out,
                         bars);
  out.chart = {{"type", "breakdown"},
               {"intercept", attribution.intercept},
               {"prediction", attribution.prediction},
               {"bars", std::move(bars)}};
  Json order_names = Json::array();
  for (const std::size_t f : order) {
    order_names.push_back(explainer.feature_schema()[f].name);
  }
  out.meta = {{"seed", seed},
              {"background_size", options.background_size},
              {"background_rows", background.n_rows()},
              {"order", std::move(order_names)},
              {"order_given", options.order.has_value()},
              {"instance", instance_json(explainer, instance)}};
  return out;
}

std::vector<std::vector<std::size_t>> sampled_orderings(std::size_t n_features,
                                                        std::size_t b,
                                                        std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> orderings(b);
  for (std::size_t i = 0; i < b; ++i) {
    Rng rng = Rng::substream(seed, StreamTag::kOrdering, {i});
    orderings[i] = random_permutation(n_features, rng);
  }
  return orderings;
}

std::vector<std::vector<std::size_t>> all_orderings(std::size_t n_features) {
  std::vector<std::size_t> current(n_features);
  std::iota(current.begin(), current.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(current);
  } while (std::next_permutation(current.begin(), current.end()));
  return out;
}

Explanation shapley_values(const Explainer& explainer, const Instance& instance,
                           const ShapleyOptions& options) {
  check_instance(explainer, instance);
  const std::size_t p = explainer.n_features();
  if (!options.full_enumeration && options.b < 1) {
    throw ParameterError("B must be at least 1");
  }
  if (options.full_enumeration && p > kMaxEnumeratedFeatures) {
    throw ParameterError("full enumeration supports at most " +
                         std::to_string(kMaxEnumeratedFeatures) +
                         " variables, got " + std::to_string(p));
  }
  const std::uint64_t seed = options.seed.value_or(explainer.seed());
  const Rows background =
      background_sample(explainer, options.background_size, seed);
  const auto orderings = options.full_enumeration
                             ? all_orderings(p)
                             : sampled_orderings(p, options.b, seed);
  const std::size_t n_orderings = orderings.size();

  std::vector<Attribution> attributions(n_orderings);
  parallel_for(n_orderings, [&](std::size_t i) {
    attributions[i] =
        break_down_attribution(explainer, instance, background, orderings[i]);
  });

  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  for (std::size_t f = 0; f < p; ++f) {
    double sum = 0;
    for (const auto& a : attributions) sum += a.contributions[f];
    mean[f] = sum / static_cast<double>(n_orderings);
    if (n_orderings > 1) {
      double ss = 0;
      for (const auto& a : attributions) {
        const double d = a.contributions[f] - mean[f];
        ss += d * d;
      }
      sd[f] = std::sqrt(ss / static_cast<double>(n_orderings - 1));
    }
  }
  // Every ordering shares the background, so the intercepts agree bitwise.
  const double intercept = attributions.front().intercept;
  const double prediction = attributions.front().prediction;

  std::vector<std::size_t> display(p);
  std::iota(display.begin(), display.end(), std::size_t{0});
  std::stable_sort(display.begin(), display.end(),
                   [&](std::size_t a, std::size_t b) {
                     return std::abs(mean[a]) > std::abs(mean[b]);
                   });

  Explanation out;
  out.kind = "shapley";
  out.model_label = explainer.label();
  Json bars = Json::array();
  fill_attribution_table(explainer, instance, display, mean, sd, intercept,
                         prediction, out, bars);
  Json samples = Json::object();
  for (std::size_t f = 0; f < p; ++f) {
    Json values = Json::array();
    for (const auto& a : attributions) values.push_back(a.contributions[f]);
    samples[explainer.feature_schema()[f].name] = std::move(values);
  }
  out.chart = {{"type", "shapley"},
               {"intercept", intercept},
               {"prediction", prediction},
               {"bars", std::move(bars)},
               {"samples", std::move(samples)}};
  out.meta = {{"seed", seed},
              {"B", options.full_enumeration ? n_orderings : options.b},
              {"full_enumeration", options.full_enumeration},
              {"n_orderings", n_orderings},
              {"background_size", options.background_size},
              {"background_rows", background.n_rows()},
              {"instance", instance_json(explainer, instance)}};
  return out;
}

std::vector<double> grid_for_variable(const Dataset& data,
                                      std::string_view variable,
                                      std::size_t grid_size, bool uniform) {
  const auto index = data.column_index(variable);
  if (!index) {
    throw SchemaError("unknown variable '" + std::string(variable) + "'");
  }
  const ColumnSchema& column = data.schema()[*index];
  if (!column.is_numeric()) {
    std::vector<double> levels(column.levels.size());
    std::iota(levels.begin(), levels.end(), 0.0);
    return levels;
  }
  if (grid_size < 2) {
    throw ParameterError("grid_size must be at least 2 for numeric '" +
                         column.name + "'");
  }
  const auto values = data.column(*index);
  if (values.empty()) throw ParameterError("cannot build a grid on no rows");
  if (!uniform) {
    return quantile_grid({values.begin(), values.end()}, grid_size);
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double steps = static_cast<double>(grid_size - 1);
  std::vector<double> grid;
  for (std::size_t k = 0; k < grid_size; ++k) {
    grid.push_back(k + 1 == grid_size
                       ? hi
                       : lo + (hi - lo) * static_cast<double>(k) / steps);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> quantile_grid(std::vector<double> values,
                                  std::size_t grid_size) {
  if (values.empty()) throw ParameterError("cannot build a grid on no rows");
  if (grid_size < 2) throw ParameterError("grid_size must be at least 2");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double steps = static_cast<double>(grid_size - 1);
  std::vector<double> grid;
  grid.reserve(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    const double h =
        static_cast<double>(n - 1) * static_cast<double>(k) / steps;
    const auto lower = static_cast<std::size_t>(std::floor(h));
    if (lower + 1 >= n) {
      grid.push_back(values[n - 1]);
    } else {
      const double fraction = h - static_cast<double>(lower);
      grid.push_back(values[lower] +
                     fraction * (values[lower + 1] - values[lower]));
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

Explanation ceteris_paribus(const Explainer& explainer,
                            const Instance& instance,
                            const CeterisParibusOptions& options) {
  check_instance(explainer, instance);
  const std::vector<std::size_t> variables =
      resolve_variables(explainer, options.variables);
  const Schema& schema = explainer.feature_schema();
  const double prediction = predict_instance(explainer, instance);

  std::vector<std::vector<double>> grids(variables.size());
  std::vector<std::vector<double>> profiles(variables.size());
  parallel_for(variables.size(), [&](std::size_t v) {
    const std::size_t f = variables[v];
    std::vector<double> grid = grid_for_variable(
        explainer.data(), schema[f].name, options.grid_size,
        options.uniform_grid);
    const double observed = instance.values[f];
    if (!std::binary_search(grid.begin(), grid.end(), observed)) {
      grid.insert(std::upper_bound(grid.begin(), grid.end(), observed),
                  observed);
    }
    Rows rows(explainer.data().feature_schema(), 0);
    for (const double g : grid) {
      std::vector<double> row = instance.values;
      row[f] = g;
      rows.append_row(row);
    }
    profiles[v] = predict_batch(explainer, rows);
    grids[v] = std::move(grid);
  });

  Explanation out;
  out.kind = "cp";
  out.model_label = explainer.label();
  std::vector<std::string> variable_column, label_column;
  std::vector<double> x_column, y_column;
  std::vector<std::int64_t> observed_column;
  Json series = Json::array();
  for (std::size_t v = 0; v < variables.size(); ++v) {
    const ColumnSchema& column = schema[variables[v]];
    const double observed = instance.values[variables[v]];
    Json labels = Json::array();
    for (std::size_t k = 0; k < grids[v].size(); ++k) {
      variable_column.push_back(column.name);
      x_column.push_back(grids[v][k]);
      label_column.push_back(column.render(grids[v][k]));
      y_column.push_back(profiles[v][k]);
      observed_column.push_back(grids[v][k] == observed ? 1 : 0);
      labels.push_back(label_column.back());
    }
    series.push_back({{"variable", column.name},
                      {"variable_kind", column_kind_name(column.kind)},
                      {"x", grids[v]},
                      {"labels", std::move(labels)},
                      {"y", profiles[v]},
                      {"anchor",
                       {{"x", observed},
                        {"label", column.render(observed)},
                        {"y", prediction}}}});
  }
  out.result.add("variable", std::move(variable_column));
  out.result.add("x", std::move(x_column));
  out.result.add("x_label", std::move(label_column));
  out.result.add("prediction", std::move(y_column));
  out.result.add("observed", std::move(observed_column));
  out.chart = {{"type", "cp_profile"},
               {"prediction", prediction},
               {"series", std::move(series)}};
  out.meta = {{"grid_size", options.grid_size},
              {"uniform_grid", options.uniform_grid},
              {"instance", instance_json(explainer, instance)}};
  return out;
}

}  // namespace exposition
