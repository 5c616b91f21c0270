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

// End-to-end acceptance checks. Prints one PASS or FAIL line per criterion
// and exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "exposition/arena.h"
#include "exposition/dispatch.h"
#include "exposition/explainer.h"
#include "exposition/fairness.h"
#include "exposition/model_level.h"
#include "exposition/predict_level.h"
#include "exposition/random.h"
#include "exposition/reference_models.h"
#include "httplib.h"
#include "process_util.h"
#include "test_util.h"

namespace exposition {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first few failures of a criterion.
class Check {
 public:
  void expect(bool condition, const std::string& what) {
    if (condition) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failure(s): " + messages_};
  }

 private:
  int failures_ = 0;
  std::string messages_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

bool same_bits(double a, double b) { return testing::same_bits(a, b); }

// Numeric x1..x3, categorical c, and a target built by `target`.
std::shared_ptr<const Dataset> mixed_data(
    std::size_t n, std::uint64_t seed,
    const std::function<double(double, double, double, int, std::mt19937_64&)>&
        target) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<std::vector<double>> cols(5, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = u(engine);
    cols[1][i] = u(engine);
    cols[2][i] = u(engine);
    cols[3][i] = static_cast<double>(engine() % 3);
    cols[4][i] = target(cols[0][i], cols[1][i], cols[2][i],
                        static_cast<int>(cols[3][i]), engine);
  }
  Schema schema = {testing::numeric("x1"), testing::numeric("x2"),
                   testing::numeric("x3"),
                   testing::categorical("c", {"a", "b", "c"}),
                   testing::numeric("y")};
  return std::make_shared<const Dataset>(std::move(schema), std::move(cols),
                                         "y");
}

double predict_one(const Explainer& e, const Instance& x) {
  Rows rows(e.data().feature_schema(), 1);
  for (std::size_t j = 0; j < x.values.size(); ++j) rows(0, j) = x.values[j];
  return e.predictor().predict(rows)[0];
}

// intercept + sum of variable rows, against the reported and the recomputed
// prediction.
void check_additivity(Check& check, const Explanation& ex, double f_x,
                      const std::string& what) {
  const auto& c = ex.result.numbers("contribution");
  double total = c.front();
  for (std::size_t k = 1; k + 1 < c.size(); ++k) total += c[k];
  const double tolerance = 1e-9 * std::max(1.0, std::abs(f_x));
  check.expect(std::abs(total - f_x) <= tolerance,
               what + " sum " + fmt(total) + " vs f(x) " + fmt(f_x));
  check.expect(std::abs(c.back() - f_x) <= tolerance,
               what + " reported prediction " + fmt(c.back()));
}

Outcome additivity() {
  auto reg = mixed_data(300, 11, [](double a, double b, double c, int g,
                                    std::mt19937_64& e) {
    std::normal_distribution<double> noise(0, 0.1);
    return 1 + 2 * a - b + a * c + 0.5 * g + noise(e);
  });
  auto clf = mixed_data(300, 12, [](double a, double b, double c, int g,
                                    std::mt19937_64& e) {
    std::uniform_real_distribution<double> u(0, 1);
    const double p = 1 / (1 + std::exp(-(2 * a - b + c * (g == 1 ? 1 : -1))));
    return u(e) < p ? 1.0 : 0.0;
  });
  const std::vector<std::shared_ptr<const Explainer>> models = {
      std::make_shared<Explainer>(
          std::make_shared<LinearModel>(fit_linear(*reg)), reg, "linear"),
      std::make_shared<Explainer>(
          std::make_shared<LogisticModel>(fit_logistic(*clf)), clf, "logistic"),
      std::make_shared<Explainer>(
          std::make_shared<TreeModel>(fit_tree(*reg, {4, 5})), reg, "tree"),
  };
  Check check;
  Rng rng = Rng::substream(2024, StreamTag::kRowSample);
  for (std::size_t pair = 0; pair < 200; ++pair) {
    const Explainer& e = *models[pair % models.size()];
    const std::size_t row = rng.uniform_index(e.data().n_rows());
    const Instance x = instance_from_row(e, row);
    const double f_x = predict_one(e, x);
    const std::string what = e.label() + " row " + std::to_string(row);
    BreakDownOptions bd;
    bd.seed = pair;
    check_additivity(check, break_down(e, x, bd), f_x, what + " break-down");
    ShapleyOptions sh;
    sh.seed = pair;
    check_additivity(check, shapley_values(e, x, sh), f_x, what + " shapley");
  }
  return check.outcome("200 pairs, break-down and Shapley");
}

// Independent break-down along one ordering: per-row predictions, running
// means over a working copy of the background.
std::vector<double> oracle_break_down(const Predictor& f, const Instance& x,
                                      const Rows& background,
                                      const std::vector<std::size_t>& order) {
  auto mean = [&f](const Rows& w) {
    double sum = 0;
    for (std::size_t r = 0; r < w.n_rows(); ++r) {
      sum += f.predict(w.slice(r, r + 1))[0];
    }
    return sum / static_cast<double>(w.n_rows());
  };
  std::vector<double> out(x.values.size(), 0.0);
  Rows w = background;
  double before = mean(w);
  for (const std::size_t j : order) {
    for (std::size_t r = 0; r < w.n_rows(); ++r) w(r, j) = x.values[j];
    const double after = mean(w);
    out[j] = after - before;
    before = after;
  }
  return out;
}

std::vector<double> by_feature(const Explanation& ex, const Explainer& e,
                               const char* column) {
  std::vector<double> out(e.n_features(), 0.0);
  const auto& names = ex.result.strings("variable_name");
  const auto& v = ex.result.numbers(column);
  for (std::size_t k = 1; k + 1 < names.size(); ++k) {
    out[e.feature_index(names[k])] = v[k];
  }
  return out;
}

Outcome shapley_oracle() {
  struct Case {
    std::size_t p;
    testing::RowFn f;
  };
  const std::vector<Case> cases = {
      {2, [](auto r) { return r[0] * r[1] + r[0]; }},
      {3, [](auto r) { return r[0] * r[1] + std::sin(2 * r[2]); }},
      {4, [](auto r) { return r[0] * r[1] * r[2] + r[3] * r[3] - r[1]; }},
  };
  Check check;
  std::size_t compared = 0;
  for (const Case& c : cases) {
    auto data = testing::uniform_data(12, c.p, 100 + c.p);
    auto e = testing::explain_fn(data, c.f);
    const Instance x = instance_from_row(*e, 5);
    const Rows background = e->features();

    std::vector<std::size_t> order(c.p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> oracle(c.p, 0.0);
    std::size_t count = 0;
    do {
      const auto phi = oracle_break_down(e->predictor(), x, background, order);
      for (std::size_t j = 0; j < c.p; ++j) oracle[j] += phi[j];
      ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& v : oracle) v /= static_cast<double>(count);

    ShapleyOptions full;
    full.full_enumeration = true;
    full.background_size = background.n_rows();
    const auto exact =
        by_feature(shapley_values(*e, x, full), *e, "contribution");
    ShapleyOptions sampled;
    sampled.b = 2000;
    sampled.background_size = background.n_rows();
    sampled.seed = 42;
    const Explanation est = shapley_values(*e, x, sampled);
    const auto approx = by_feature(est, *e, "contribution");
    const auto sd = by_feature(est, *e, "sd");
    for (std::size_t j = 0; j < c.p; ++j) {
      const std::string what =
          "p=" + std::to_string(c.p) + " x" + std::to_string(j + 1);
      check.expect(same_bits(exact[j], oracle[j]),
                   what + " enumeration " + fmt(exact[j]) + " vs " +
                       fmt(oracle[j]));
      // SE is zero when every ordering gives the same value; the estimator
      // then differs from the oracle only by summation rounding.
      const double se = sd[j] / std::sqrt(2000.0);
      check.expect(std::abs(approx[j] - oracle[j]) <= 3 * se + 1e-12,
                   what + " sampled " + fmt(approx[j]) + " vs " +
                       fmt(oracle[j]) + " se " + fmt(se));
      ++compared;
    }
  }
  return check.outcome(std::to_string(compared) +
                       " variables exact; sampled B=2000 within 3 SE");
}

Outcome pdp_identity() {
  const std::vector<testing::RowFn> functions = {
      [](auto r) { return r[0]; },
      [](auto r) { return std::tanh(r[0] * 3) + r[r.size() - 1]; },
      [](auto r) {
        double s = 0;
        for (double v : r) s += v * v;
        return std::sqrt(s);
      },
      [](auto r) { return r[0] > 0.1 ? 1.0 / 3.0 : std::exp(r[r.size() - 1]); },
      [](auto r) { return std::sin(r[0]) * std::cos(r[r.size() - 1]) * 0.7; },
  };
  Check check;
  std::mt19937_64 engine(77);
  std::size_t points = 0;
  for (std::size_t config = 0; config < 50; ++config) {
    const std::size_t p = 1 + engine() % 4;
    const std::size_t n = 20 + engine() % 180;
    auto data = testing::uniform_data(n, p, 500 + config, -2, 2);
    auto e = testing::explain_fn(data, functions[config % functions.size()]);
    ProfileOptions options;
    options.grid_size = 2 + engine() % 30;
    options.sample_size = 1 + engine() % n;
    options.seed = engine();
    const Explanation pdp = model_profile(*e, options);
    options.kind = ProfileKind::kIce;
    options.center_ice = false;
    const Explanation ice = model_profile(*e, options);
    for (std::size_t s = 0; s < pdp.chart["series"].size(); ++s) {
      const Json& curves = ice.chart["series"][s]["curves"];
      const auto y = pdp.chart["series"][s]["y"].get<std::vector<double>>();
      for (std::size_t g = 0; g < y.size(); ++g) {
        double sum = 0;
        for (const Json& curve : curves) sum += curve["y"][g].get<double>();
        const double mean = sum / static_cast<double>(curves.size());
        check.expect(same_bits(y[g], mean), "config " + std::to_string(config) +
                                                " grid " + std::to_string(g));
        ++points;
      }
    }
  }
  return check.outcome("50 configurations, " + std::to_string(points) +
                       " grid points bitwise");
}

Outcome ale_recovery() {
  auto data = testing::uniform_data(2000, 2, 4242, 0, 1);
  auto e = testing::explain_fn(data, [](auto r) { return 3 * r[0] - 2 * r[1]; });
  ProfileOptions options;
  options.kind = ProfileKind::kAle;
  options.variables = std::vector<std::string>{"x1"};
  options.grid_size = 51;
  options.sample_size = 2000;
  const auto start = std::chrono::steady_clock::now();
  const Explanation ex = model_profile(*e, options);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  const auto x = ex.chart["series"][0]["x"].get<std::vector<double>>();
  const auto y = ex.chart["series"][0]["y"].get<std::vector<double>>();
  double shift = 0;
  for (std::size_t k = 0; k < x.size(); ++k) shift += y[k] - 3 * x[k];
  shift /= static_cast<double>(x.size());
  double worst = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    worst = std::max(worst, std::abs(y[k] - 3 * x[k] - shift));
  }
  Check check;
  check.expect(x.size() >= 2, "fewer than two ALE points");
  check.expect(worst <= 0.05, "max deviation " + fmt(worst));
  check.expect(seconds < 10, "runtime " + fmt(seconds) + " s");
  return check.outcome("max deviation " + fmt(worst) + ", " + fmt(seconds) +
                       " s");
}

double rmse(const std::vector<double>& y, const std::vector<double>& p) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - p[i]) * (y[i] - p[i]);
  return std::sqrt(s / static_cast<double>(y.size()));
}

Outcome importance() {
  Check check;
  auto base = testing::uniform_data(500, 3, 31);
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < 3; ++j) {
    cols.emplace_back(base->column(j).begin(), base->column(j).end());
  }
  std::vector<double> y(500);
  for (std::size_t i = 0; i < 500; ++i) {
    y[i] = 2 * cols[0][i] - cols[1][i] + 0.3 * std::sin(7.0 * i);
  }
  auto data = testing::numeric_data({"x1", "x2", "x3"}, cols, y);
  auto f = [](std::span<const double> r) { return 2 * r[0] - r[1]; };
  auto e = testing::explain_fn(data, f);

  ImportanceOptions options;
  options.b = 10;
  options.seed = 5;
  options.sample_size = 200;
  options.mode = ImportanceMode::kDifference;
  const Explanation diff = permutation_importance(*e, options);
  const auto& names = diff.result.strings("variable");
  const auto& values = diff.result.numbers("importance");
  const auto at = [&names](const std::string& v) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), v) -
                                    names.begin());
  };
  check.expect(values[at("x3")] == 0.0, "ignored x3 = " + fmt(values[at("x3")]));

  options.mode = ImportanceMode::kRaw;
  const Explanation raw = permutation_importance(*e, options);
  const auto& raw_names = raw.result.strings("variable");
  const auto& raw_values = raw.result.numbers("importance");

  // Oracle: same substreams, hand-written shuffle, loss from scratch.
  Rng sampler = Rng::substream(5, StreamTag::kRowSample);
  const auto rows = sample_without_replacement(500, 200, sampler);
  std::vector<double> ys, fitted;
  for (const auto r : rows) {
    ys.push_back(y[r]);
    fitted.push_back(f(std::vector<double>{cols[0][r], cols[1][r], cols[2][r]}));
  }
  const double l0 = rmse(ys, fitted);
  std::size_t matched = 0;
  for (std::size_t j = 0; j <= 3; ++j) {
    double delta = 0;
    for (std::uint64_t b = 0; b < 10; ++b) {
      Rng rng = Rng::substream(5, StreamTag::kPermutation, {j, b});
      std::vector<std::size_t> perm(rows.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
      }
      // j == 3 is the baseline: whole rows are permuted.
      std::vector<double> p(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<double> x = {cols[0][rows[i]], cols[1][rows[i]],
                                 cols[2][rows[i]]};
        for (std::size_t c = 0; c < 3; ++c) {
          if (c == j || j == 3) x[c] = cols[c][rows[perm[i]]];
        }
        p[i] = f(x);
      }
      delta += rmse(ys, p) - l0;
    }
    const double expected = l0 + delta / 10;
    const std::string name = j < 3 ? "x" + std::to_string(j + 1) : "_baseline_";
    const auto k = static_cast<std::size_t>(
        std::find(raw_names.begin(), raw_names.end(), name) - raw_names.begin());
    check.expect(k < raw_names.size() && same_bits(raw_values[k], expected),
                 name + " " + fmt(k < raw_values.size() ? raw_values[k] : NAN) +
                     " vs oracle " + fmt(expected));
    ++matched;
  }
  const auto full = static_cast<std::size_t>(
      std::find(raw_names.begin(), raw_names.end(), "_full_model_") -
      raw_names.begin());
  check.expect(full < raw_names.size() && same_bits(raw_values[full], l0),
               "_full_model_ vs oracle loss");
  return check.outcome("ignored column 0 over B=10; " +
                       std::to_string(matched + 1) + " values match oracle");
}

Outcome surrogate_fidelity() {
  // Leaf values shrink with depth so every greedy split is the true one.
  const std::vector<testing::RowFn> trees = {
      [](auto r) { return r[0] < 0.1 ? -2.0 : 3.0; },
      [](auto r) {
        if (r[0] < 0.1) return r[1] < -0.3 ? 100.0 : 110.0;
        return r[2] < 0.45 ? 200.0 : 190.0;
      },
      [](auto r) {
        if (r[0] < 0.1) {
          if (r[1] < -0.3) return r[2] < 0.2 ? 100.0 : 101.0;
          return r[0] < -0.5 ? 110.0 : 111.5;
        }
        if (r[2] < 0.45) return r[1] < 0.6 ? 200.0 : 198.0;
        return r[1] < -0.7 ? 190.0 : 189.0;
      },
  };
  Check check;
  std::string summary;
  for (std::size_t d = 1; d <= 3; ++d) {
    auto data = testing::uniform_data(1000, 3, 60 + d);
    auto e = testing::explain_fn(data, trees[d - 1]);
    SurrogateOptions options;
    options.max_depth = d;
    const SurrogateFit fit = fit_surrogate(*e, options);
    check.expect(fit.fidelity == 1.0,
                 "depth " + std::to_string(d) + " fidelity " + fmt(fit.fidelity));
    summary += (summary.empty() ? "" : ", ") + std::string("d=") +
               std::to_string(d) + " fidelity " + fmt(fit.fidelity);
  }
  return check.outcome(summary);
}

// One fixture: raw labels and scores per subgroup, then hand-tallied
// expectations.
struct Fixture {
  std::string name;
  std::vector<std::string> groups;
  std::vector<std::vector<double>> y, s;
  CutoffMap cutoffs;
  std::string privileged;
  std::vector<ConfusionCounts> counts;
  // Per subgroup: TPR, ACC, PPV, FPR, STP as fractions; den 0 = undefined.
  std::vector<std::array<std::pair<int, int>, 5>> rates;
  std::vector<FairnessMetric> skipped;
  std::size_t violations;
  Verdict verdict;
};

std::pair<std::vector<double>, std::vector<double>> from_counts(
    const ConfusionCounts& c) {
  std::vector<double> y, s;
  for (int i = 0; i < c.tp; ++i) y.push_back(1), s.push_back(0.9);
  for (int i = 0; i < c.fn; ++i) y.push_back(1), s.push_back(0.1);
  for (int i = 0; i < c.fp; ++i) y.push_back(0), s.push_back(0.9);
  for (int i = 0; i < c.tn; ++i) y.push_back(0), s.push_back(0.1);
  return {y, s};
}

std::vector<Fixture> fairness_fixtures() {
  std::vector<Fixture> out;
  // Counts are {tp, fp, tn, fn}.
  out.push_back({"two groups, every metric off",
                 {"A", "B"},
                 {{1, 1, 1, 1, 0, 0, 0, 0, 0, 0}, {1, 1, 1, 1, 0, 0, 0, 0, 0, 0}},
                 {{.9, .8, .7, .2, .6, .1, .1, .1, .1, .1},
                  {.9, .3, .2, .2, .6, .7, .1, .1, .1, .1}},
                 {},
                 "A",
                 {{3, 1, 5, 1}, {1, 2, 4, 3}},
                 {{{{{3, 4}, {8, 10}, {3, 4}, {1, 6}, {4, 10}}},
                   {{{1, 4}, {5, 10}, {1, 3}, {2, 6}, {3, 10}}}}},
                 {},
                 5,
                 Verdict::kNotFair});
  out.push_back({"zero denominator in an unprivileged group",
                 {"A", "B"},
                 {{1, 1, 0, 0}, {0, 0, 0, 0}},
                 {{.9, .4, .6, .1}, {.2, .3, .1, .7}},
                 {},
                 "A",
                 {{1, 1, 1, 1}, {0, 1, 3, 0}},
                 {{{{{1, 2}, {2, 4}, {1, 2}, {1, 2}, {2, 4}}},
                   {{{0, 0}, {3, 4}, {0, 1}, {1, 4}, {1, 4}}}}},
                 {},
                 4,
                 Verdict::kNotFair});
  out.push_back({"per-group cutoff equalizes",
                 {"A", "B"},
                 {{1, 1, 0, 0, 1, 0}, {1, 1, 0, 0, 1, 0}},
                 {{.8, .6, .4, .3, .45, .55}, {.45, .42, .35, .2, .1, .41}},
                 {{"B", 0.4}},
                 "A",
                 {{2, 1, 2, 1}, {2, 1, 2, 1}},
                 {{{{{2, 3}, {4, 6}, {2, 3}, {1, 3}, {3, 6}}},
                   {{{2, 3}, {4, 6}, {2, 3}, {1, 3}, {3, 6}}}}},
                 {},
                 0,
                 Verdict::kFair});
  {
    Fixture f{"privileged FPR of zero is skipped", {"A", "B"}, {}, {}, {}, "A",
              {{4, 0, 5, 1}, {8, 1, 9, 2}},
              {{{{{4, 5}, {9, 10}, {4, 4}, {0, 5}, {4, 10}}},
                {{{8, 10}, {17, 20}, {8, 9}, {1, 10}, {9, 20}}}}},
              {FairnessMetric::kFpr}, 0, Verdict::kFair};
    out.push_back(f);
  }
  {
    Fixture f{"one violation is borderline", {"A", "B"}, {}, {}, {}, "A",
              {{5, 5, 5, 5}, {1, 2, 2, 1}},
              {{{{{5, 10}, {10, 20}, {5, 10}, {5, 10}, {10, 20}}},
                {{{1, 2}, {3, 6}, {1, 3}, {2, 4}, {3, 6}}}}},
              {}, 1, Verdict::kBorderline};
    out.push_back(f);
  }
  for (Fixture& f : out) {
    if (!f.y.empty()) continue;
    for (const auto& c : f.counts) {
      auto [y, s] = from_counts(c);
      f.y.push_back(y);
      f.s.push_back(s);
    }
  }
  return out;
}

Outcome fairness_fixtures_check() {
  Check check;
  for (const Fixture& f : fairness_fixtures()) {
    std::vector<double> y, s;
    std::vector<std::size_t> g;
    for (std::size_t k = 0; k < f.groups.size(); ++k) {
      y.insert(y.end(), f.y[k].begin(), f.y[k].end());
      s.insert(s.end(), f.s[k].begin(), f.s[k].end());
      g.insert(g.end(), f.y[k].size(), k);
    }
    const SubgroupConfusion confusion =
        tally_confusion(y, s, g, f.groups, f.cutoffs);
    check.expect(confusion.counts == f.counts, f.name + ": counts");
    const FairnessReport report =
        fairness_report(confusion, f.privileged, 0.8);
    const auto priv = static_cast<std::size_t>(
        std::find(f.groups.begin(), f.groups.end(), f.privileged) -
        f.groups.begin());
    std::size_t violations = 0;
    for (std::size_t k = 0; k < f.groups.size(); ++k) {
      for (std::size_t m = 0; m < 5; ++m) {
        const auto metric = kFairnessMetrics[m];
        const auto [num, den] = f.rates[k][m];
        const auto got = report.scores.get(f.groups[k], metric);
        const std::string what = f.name + ": " + f.groups[k] + " " +
                                 std::string(metric_name(metric));
        if (den == 0) {
          check.expect(!got.has_value(), what + " should be undefined");
          continue;
        }
        const double expected = static_cast<double>(num) / den;
        check.expect(got.has_value() && *got == expected, what + " value");
        if (k == priv) continue;
        const auto [pn, pd] = f.rates[priv][m];
        if (pd == 0 || pn == 0) continue;  // skipped metric
        // ratio = (num * pd) / (pn * den); inside [4/5, 5/4] checked in
        // integers, so no rounding is involved.
        const long long lhs = static_cast<long long>(num) * pd;
        const long long rhs = static_cast<long long>(pn) * den;
        const bool inside = 5 * lhs >= 4 * rhs && 4 * lhs <= 5 * rhs;
        const double ratio = expected / (static_cast<double>(pn) / pd);
        check.expect(is_violation(ratio, 0.8) == !inside,
                     what + " band check, ratio " + fmt(ratio));
        violations += inside ? 0 : 1;
      }
    }
    check.expect(violations == f.violations,
                 f.name + ": hand violations " + std::to_string(violations));
    check.expect(report.violations.size() == f.violations,
                 f.name + ": reported violations " +
                     std::to_string(report.violations.size()));
    check.expect(report.skipped_metrics == f.skipped, f.name + ": skipped");
    check.expect(report.verdict == f.verdict,
                 f.name + ": verdict " +
                     std::string(verdict_name(report.verdict)));
  }
  // The band edges themselves.
  check.expect(!is_violation(0.8, 0.8) && !is_violation(1.25, 0.8),
               "band edges are inside");
  check.expect(is_violation(std::nextafter(0.8, 0.0), 0.8) &&
                   is_violation(std::nextafter(1.25, 2.0), 0.8),
               "just outside the band");
  return check.outcome("5 fixtures");
}

// --- Command line and service ----------------------------------------------

struct Workspace {
  fs::path dir;
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

Workspace make_workspace() {
  Workspace w{testing::scratch_dir("acceptance")};
  std::mt19937_64 engine(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::string csv = "age,income,region,y\n";
  const char* regions[] = {"north", "south", "west"};
  for (int i = 0; i < 80; ++i) {
    const double age = 18 + std::floor(u(engine) * 50);
    const double income = std::round(u(engine) * 1000) / 10;
    const int region = static_cast<int>(engine() % 3);
    const double logit = (age - 40) / 10 + (income - 50) / 25 + region * 0.4;
    const int y = u(engine) < 1 / (1 + std::exp(-logit)) ? 1 : 0;
    csv += fmt(age) + "," + fmt(income) + "," + regions[region] + "," +
           std::to_string(y) + "\n";
  }
  testing::write_file(w.dir / "data.csv", csv);
  testing::write_file(w.dir / "logit.json", R"({"type":"logistic"})");
  testing::write_file(w.dir / "tree.json",
                      R"({"type":"tree","max_depth":3,"min_leaf":4})");
  return w;
}

struct KindCase {
  std::string kind;
  std::vector<std::string> flags;
  Json params;
};

std::vector<KindCase> kind_cases() {
  return {
      {"performance", {}, Json::object()},
      {"breakdown", {"--instance", "3"}, {{"instance", 3}}},
      {"shapley", {"--instance", "3", "--b", "10"}, {{"instance", 3}, {"b", 10}}},
      {"cp",
       {"--instance", "5", "--grid-size", "7", "--override", "region=west"},
       {{"instance", 5}, {"grid_size", 7}, {"overrides", {{"region", "west"}}}}},
      {"importance", {"--b", "4"}, {{"b", 4}}},
      {"profile",
       {"--profile-kind", "pdp", "--grid-size", "9"},
       {{"profile_kind", "pdp"}, {"grid_size", 9}}},
      {"residuals", {}, Json::object()},
      {"surrogate", {"--max-depth", "2"}, {{"max_depth", 2}}},
      {"fairness",
       {"--protected", "region", "--privileged", "north"},
       {{"protected", "region"}, {"privileged", "north"}}},
  };
}

Outcome cli_determinism() {
  const Workspace w = make_workspace();
  Check check;
  auto explain = [&w](const std::vector<std::string>& models,
                      const KindCase& k) {
    std::vector<std::string> argv = {EXPOSITION_BIN, "explain", "--data",
                                     w.path("data.csv"), "--target", "y",
                                     "--seed", "7", "--kind", k.kind};
    for (const auto& m : models) {
      argv.push_back("--model");
      argv.push_back(m);
    }
    argv.insert(argv.end(), k.flags.begin(), k.flags.end());
    return testing::run(argv);
  };
  testing::ServeProcess server({EXPOSITION_BIN, "serve", "--data",
                                w.path("data.csv"), "--target", "y", "--model",
                                w.path("logit.json"), "--model",
                                w.path("tree.json"), "--port", "0"});
  check.expect(server.port() > 0, "service did not start: " + server.stderr_text());
  if (server.port() <= 0) return check.outcome("");
  httplib::Client client("127.0.0.1", server.port());
  std::size_t compared = 0;
  for (const KindCase& k : kind_cases()) {
    const std::vector<std::string> both = {w.path("logit.json"),
                                           w.path("tree.json")};
    const auto first = explain(both, k);
    const auto second = explain(both, k);
    check.expect(first.exit_code == 0, k.kind + " exit " +
                                           std::to_string(first.exit_code) +
                                           ": " + first.err);
    check.expect(first.out == second.out && !first.out.empty(),
                 k.kind + " CLI runs differ");
    for (const std::string label : {"logit", "tree"}) {
      const auto cli = explain({w.path(label + ".json")}, k);
      const Json request = {
          {"kind", k.kind}, {"model", label}, {"params", k.params}, {"seed", 7}};
      auto res = client.Post("/api/compute", request.dump(), "application/json");
      check.expect(res && res->status == 200,
                   k.kind + "/" + label + " service status " +
                       (res ? std::to_string(res->status) : "none"));
      if (!res) continue;
      check.expect(cli.out == res->body + "\n",
                   k.kind + "/" + label + " service differs from CLI");
      ++compared;
    }
  }
  check.expect(server.stop() == 0, "service did not exit cleanly");
  fs::remove_all(w.dir);
  return check.outcome(std::to_string(chart_kinds().size()) +
                       " kinds byte-identical across runs; " +
                       std::to_string(compared) + " service payloads match CLI");
}

Outcome external_round_trip() {
  const Workspace w = make_workspace();
  auto data = std::make_shared<const Dataset>(
      load_dataset_file(w.path("data.csv"), "income"));
  testing::write_file(w.dir / "linear.json", R"({"type":"linear"})");
  const Json remote_spec = {
      {"type", "external"},
      {"command",
       {MODEL_SERVER_BIN, "--model", w.path("linear.json"), "--data",
        w.path("data.csv"), "--target", "income"}}};
  const Explainer local(load_model(Json{{"type", "linear"}}, *data), data,
                        "linear");
  const Explainer remote(load_model(remote_spec, *data), data, "linear");
  const std::map<std::string, Json> params = {
      {"performance", Json::object()},
      {"breakdown", {{"instance", 2}}},
      {"shapley", {{"instance", 2}, {"b", 12}}},
      {"cp", {{"instance", 2}, {"grid_size", 11}}},
      {"importance", {{"b", 5}}},
      {"profile", {{"profile_kind", "ale"}, {"variables", {"age"}}}},
      {"residuals", Json::object()},
      {"surrogate", {{"max_depth", 3}}},
  };
  Check check;
  for (const auto& [kind, p] : params) {
    const std::string a = serialize(compute_explanation(local, kind, p, 3));
    const std::string b = serialize(compute_explanation(remote, kind, p, 3));
    check.expect(a == b, kind + " payload differs");
  }
  const Rows rows = data->features();
  const auto pa = local.predictor().predict(rows);
  const auto pb = remote.predictor().predict(rows);
  bool bitwise = pa.size() == pb.size();
  for (std::size_t i = 0; bitwise && i < pa.size(); ++i) {
    bitwise = same_bits(pa[i], pb[i]);
  }
  check.expect(bitwise, "raw predictions differ");
  fs::remove_all(w.dir);
  return check.outcome(std::to_string(params.size()) +
                       " explanation kinds and " + std::to_string(pa.size()) +
                       " predictions bitwise identical");
}

Outcome state_reproducibility() {
  const Workspace w = make_workspace();
  auto data =
      std::make_shared<const Dataset>(load_dataset_file(w.path("data.csv"), "y"));
  auto make_models = [&] {
    return std::vector<std::shared_ptr<const Explainer>>{
        std::make_shared<Explainer>(
            load_model(Json{{"type", "logistic"}}, *data), data, "logit"),
        std::make_shared<Explainer>(
            load_model(Json::parse(testing::read_file(w.path("tree.json"))),
                       *data),
            data, "tree")};
  };
  Check check;
  std::map<std::string, std::string> payloads;  // model \0 request -> bytes
  Arena first(make_models());
  std::uint64_t seed = 100;
  for (const KindCase& k : kind_cases()) {
    for (const std::string label : {"logit", "tree"}) {
      const Json request = {
          {"kind", k.kind}, {"model", label}, {"params", k.params}, {"seed", seed}};
      const HttpResponse r = first.handle("POST", "/api/compute", request.dump());
      check.expect(r.status == 200, k.kind + " compute " + std::to_string(r.status));
      payloads[label + '\0' + k.kind] = r.body;
    }
    ++seed;
  }
  const HttpResponse saved = first.handle("GET", "/api/state", "");
  fs::path state_file = w.dir / "state.json";
  testing::write_file(state_file, saved.body);

  Arena fresh(make_models());
  const HttpResponse loaded =
      fresh.handle("PUT", "/api/state", testing::read_file(state_file));
  check.expect(loaded.status == 200, "load status " + std::to_string(loaded.status));
  check.expect(fresh.handle("GET", "/api/state", "").body == saved.body,
               "restored state differs");
  std::size_t recomputed = 0;
  const Json saved_state = Json::parse(saved.body);
  for (const Json& chart : saved_state["charts"]) {
    for (const Json& model : chart["models"]) {
      const Json request = {{"kind", chart["kind"]},
                            {"model", model},
                            {"params", chart["params"]},
                            {"seed", chart["seed"]}};
      const HttpResponse r = fresh.handle("POST", "/api/compute", request.dump());
      const std::string key =
          model.get<std::string>() + '\0' + chart["kind"].get<std::string>();
      check.expect(r.status == 200 && r.body == payloads[key],
                   chart["kind"].get<std::string>() + "/" +
                       model.get<std::string>() + " payload differs");
      ++recomputed;
    }
  }
  check.expect(recomputed == payloads.size(),
               "state holds " + std::to_string(recomputed) + " of " +
                   std::to_string(payloads.size()) + " charts");
  fs::remove_all(w.dir);
  return check.outcome(std::to_string(recomputed) +
                       " charts recomputed byte-identically");
}

}  // namespace
}  // namespace exposition

int main() {
  using exposition::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria =
      {
          {"additivity", exposition::additivity},
          {"shapley_oracle", exposition::shapley_oracle},
          {"pdp_identity", exposition::pdp_identity},
          {"ale_recovery", exposition::ale_recovery},
          {"permutation_importance", exposition::importance},
          {"surrogate_fidelity", exposition::surrogate_fidelity},
          {"fairness_fixtures", exposition::fairness_fixtures_check},
          {"end_to_end_determinism", exposition::cli_determinism},
          {"external_round_trip", exposition::external_round_trip},
          {"state_reproducibility", exposition::state_reproducibility},
      };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += outcome.ok ? 0 : 1;
    std::cout << (outcome.ok ? "PASS " : "FAIL ") << name << ": "
              << outcome.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
