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

#include "exposition/cart.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

#include "exposition/error.h"

namespace exposition {
namespace {

struct Split {
  bool found = false;
  double score = -std::numeric_limits<double>::infinity();
  std::size_t feature = 0;
  double threshold = 0;
  std::vector<std::size_t> left_levels;
};

double midpoint(double a, double b) {
  double t = a / 2 + b / 2;
  if (!(t > a)) t = b;
  if (t > b) t = b;
  return t;
}

class Builder {
 public:
  Builder(const Rows& x, std::span<const double> target,
          const TreeParams& params)
      : x_(x), target_(target), params_(params) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> rows(x_.n_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  std::size_t grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    {
      TreeNode& node = nodes_[id];
      node.n = rows.size();
      node.value = leaf_value(rows);
    }
    if (depth >= params_.max_depth || rows.size() < 2 * params_.min_leaf ||
        is_pure(rows)) {
      return id;
    }
    const Split split = best_split(rows);
    if (!split.found) return id;

    std::vector<std::size_t> left, right;
    for (const std::size_t r : rows) {
      (goes_left(split, x_(r, split.feature)) ? left : right).push_back(r);
    }
    const std::size_t left_id = grow(left, depth + 1);
    const std::size_t right_id = grow(right, depth + 1);
    TreeNode& node = nodes_[id];
    node.is_leaf = false;
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left_levels = split.left_levels;
    node.left = left_id;
    node.right = right_id;
    return id;
  }

  bool goes_left(const Split& split, double value) const {
    if (x_.schema()[split.feature].is_numeric()) return value < split.threshold;
    return std::binary_search(split.left_levels.begin(),
                              split.left_levels.end(),
                              static_cast<std::size_t>(value));
  }

  bool is_pure(const std::vector<std::size_t>& rows) const {
    return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) {
      return target_[r] == target_[rows.front()];
    });
  }

  double leaf_value(const std::vector<std::size_t>& rows) const {
    if (rows.empty()) return 0;
    if (is_pure(rows)) return target_[rows.front()];
    double sum = 0;
    for (const std::size_t r : rows) sum += target_[r];
    return sum / static_cast<double>(rows.size());
  }

  // Maximizes sum_L^2 / n_L + sum_R^2 / n_R over targets centered at the node
  // mean, which is equivalent to minimizing the children's squared error.
  Split best_split(const std::vector<std::size_t>& rows) const {
    const double n = static_cast<double>(rows.size());
    double mean = 0;
    for (const std::size_t r : rows) mean += target_[r];
    mean /= n;
    Split best;
    const std::size_t min_leaf = params_.min_leaf;
    for (std::size_t f = 0; f < x_.n_cols(); ++f) {
      if (x_.schema()[f].is_numeric()) {
        std::vector<std::size_t> sorted = rows;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [&](std::size_t a, std::size_t b) {
                           return x_(a, f) < x_(b, f);
                         });
        double total = 0;
        for (const std::size_t r : sorted) total += target_[r] - mean;
        double left_sum = 0;
        for (std::size_t i = 1; i < sorted.size(); ++i) {
          left_sum += target_[sorted[i - 1]] - mean;
          const double lo = x_(sorted[i - 1], f);
          const double hi = x_(sorted[i], f);
          if (!(lo < hi)) continue;
          const std::size_t n_left = i, n_right = sorted.size() - i;
          if (n_left < min_leaf || n_right < min_leaf) continue;
          const double right_sum = total - left_sum;
          const double score =
              left_sum * left_sum / static_cast<double>(n_left) +
              right_sum * right_sum / static_cast<double>(n_right);
          if (score > best.score) {
            best = {true, score, f, midpoint(lo, hi), {}};
          }
        }
      } else {
        const std::size_t n_levels = x_.schema()[f].levels.size();
        std::vector<double> sums(n_levels, 0.0);
        std::vector<std::size_t> counts(n_levels, 0);
        for (const std::size_t r : rows) {
          const auto level = static_cast<std::size_t>(x_(r, f));
          sums[level] += target_[r] - mean;
          counts[level] += 1;
        }
        std::vector<std::size_t> present;
        for (std::size_t l = 0; l < n_levels; ++l) {
          if (counts[l] > 0) present.push_back(l);
        }
        std::stable_sort(present.begin(), present.end(),
                         [&](std::size_t a, std::size_t b) {
                           return sums[a] / static_cast<double>(counts[a]) <
                                  sums[b] / static_cast<double>(counts[b]);
                         });
        double total = 0;
        for (const std::size_t l : present) total += sums[l];
        double left_sum = 0;
        std::size_t n_left = 0;
        for (std::size_t k = 1; k < present.size(); ++k) {
          left_sum += sums[present[k - 1]];
          n_left += counts[present[k - 1]];
          const std::size_t n_right = rows.size() - n_left;
          if (n_left < min_leaf || n_right < min_leaf) continue;
          const double right_sum = total - left_sum;
          const double score =
              left_sum * left_sum / static_cast<double>(n_left) +
              right_sum * right_sum / static_cast<double>(n_right);
          if (score > best.score) {
            std::vector<std::size_t> left_levels(present.begin(),
                                                 present.begin() + k);
            std::sort(left_levels.begin(), left_levels.end());
            best = {true, score, f, 0.0, std::move(left_levels)};
          }
        }
      }
    }
    return best;
  }

  const Rows& x_;
  std::span<const double> target_;
  TreeParams params_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RegressionTree RegressionTree::fit(const Rows& x,
                                   std::span<const double> target,
                                   const TreeParams& params) {
  if (params.max_depth < 1) throw ParameterError("max_depth must be >= 1");
  if (params.min_leaf < 1) throw ParameterError("min_leaf must be >= 1");
  if (x.n_rows() != target.size()) {
    throw ParameterError("tree target length does not match rows");
  }
  if (x.n_rows() < 2 * params.min_leaf) {
    throw ParameterError("need at least 2 * min_leaf = " +
                         std::to_string(2 * params.min_leaf) +
                         " rows, got " + std::to_string(x.n_rows()));
  }
  RegressionTree tree;
  tree.nodes_ = Builder(x, target, params).build();
  return tree;
}

std::size_t RegressionTree::leaf_for(std::span<const double> row) const {
  std::size_t id = 0;
  while (!nodes_[id].is_leaf) {
    const TreeNode& node = nodes_[id];
    const double v = row[node.feature];
    const bool left =
        node.left_levels.empty()
            ? v < node.threshold
            : std::binary_search(node.left_levels.begin(),
                                 node.left_levels.end(),
                                 static_cast<std::size_t>(v));
    id = left ? node.left : node.right;
  }
  return id;
}

double RegressionTree::predict_row(std::span<const double> row) const {
  return nodes_[leaf_for(row)].value;
}

std::vector<double> RegressionTree::predict(const Rows& rows) const {
  std::vector<double> out(rows.n_rows());
  for (std::size_t r = 0; r < rows.n_rows(); ++r) out[r] = predict_row(rows.row(r));
  return out;
}

std::size_t RegressionTree::depth() const {
  std::function<std::size_t(std::size_t)> walk = [&](std::size_t id) {
    const TreeNode& node = nodes_[id];
    if (node.is_leaf) return std::size_t{0};
    return 1 + std::max(walk(node.left), walk(node.right));
  };
  return walk(0);
}

std::size_t RegressionTree::n_leaves() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(),
      [](const TreeNode& node) { return node.is_leaf; }));
}

Json RegressionTree::to_json(const Schema& schema) const {
  std::function<Json(std::size_t)> walk = [&](std::size_t id) -> Json {
    const TreeNode& node = nodes_[id];
    if (node.is_leaf) return {{"leaf_value", node.value}, {"n", node.n}};
    Json out = {{"variable", schema[node.feature].name},
                {"n", node.n},
                {"left", walk(node.left)},
                {"right", walk(node.right)}};
    if (schema[node.feature].is_numeric()) {
      out["threshold"] = node.threshold;
    } else {
      Json levels = Json::array();
      for (const std::size_t l : node.left_levels) {
        levels.push_back(schema[node.feature].levels[l]);
      }
      out["levels"] = std::move(levels);
    }
    return out;
  };
  return walk(0);
}

}  // namespace exposition
