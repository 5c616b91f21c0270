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

#include <random>

#include "exposition/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace exposition {
namespace {

// Best single split by brute force: every feature, every midpoint.
struct Split {
  std::size_t feature;
  double threshold;
  double sse;
};

Split exhaustive_best_split(const Rows& x, const std::vector<double>& y,
                            std::size_t min_leaf) {
  Split best{0, 0, 1e300};
  for (std::size_t f = 0; f < x.n_cols(); ++f) {
    std::vector<double> values;
    for (std::size_t i = 0; i < x.n_rows(); ++i) values.push_back(x(i, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double t = values[k] / 2 + values[k + 1] / 2;
      double sl = 0, sr = 0, ql = 0, qr = 0;
      std::size_t nl = 0, nr = 0;
      for (std::size_t i = 0; i < x.n_rows(); ++i) {
        if (x(i, f) < t) {
          sl += y[i], ql += y[i] * y[i], ++nl;
        } else {
          sr += y[i], qr += y[i] * y[i], ++nr;
        }
      }
      if (nl < min_leaf || nr < min_leaf) continue;
      const double sse = (ql - sl * sl / nl) + (qr - sr * sr / nr);
      if (sse < best.sse - 1e-9) best = {f, t, sse};
    }
  }
  return best;
}

TEST(RegressionTree, RootMatchesExhaustiveSearch) {
  auto data = testing::uniform_data(200, 3, 1);
  std::vector<double> y(200);
  const Rows x = data->features();
  for (std::size_t i = 0; i < 200; ++i) {
    y[i] = (x(i, 1) > 0.3 ? 2.0 : 0.0) + 0.3 * x(i, 0) + 0.1 * x(i, 2);
  }
  const RegressionTree tree = RegressionTree::fit(x, y, {1, 5});
  const Split best = exhaustive_best_split(x, y, 5);
  const TreeNode& root = tree.nodes().front();
  EXPECT_EQ(root.feature, best.feature);
  EXPECT_EQ(root.threshold, best.threshold);
}

TEST(RegressionTree, XorNeedsDepthTwo) {
  std::vector<double> a, b, y;
  for (int rep = 0; rep < 5; ++rep) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        a.push_back(i);
        b.push_back(j);
        y.push_back(i ^ j);
      }
    }
  }
  auto data = testing::numeric_data({"a", "b"}, {a, b}, y);
  const Rows x = data->features();
  auto accuracy = [&](const RegressionTree& t) {
    int hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      hits += ((t.predict_row(x.row(i)) >= 0.5) == (y[i] == 1));
    }
    return static_cast<double>(hits) / y.size();
  };
  EXPECT_EQ(accuracy(RegressionTree::fit(x, y, {2, 1})), 1.0);
  EXPECT_LE(accuracy(RegressionTree::fit(x, y, {1, 1})), 0.75);
}

TEST(RegressionTree, SingleRowLeavesFitExactly) {
  std::vector<double> v = {0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5};
  std::vector<double> y = {3, -1, 4, 1, -5, 9, 2, -6};
  auto data = testing::numeric_data({"x"}, {v}, y);
  const Rows x = data->features();
  // Greedy splits need not balance, so allow the full depth.
  const RegressionTree tree = RegressionTree::fit(x, y, {7, 1});
  for (std::size_t i = 0; i < y.size(); ++i) {
    EXPECT_EQ(tree.predict_row(x.row(i)), y[i]);
  }
  EXPECT_EQ(tree.n_leaves(), 8);
  EXPECT_LE(tree.depth(), 7);
}

TEST(RegressionTree, CategoricalSplitGroupsLevelsByMean) {
  Schema schema = {testing::categorical("c", {"a", "b", "c", "d"}),
                   testing::numeric("y")};
  std::vector<double> c, y;
  const double means[] = {5, 0, 5, 0};
  for (int rep = 0; rep < 6; ++rep) {
    for (int l = 0; l < 4; ++l) {
      c.push_back(l);
      y.push_back(means[l]);
    }
  }
  auto data = std::make_shared<const Dataset>(
      schema, std::vector<std::vector<double>>{c, y}, "y");
  const RegressionTree tree =
      RegressionTree::fit(data->features(), y, {1, 1});
  const TreeNode& root = tree.nodes().front();
  ASSERT_FALSE(root.is_leaf);
  EXPECT_EQ(root.left_levels, (std::vector<std::size_t>{1, 3}));
  const Json j = tree.to_json(*data->feature_schema());
  EXPECT_EQ(j["levels"], Json({"b", "d"}));
}

TEST(RegressionTree, EveryRowReachesOneLeaf) {
  auto data = testing::uniform_data(150, 2, 2);
  std::vector<double> y(150);
  const Rows x = data->features();
  for (std::size_t i = 0; i < 150; ++i) y[i] = x(i, 0) * x(i, 1);
  const RegressionTree tree = RegressionTree::fit(x, y, {4, 3});
  std::vector<std::size_t> per_leaf(tree.nodes().size(), 0);
  for (std::size_t i = 0; i < 150; ++i) {
    const auto leaf = tree.leaf_for(x.row(i));
    ASSERT_TRUE(tree.nodes()[leaf].is_leaf);
    ++per_leaf[leaf];
  }
  for (std::size_t k = 0; k < per_leaf.size(); ++k) {
    if (tree.nodes()[k].is_leaf) EXPECT_EQ(per_leaf[k], tree.nodes()[k].n);
  }
}

TEST(RegressionTree, ParameterChecks) {
  auto data = testing::uniform_data(9, 1, 3);
  std::vector<double> y(9, 0.0);
  EXPECT_THROW(RegressionTree::fit(data->features(), y, {0, 1}),
               ParameterError);
  EXPECT_THROW(RegressionTree::fit(data->features(), y, {2, 5}),
               ParameterError);
}

}  // namespace
}  // namespace exposition
