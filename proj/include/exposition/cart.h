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

// Greedy CART regression tree (squared-error splits).
//
// Numeric splits send x < threshold left; the threshold is the midpoint of the
// two adjacent distinct values it separates. Categorical splits send a level
// subset left; candidate subsets are prefixes of the node's levels sorted by
// mean target. Among equally good splits the lowest feature index wins, then
// the smallest threshold (or shortest prefix). A node that is not pure is
// split even when no split reduces the error, as long as both children keep
// `min_leaf` rows.

#ifndef EXPOSITION_CART_H_
#define EXPOSITION_CART_H_

#include <cstddef>
#include <span>
#include <vector>

#include "exposition/dataset.h"
#include "exposition/explanation.h"

namespace exposition {

struct TreeParams {
  std::size_t max_depth = 3;
  std::size_t min_leaf = 5;
};

struct TreeNode {
  bool is_leaf = true;
  double value = 0;  // Mean target of the rows reaching the node.
  std::size_t n = 0;
  std::size_t feature = 0;
  double threshold = 0;
  std::vector<std::size_t> left_levels;  // Categorical splits, ascending.
  std::size_t left = 0;
  std::size_t right = 0;
};

class RegressionTree {
 public:
  // Throws ParameterError unless max_depth >= 1, min_leaf >= 1 and
  // n >= 2 * min_leaf.
  static RegressionTree fit(const Rows& x, std::span<const double> target,
                            const TreeParams& params);

  double predict_row(std::span<const double> row) const;
  std::vector<double> predict(const Rows& rows) const;
  // Index into nodes() of the leaf a row falls in.
  std::size_t leaf_for(std::span<const double> row) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t n_leaves() const;

  // {variable, threshold|levels, n, left, right} | {leaf_value, n}
  Json to_json(const Schema& schema) const;

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace exposition

#endif  // EXPOSITION_CART_H_
