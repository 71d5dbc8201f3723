/*
 * Copyright 2026 The xaieval Authors.
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

#ifndef XAIEVAL_TREE_H_
#define XAIEVAL_TREE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace xaieval::models {

// Internal nodes route x[feature] <= threshold to `left`. Leaves carry a
// value vector: a class distribution for classification trees, a single
// weight for boosting trees.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes);

  const std::vector<double>& Evaluate(std::span<const double> row) const;
  int Depth() const;
  std::size_t size() const { return nodes_.size(); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  nlohmann::json ToJson() const;
  static DecisionTree FromJson(const nlohmann::json& doc);

 private:
  std::vector<TreeNode> nodes_;
};

// Split threshold strictly between two sorted distinct values.
double Midpoint(double lo, double hi);

}  // namespace xaieval::models

#endif  // XAIEVAL_TREE_H_
