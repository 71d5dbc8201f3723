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

#include "xaieval/tree.h"

#include <algorithm>
#include <utility>

#include "xaieval/common.h"

namespace xaieval::models {

DecisionTree::DecisionTree(std::vector<TreeNode> nodes)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InputError("tree: no nodes");
  for (const TreeNode& n : nodes_) {
    if (n.is_leaf()) continue;
    const auto size = static_cast<int>(nodes_.size());
    if (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size) {
      throw InputError("tree: child index out of range");
    }
  }
}

const std::vector<double>& DecisionTree::Evaluate(
    std::span<const double> row) const {
  const TreeNode* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[row[static_cast<std::size_t>(node->feature)] <= node->threshold
                       ? node->left
                       : node->right];
  }
  return node->value;
}

int DecisionTree::Depth() const {
  // Children are always stored after their parent.
  std::vector<int> depth(nodes_.size(), 0);
  int max_depth = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) continue;
    depth[n.left] = depth[n.right] = depth[i] + 1;
    max_depth = std::max(max_depth, depth[i] + 1);
  }
  return max_depth;
}

nlohmann::json DecisionTree::ToJson() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const TreeNode& n : nodes_) {
    if (n.is_leaf()) {
      nodes.push_back({{"value", n.value}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right}});
    }
  }
  return nodes;
}

DecisionTree DecisionTree::FromJson(const nlohmann::json& doc) {
  std::vector<TreeNode> nodes;
  for (const auto& n : doc) {
    TreeNode node;
    if (n.contains("value")) {
      node.value = n.at("value").get<std::vector<double>>();
    } else {
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
    }
    nodes.push_back(std::move(node));
  }
  return DecisionTree(std::move(nodes));
}

double Midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

}  // namespace xaieval::models
