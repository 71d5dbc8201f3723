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

#include "xaieval/forest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "xaieval/random.h"

namespace xaieval::models {
namespace {

std::span<const double> Row(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

class CartBuilder {
 public:
  CartBuilder(const Matrix& x, std::span<const int> y, std::size_t n_classes,
              const ForestParams& params, std::uint64_t seed)
      : x_(x), y_(y), k_(n_classes), params_(params), rng_(seed) {}

  DecisionTree Fit(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    Build(0, rows_.size(), 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
  };

  int Build(std::size_t begin, std::size_t end, int depth) {
    const std::size_t m = end - begin;
    std::vector<double> counts(k_, 0.0);
    for (std::size_t i = begin; i < end; ++i) counts[y_[rows_[i]]] += 1.0;
    const int id = static_cast<int>(nodes_.size());
    TreeNode leaf;
    leaf.value = counts;
    for (double& v : leaf.value) v /= static_cast<double>(m);
    nodes_.push_back(std::move(leaf));

    const auto nonzero = std::count_if(counts.begin(), counts.end(),
                                       [](double c) { return c > 0.0; });
    const bool depth_reached = params_.max_depth && depth >= *params_.max_depth;
    if (nonzero <= 1 || depth_reached ||
        m < static_cast<std::size_t>(params_.min_split) ||
        m < 2 * static_cast<std::size_t>(params_.min_leaf)) {
      return id;
    }

    const Split split = FindSplit(begin, end);
    if (split.feature < 0) return id;

    const auto mid_it = std::stable_partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(begin),
        rows_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
          return x_(static_cast<Eigen::Index>(r), split.feature) <=
                 split.threshold;
        });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());
    const int left = Build(begin, mid, depth + 1);
    const int right = Build(mid, end, depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    node.value.clear();
    return id;
  }

  // Candidate features come from a fresh random permutation. After the first
  // `max_features` candidates the search continues only while no valid split
  // has been found.
  Split FindSplit(std::size_t begin, std::size_t end) {
    const auto d = static_cast<std::size_t>(x_.cols());
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    rng_.Shuffle(order);
    const auto tries =
        static_cast<std::size_t>(params_.max_features.Resolve(d));

    const std::size_t m = end - begin;
    const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);
    std::vector<std::pair<double, int>> column(m);
    std::vector<double> left(k_), right(k_);
    Split best;
    for (std::size_t t = 0; t < d; ++t) {
      if (t >= tries && best.feature >= 0) break;
      const int f = order[t];
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = rows_[begin + i];
        column[i] = {x_(static_cast<Eigen::Index>(r), f), y_[r]};
      }
      std::sort(column.begin(), column.end());
      std::fill(left.begin(), left.end(), 0.0);
      std::fill(right.begin(), right.end(), 0.0);
      for (const auto& [v, label] : column) right[label] += 1.0;
      double left_sq = 0.0;
      double right_sq = 0.0;
      for (const double c : right) right_sq += c * c;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        const int label = column[i].second;
        left_sq += 2.0 * left[label] + 1.0;
        right_sq -= 2.0 * right[label] - 1.0;
        left[label] += 1.0;
        right[label] -= 1.0;
        if (!(column[i].first < column[i + 1].first)) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = m - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        // Maximizing this is minimizing the weighted child Gini impurity.
        const double score = left_sq / static_cast<double>(n_left) +
                             right_sq / static_cast<double>(n_right);
        if (score > best.score) {
          best.score = score;
          best.feature = f;
          best.threshold = Midpoint(column[i].first, column[i + 1].first);
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::size_t k_;
  const ForestParams& params_;
  Rng rng_;
  std::vector<std::size_t> rows_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

int MaxFeatures::Resolve(std::size_t n_features) const {
  const auto d = static_cast<int>(n_features);
  switch (kind) {
    case Kind::kSqrt:
      return std::max(1, static_cast<int>(std::ceil(std::sqrt(d))));
    case Kind::kCount:
      return std::clamp(count, 1, std::max(1, d));
    case Kind::kAll:
      return std::max(1, d);
  }
  return std::max(1, d);
}

std::string MaxFeatures::ToString() const {
  switch (kind) {
    case Kind::kSqrt:
      return "sqrt";
    case Kind::kCount:
      return std::to_string(count);
    case Kind::kAll:
      return "all";
  }
  return "all";
}

MaxFeatures MaxFeatures::Parse(const std::string& text) {
  if (text == "sqrt") return {Kind::kSqrt, 0};
  if (text == "all") return {Kind::kAll, 0};
  try {
    std::size_t used = 0;
    const int n = std::stoi(text, &used);
    if (used == text.size() && n > 0) return {Kind::kCount, n};
  } catch (const std::exception&) {
  }
  throw InputError("invalid max_features '" + text + "'");
}

ForestModel::ForestModel(std::vector<DecisionTree> trees,
                         std::vector<std::uint64_t> seeds, ForestParams params,
                         std::size_t n_classes, std::size_t n_features)
    : trees_(std::move(trees)),
      seeds_(std::move(seeds)),
      params_(std::move(params)),
      n_classes_(n_classes),
      n_features_(n_features) {}

Matrix ForestModel::PredictProba(const Matrix& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != n_features_) {
    throw InputError("forest: feature count mismatch");
  }
  Matrix out = Matrix::Zero(rows.rows(), static_cast<Eigen::Index>(n_classes_));
  if (trees_.empty()) {
    out.setConstant(1.0 / static_cast<double>(n_classes_));
    return out;
  }
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const auto row = Row(rows, i);
    for (const DecisionTree& tree : trees_) {
      const std::vector<double>& leaf = tree.Evaluate(row);
      for (std::size_t k = 0; k < n_classes_; ++k) {
        out(i, static_cast<Eigen::Index>(k)) += leaf[k];
      }
    }
  }
  out /= static_cast<double>(trees_.size());
  return out;
}

nlohmann::json ForestModel::ToJson() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const DecisionTree& t : trees_) trees.push_back(t.ToJson());
  nlohmann::json params{{"n_trees", params_.n_trees},
                        {"max_depth", nullptr},
                        {"max_features", params_.max_features.ToString()},
                        {"min_split", params_.min_split},
                        {"min_leaf", params_.min_leaf},
                        {"bootstrap", params_.bootstrap}};
  if (params_.max_depth) params["max_depth"] = *params_.max_depth;
  return {{"format", "xaieval-model"},
          {"version", 1},
          {"family", FamilyName(family())},
          {"n_classes", n_classes_},
          {"n_features", n_features_},
          {"params", std::move(params)},
          {"tree_seeds", seeds_},
          {"trees", std::move(trees)}};
}

DecisionTree FitClassificationTree(const Matrix& x, std::span<const int> y,
                                   std::size_t n_classes,
                                   std::vector<std::size_t> rows,
                                   const ForestParams& params,
                                   std::uint64_t seed) {
  if (rows.empty()) throw InputError("forest: empty row sample");
  CartBuilder builder(x, y, n_classes, params, seed);
  return builder.Fit(std::move(rows));
}

ForestModel TrainForest(const Matrix& x, std::span<const int> y,
                        const ForestParams& params, std::uint64_t seed,
                        std::size_t n_classes) {
  const std::size_t k = CheckTrainingInputs(x, y, n_classes);
  const std::size_t n = y.size();
  if (params.n_trees < 0) throw InputError("forest: negative tree count");
  if (params.min_leaf < 1 || params.min_split < 2) {
    throw InputError("forest: min_leaf must be >= 1 and min_split >= 2");
  }
  if (static_cast<std::size_t>(params.min_leaf) * 2 > n) {
    throw InputError("forest: min_leaf * 2 exceeds the number of samples");
  }
  if (params.max_depth && *params.max_depth < 0) {
    throw InputError("forest: negative max_depth");
  }

  std::vector<DecisionTree> trees;
  std::vector<std::uint64_t> seeds;
  trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    const std::uint64_t tree_seed =
        DeriveSeed(seed, {static_cast<std::uint64_t>(t)});
    Rng rng(tree_seed);
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (std::size_t& r : rows) r = rng.UniformInt(n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees.push_back(FitClassificationTree(x, y, k, std::move(rows), params,
                                          rng.NextU64()));
    seeds.push_back(tree_seed);
  }
  return ForestModel(std::move(trees), std::move(seeds), params, k,
                     static_cast<std::size_t>(x.cols()));
}

}  // namespace xaieval::models
