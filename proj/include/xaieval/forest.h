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

#ifndef XAIEVAL_FOREST_H_
#define XAIEVAL_FOREST_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xaieval/predictor.h"
#include "xaieval/tree.h"

namespace xaieval::models {

// Features tried per node: ceil(sqrt(d)), a fixed count capped at d, or all.
struct MaxFeatures {
  enum class Kind { kSqrt, kCount, kAll };
  Kind kind = Kind::kSqrt;
  int count = 0;

  int Resolve(std::size_t n_features) const;
  std::string ToString() const;
  static MaxFeatures Parse(const std::string& text);
  bool operator==(const MaxFeatures&) const = default;
};

struct ForestParams {
  int n_trees = 100;
  std::optional<int> max_depth;  // nullopt grows until pure or min_split.
  MaxFeatures max_features;
  int min_split = 2;
  int min_leaf = 1;
  bool bootstrap = true;
};

class ForestModel final : public Predictor {
 public:
  ForestModel(std::vector<DecisionTree> trees, std::vector<std::uint64_t> seeds,
              ForestParams params, std::size_t n_classes,
              std::size_t n_features);

  Matrix PredictProba(const Matrix& rows) const override;
  std::size_t n_classes() const override { return n_classes_; }
  std::size_t n_features() const override { return n_features_; }
  Family family() const override { return Family::kForest; }
  nlohmann::json ToJson() const override;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<std::uint64_t>& tree_seeds() const { return seeds_; }
  const ForestParams& params() const { return params_; }

 private:
  std::vector<DecisionTree> trees_;
  std::vector<std::uint64_t> seeds_;
  ForestParams params_;
  std::size_t n_classes_;
  std::size_t n_features_;
};

// Fits a single Gini CART tree on the given (possibly repeated) row indices.
DecisionTree FitClassificationTree(const Matrix& x, std::span<const int> y,
                                   std::size_t n_classes,
                                   std::vector<std::size_t> rows,
                                   const ForestParams& params,
                                   std::uint64_t seed);

ForestModel TrainForest(const Matrix& x, std::span<const int> y,
                        const ForestParams& params, std::uint64_t seed,
                        std::size_t n_classes = 0);

}  // namespace xaieval::models

#endif  // XAIEVAL_FOREST_H_
