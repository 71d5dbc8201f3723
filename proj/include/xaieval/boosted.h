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

#ifndef XAIEVAL_BOOSTED_H_
#define XAIEVAL_BOOSTED_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "xaieval/predictor.h"
#include "xaieval/tree.h"

namespace xaieval::models {

struct BoostedParams {
  int max_depth = 3;
  double learning_rate = 0.1;
  int n_trees = 100;
  double subsample = 1.0;
  double colsample = 1.0;
  double lambda = 1.0;
  double min_child_weight = 1.0;
};

enum class Objective { kBinaryLogistic, kSoftmax };

std::string_view ObjectiveName(Objective objective);

// Gradient-boosted regression trees on the logistic (K = 2) or softmax
// (K > 2) loss. Binary models keep one tree per round on the class-1 margin;
// softmax models keep K trees per round.
class BoostedModel final : public Predictor {
 public:
  BoostedModel(std::vector<std::vector<DecisionTree>> rounds,
               Vector base_margin, BoostedParams params, std::uint64_t seed,
               std::size_t n_classes, std::size_t n_features);

  Matrix PredictProba(const Matrix& rows) const override;
  // Uses only the first `n_rounds` boosting rounds.
  Matrix PredictProba(const Matrix& rows, std::size_t n_rounds) const;
  std::size_t n_classes() const override { return n_classes_; }
  std::size_t n_features() const override { return n_features_; }
  Family family() const override { return Family::kBoosted; }
  nlohmann::json ToJson() const override;

  Objective objective() const {
    return n_classes_ == 2 ? Objective::kBinaryLogistic : Objective::kSoftmax;
  }
  std::size_t n_rounds() const { return rounds_.size(); }
  std::size_t trees_per_round() const {
    return n_classes_ == 2 ? 1 : n_classes_;
  }
  const std::vector<std::vector<DecisionTree>>& rounds() const {
    return rounds_;
  }
  const Vector& base_margin() const { return base_margin_; }
  const BoostedParams& params() const { return params_; }
  // Mean training log-loss after each round; entry 0 is the base score.
  const std::vector<double>& loss_history() const { return loss_history_; }

 private:
  friend BoostedModel TrainBoosted(const Matrix&, std::span<const int>,
                                   const BoostedParams&, std::uint64_t,
                                   std::size_t);
  std::vector<std::vector<DecisionTree>> rounds_;
  Vector base_margin_;
  BoostedParams params_;
  std::uint64_t seed_;
  std::size_t n_classes_;
  std::size_t n_features_;
  std::vector<double> loss_history_;
};

BoostedModel TrainBoosted(const Matrix& x, std::span<const int> y,
                          const BoostedParams& params, std::uint64_t seed,
                          std::size_t n_classes = 0);

// Mean negative log-likelihood of the true classes, probabilities floored at
// 1e-15.
double LogLoss(const Matrix& proba, std::span<const int> y);

}  // namespace xaieval::models

#endif  // XAIEVAL_BOOSTED_H_
