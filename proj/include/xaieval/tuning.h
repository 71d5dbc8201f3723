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

#ifndef XAIEVAL_TUNING_H_
#define XAIEVAL_TUNING_H_

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "json.hpp"
#include "xaieval/boosted.h"
#include "xaieval/forest.h"
#include "xaieval/logistic.h"
#include "xaieval/random.h"
#include "xaieval/predictor.h"

namespace xaieval::models {

using ModelParams = std::variant<LogisticParams, ForestParams, BoostedParams>;

Family FamilyOf(const ModelParams& params);
nlohmann::json ToJson(const ModelParams& params);

// Mid-range settings used when no tuning is requested.
ModelParams DefaultParams(Family family);

// Uniform draws over the search spaces:
//   logistic  C log-uniform in [0.1, 10], max_iter 1000
//   forest    n_trees in {25, 50, ..., 150}, max_depth in {none, 3..7},
//             max_features in {sqrt, 5, 10}, min_split 2..5, min_leaf 1..2
//   boosted   max_depth 2..4, learning_rate [0.03, 0.10], n_trees 50..300,
//             subsample [0.7, 1.0], colsample [0.7, 1.0]
ModelParams SampleParams(Family family, Rng& rng);
bool WithinSearchSpace(const ModelParams& params);

std::unique_ptr<Predictor> TrainModel(const ModelParams& params,
                                      const Matrix& x, std::span<const int> y,
                                      std::uint64_t seed,
                                      std::size_t n_classes = 0);

struct TrialResult {
  std::size_t index = 0;
  ModelParams params;
  double validation_f1 = 0.0;
  std::uint64_t seed = 0;
};

struct TuneResult {
  ModelParams best;
  std::size_t best_index = 0;
  std::vector<TrialResult> trials;
};

// Seeded random search. Every trial trains on the same stratified 80% of
// (x, y) and is scored by macro F1 on the remaining 20%; the earliest trial
// with the highest score wins. Trial streams are derived from (seed, trial
// index), so `workers` does not change the outcome.
TuneResult Tune(Family family, const Matrix& x, std::span<const int> y,
                int n_trials, std::uint64_t seed, int workers = 1,
                std::size_t n_classes = 0);

}  // namespace xaieval::models

#endif  // XAIEVAL_TUNING_H_
