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

#ifndef XAIEVAL_SCORES_H_
#define XAIEVAL_SCORES_H_

#include <cstddef>
#include <span>

#include "json.hpp"

namespace xaieval::models {

// Macro-averaged over every class that occurs in y_true or y_pred. A class
// with no predicted (true) members has precision (recall) 0; F1 is 0 when
// both are 0.
struct EvalScores {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
};

EvalScores ComputeScores(std::span<const int> y_true, std::span<const int> y_pred);

nlohmann::json ToJson(const EvalScores& scores);

}  // namespace xaieval::models

#endif  // XAIEVAL_SCORES_H_
