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

#include "xaieval/scores.h"

#include <map>

#include "xaieval/common.h"

namespace xaieval::models {

EvalScores ComputeScores(std::span<const int> y_true,
                         std::span<const int> y_pred) {
  if (y_true.empty()) throw InputError("scores: empty label vectors");
  if (y_true.size() != y_pred.size()) {
    throw InputError("scores: label vectors differ in length");
  }
  struct Counts {
    double tp = 0, fp = 0, fn = 0;
  };
  std::map<int, Counts> per_class;
  double correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || y_pred[i] < 0) throw InputError("scores: negative label");
    if (y_true[i] == y_pred[i]) {
      per_class[y_true[i]].tp += 1;
      correct += 1;
    } else {
      per_class[y_pred[i]].fp += 1;
      per_class[y_true[i]].fn += 1;
    }
  }
  EvalScores s;
  for (const auto& [label, c] : per_class) {
    const double p = c.tp + c.fp > 0 ? c.tp / (c.tp + c.fp) : 0.0;
    const double r = c.tp + c.fn > 0 ? c.tp / (c.tp + c.fn) : 0.0;
    s.precision += p;
    s.recall += r;
    s.f1 += p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  const auto k = static_cast<double>(per_class.size());
  s.precision /= k;
  s.recall /= k;
  s.f1 /= k;
  s.accuracy = correct / static_cast<double>(y_true.size());
  return s;
}

nlohmann::json ToJson(const EvalScores& scores) {
  return {{"f1", scores.f1},
          {"precision", scores.precision},
          {"recall", scores.recall},
          {"accuracy", scores.accuracy}};
}

}  // namespace xaieval::models
