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

#include "xaieval/predictor.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace xaieval::models {

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kLogistic:
      return "logistic";
    case Family::kForest:
      return "forest";
    case Family::kBoosted:
      return "boosted";
  }
  return "unknown";
}

std::optional<Family> ParseFamily(std::string_view name) {
  for (const Family f : kAllFamilies) {
    if (FamilyName(f) == name) return f;
  }
  return std::nullopt;
}

Vector Predictor::PredictProbaRow(const Vector& x) const {
  Matrix row = x.transpose();
  return PredictProba(row).row(0).transpose();
}

std::vector<int> Predictor::PredictClasses(const Matrix& rows) const {
  const Matrix proba = PredictProba(rows);
  std::vector<int> out(static_cast<std::size_t>(proba.rows()));
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = ArgMax(proba.row(i).transpose());
  }
  return out;
}

int ArgMax(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) best = k;
  }
  return static_cast<int>(best);
}

std::size_t CheckTrainingInputs(const Matrix& x, std::span<const int> y,
                                std::size_t n_classes) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw InputError("feature rows and labels differ in length");
  }
  if (y.empty()) throw InputError("empty training set");
  if (!x.allFinite()) throw InputError("non-finite feature values");
  const std::set<int> distinct(y.begin(), y.end());
  if (*distinct.begin() < 0) throw InputError("negative class label");
  if (distinct.size() < 2) {
    throw InputError("degenerate target: a single class in training data");
  }
  const auto needed = static_cast<std::size_t>(*distinct.rbegin()) + 1;
  if (n_classes == 0) return needed;
  if (needed > n_classes) {
    throw InputError("label " + std::to_string(needed - 1) +
                     " exceeds class count " + std::to_string(n_classes));
  }
  return n_classes;
}

}  // namespace xaieval::models
