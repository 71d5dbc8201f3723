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

#ifndef XAIEVAL_PREDICTOR_H_
#define XAIEVAL_PREDICTOR_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xaieval/common.h"

namespace xaieval::models {

enum class Family { kLogistic, kForest, kBoosted };

inline constexpr Family kAllFamilies[] = {Family::kLogistic, Family::kForest,
                                          Family::kBoosted};

std::string_view FamilyName(Family family);
std::optional<Family> ParseFamily(std::string_view name);

// Probabilistic classifier. Every row returned by PredictProba is nonnegative
// and sums to one. Implementations are immutable after training, so
// concurrent prediction is safe.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual Matrix PredictProba(const Matrix& rows) const = 0;
  virtual std::size_t n_classes() const = 0;
  virtual std::size_t n_features() const = 0;
  virtual Family family() const = 0;
  // Versioned document; see model_io.h for the loader.
  virtual nlohmann::json ToJson() const = 0;

  Vector PredictProbaRow(const Vector& x) const;
  std::vector<int> PredictClasses(const Matrix& rows) const;
};

// Index of the largest entry; ties go to the lower index.
int ArgMax(const Vector& v);

// Validates training inputs and returns the class count: n_classes when
// nonzero, otherwise max(label) + 1. Throws InputError for a degenerate
// target, non-finite features or mismatched sizes.
std::size_t CheckTrainingInputs(const Matrix& x, std::span<const int> y,
                                std::size_t n_classes);

}  // namespace xaieval::models

#endif  // XAIEVAL_PREDICTOR_H_
