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

#ifndef XAIEVAL_LOGISTIC_H_
#define XAIEVAL_LOGISTIC_H_

#include <span>

#include "xaieval/predictor.h"

namespace xaieval::models {

struct LogisticParams {
  double c = 1.0;
  int max_iter = 1000;
};

// Multinomial logistic regression with one weight row per class.
class LogisticModel final : public Predictor {
 public:
  LogisticModel(Matrix weights, Vector bias, double c);

  Matrix PredictProba(const Matrix& rows) const override;
  std::size_t n_classes() const override { return bias_.size(); }
  std::size_t n_features() const override { return weights_.cols(); }
  Family family() const override { return Family::kLogistic; }
  nlohmann::json ToJson() const override;

  const Matrix& weights() const { return weights_; }
  const Vector& bias() const { return bias_; }
  double c() const { return c_; }
  int iterations() const { return iterations_; }
  double final_gradient_norm() const { return final_gradient_norm_; }

 private:
  friend LogisticModel TrainLogistic(const Matrix&, std::span<const int>,
                                     const LogisticParams&, std::size_t);
  Matrix weights_;  // K x d
  Vector bias_;     // K
  double c_;
  int iterations_ = 0;
  double final_gradient_norm_ = 0.0;
};

struct LogisticObjective {
  double value = 0.0;
  Matrix grad_weights;
  Vector grad_bias;
};

// Sum of per-sample cross-entropies plus ||W||^2 / (2C). The bias is not
// penalized.
LogisticObjective EvaluateLogisticObjective(const Matrix& weights,
                                            const Vector& bias,
                                            const Matrix& x,
                                            std::span<const int> y, double c);

// Full-batch gradient descent with Armijo backtracking. Stops when the
// gradient's infinity norm drops below 1e-6 or after max_iter steps.
LogisticModel TrainLogistic(const Matrix& x, std::span<const int> y,
                            const LogisticParams& params,
                            std::size_t n_classes = 0);

}  // namespace xaieval::models

#endif  // XAIEVAL_LOGISTIC_H_
