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

#include "xaieval/logistic.h"

#include <cmath>
#include <utility>

namespace xaieval::models {
namespace {

constexpr double kGradientTolerance = 1e-6;
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

// Row-wise softmax of `scores`, in place. Returns the sum of log-partition
// terms.
double SoftmaxRows(Matrix& scores) {
  double log_partition_sum = 0.0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    auto row = scores.row(i);
    const double m = row.maxCoeff();
    row.array() = (row.array() - m).exp();
    const double z = row.sum();
    row /= z;
    log_partition_sum += m + std::log(z);
  }
  return log_partition_sum;
}

double Objective(const Matrix& weights, const Vector& bias, const Matrix& x,
                 std::span<const int> y, double c) {
  Matrix scores = x * weights.transpose();
  scores.rowwise() += bias.transpose();
  double picked = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    picked += scores(static_cast<Eigen::Index>(i), y[i]);
  }
  const double log_partition = SoftmaxRows(scores);
  return log_partition - picked + weights.squaredNorm() / (2.0 * c);
}

double InfNorm(const Matrix& gw, const Vector& gb) {
  double n = gw.size() > 0 ? gw.cwiseAbs().maxCoeff() : 0.0;
  if (gb.size() > 0) n = std::max(n, gb.cwiseAbs().maxCoeff());
  return n;
}

}  // namespace

LogisticModel::LogisticModel(Matrix weights, Vector bias, double c)
    : weights_(std::move(weights)), bias_(std::move(bias)), c_(c) {}

Matrix LogisticModel::PredictProba(const Matrix& rows) const {
  if (rows.cols() != weights_.cols()) {
    throw InputError("logistic: feature count mismatch");
  }
  Matrix scores = rows * weights_.transpose();
  scores.rowwise() += bias_.transpose();
  SoftmaxRows(scores);
  return scores;
}

nlohmann::json LogisticModel::ToJson() const {
  nlohmann::json w = nlohmann::json::array();
  for (Eigen::Index k = 0; k < weights_.rows(); ++k) {
    w.push_back(std::vector<double>(weights_.row(k).begin(),
                                    weights_.row(k).end()));
  }
  return {{"format", "xaieval-model"},
          {"version", 1},
          {"family", FamilyName(family())},
          {"n_classes", n_classes()},
          {"n_features", n_features()},
          {"params", {{"C", c_}}},
          {"weights", std::move(w)},
          {"bias", std::vector<double>(bias_.begin(), bias_.end())}};
}

LogisticObjective EvaluateLogisticObjective(const Matrix& weights,
                                            const Vector& bias,
                                            const Matrix& x,
                                            std::span<const int> y, double c) {
  Matrix scores = x * weights.transpose();
  scores.rowwise() += bias.transpose();
  double picked = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    picked += scores(static_cast<Eigen::Index>(i), y[i]);
  }
  LogisticObjective out;
  out.value = SoftmaxRows(scores) - picked + weights.squaredNorm() / (2.0 * c);
  // scores now holds probabilities; subtract the one-hot targets.
  for (std::size_t i = 0; i < y.size(); ++i) {
    scores(static_cast<Eigen::Index>(i), y[i]) -= 1.0;
  }
  out.grad_weights = scores.transpose() * x + weights / c;
  out.grad_bias = scores.colwise().sum().transpose();
  return out;
}

LogisticModel TrainLogistic(const Matrix& x, std::span<const int> y,
                            const LogisticParams& params,
                            std::size_t n_classes) {
  if (!(params.c > 0.0)) throw InputError("logistic: C must be positive");
  const std::size_t k = CheckTrainingInputs(x, y, n_classes);
  const auto kk = static_cast<Eigen::Index>(k);

  Matrix w = Matrix::Zero(kk, x.cols());
  Vector b = Vector::Zero(kk);
  LogisticObjective current = EvaluateLogisticObjective(w, b, x, y, params.c);
  double step = 1.0;
  int iter = 0;
  double grad_norm = InfNorm(current.grad_weights, current.grad_bias);

  for (; iter < params.max_iter && grad_norm >= kGradientTolerance; ++iter) {
    const double g2 =
        current.grad_weights.squaredNorm() + current.grad_bias.squaredNorm();
    step = std::min(step * 2.0, 1e6);
    Matrix w_next;
    Vector b_next;
    double f_next = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      w_next = w - step * current.grad_weights;
      b_next = b - step * current.grad_bias;
      f_next = Objective(w_next, b_next, x, y, params.c);
      if (std::isfinite(f_next) &&
          f_next <= current.value - kArmijo * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // No representable descent step remains.
    w = std::move(w_next);
    b = std::move(b_next);
    current = EvaluateLogisticObjective(w, b, x, y, params.c);
    grad_norm = InfNorm(current.grad_weights, current.grad_bias);
  }
  if (!w.allFinite() || !b.allFinite()) {
    throw NumericError("logistic: non-finite parameters after training");
  }

  LogisticModel model(std::move(w), std::move(b), params.c);
  model.iterations_ = iter;
  model.final_gradient_norm_ = grad_norm;
  return model;
}

}  // namespace xaieval::models
