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

#ifndef XAIEVAL_TESTS_TEST_UTIL_H_
#define XAIEVAL_TESTS_TEST_UTIL_H_

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "xaieval/common.h"
#include "xaieval/explain.h"
#include "xaieval/predictor.h"
#include "xaieval/random.h"

namespace xaieval::testing {

// Two-class predictor whose class-1 probability is an arbitrary function.
// Outputs are not clamped, so affine scores stay exactly affine.
class FunctionPredictor final : public models::Predictor {
 public:
  FunctionPredictor(std::size_t d, std::function<double(const Vector&)> f)
      : d_(d), f_(std::move(f)) {}

  Matrix PredictProba(const Matrix& rows) const override {
    Matrix out(rows.rows(), 2);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double p = f_(rows.row(i).transpose());
      out(i, 0) = 1.0 - p;
      out(i, 1) = p;
    }
    return out;
  }
  std::size_t n_classes() const override { return 2; }
  std::size_t n_features() const override { return d_; }
  models::Family family() const override { return models::Family::kLogistic; }
  nlohmann::json ToJson() const override { return {}; }

 private:
  std::size_t d_;
  std::function<double(const Vector&)> f_;
};

inline explain::ScoreFn RowFunction(std::function<double(const Vector&)> f) {
  return [f](const Matrix& rows) {
    Vector out(rows.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) out[i] = f(rows.row(i).transpose());
    return out;
  };
}

// Classical Shapley values: phi_i = sum over S not containing i of
// |S|! (d-|S|-1)! / d! * (v(S + i) - v(S)), v(S) = f(x on S, baseline off S).
inline Vector BruteForceShapley(const std::function<double(const Vector&)>& f,
                                const Vector& x, const Vector& baseline) {
  const auto d = static_cast<int>(x.size());
  std::vector<double> fact(d + 1, 1.0);
  for (int i = 1; i <= d; ++i) fact[i] = fact[i - 1] * i;
  auto value = [&](std::uint64_t mask) {
    Vector z = baseline;
    for (int i = 0; i < d; ++i) {
      if ((mask >> i) & 1U) z[i] = x[i];
    }
    return f(z);
  };
  Vector phi = Vector::Zero(d);
  for (int i = 0; i < d; ++i) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
      if ((mask >> i) & 1U) continue;
      const int s = std::popcount(mask);
      const double w = fact[s] * fact[d - s - 1] / fact[d];
      phi[i] += w * (value(mask | (std::uint64_t{1} << i)) - value(mask));
    }
  }
  return phi;
}

// Gaussian blobs: class k centred at 2.5 * e_(k mod d) with unit noise.
inline void MakeBlobs(std::size_t n, std::size_t d, int k, std::uint64_t seed,
                      Matrix& x, std::vector<int>& y) {
  Rng rng(seed);
  x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(k));
    y[i] = label;
    for (std::size_t j = 0; j < d; ++j) {
      const double centre = j == static_cast<std::size_t>(label) % d ? 2.5 : 0.0;
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          centre + rng.Normal();
    }
  }
}

}  // namespace xaieval::testing

#endif  // XAIEVAL_TESTS_TEST_UTIL_H_
