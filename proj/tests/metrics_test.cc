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

#include "xaieval/metrics.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace xaieval::metrics {
namespace {

using ::xaieval::testing::RowFunction;

std::vector<double> Std(const Vector& v) { return {v.begin(), v.end()}; }

TEST(Pearson, Examples) {
  const std::vector<double> a{1, 2, 3}, b{2, 1, 3};
  EXPECT_NEAR(*PearsonCorrelation(a, b), 0.5, 1e-15);
  const std::vector<double> c{2, 4, 6};
  EXPECT_NEAR(*PearsonCorrelation(a, c), 1.0, 1e-15);
  const std::vector<double> flat{1, 1, 1};
  EXPECT_FALSE(PearsonCorrelation(a, flat).has_value());
  EXPECT_FALSE(PearsonCorrelation(std::vector<double>{1},
                                  std::vector<double>{2})
                   .has_value());
  EXPECT_THROW(PearsonCorrelation(a, std::vector<double>{1, 2}), InputError);
}

class FaithfulnessTest : public ::testing::Test {
 protected:
  explain::ScoreFn f_ = RowFunction([](const Vector& z) {
    return std::tanh(0.7 * z[0] - 0.3 * z[1] + 0.1 * z[2] * z[3]);
  });
  Vector x_ = (Vector(4) << 0.4, -1.1, 0.9, 0.5).finished();
  Vector base_ = Vector::Zero(4);
};

TEST_F(FaithfulnessTest, AblationEffectsCorrelatePerfectly) {
  const Vector delta = explain::FeatureAblationValues(f_, x_, base_);
  EXPECT_NEAR(*FaithfulnessEstimate(f_, x_, delta, base_).value, 1.0, 1e-12);
  EXPECT_NEAR(*FaithfulnessEstimate(f_, x_, -delta, base_).value, -1.0, 1e-12);
  const Vector scaled = (3.0 * delta).array() + 2.0;
  EXPECT_NEAR(*FaithfulnessEstimate(f_, x_, scaled, base_).value, 1.0, 1e-12);
}

TEST_F(FaithfulnessTest, BoundedAndDegenerate) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    Vector a(4);
    for (int i = 0; i < 4; ++i) a[i] = rng.Normal();
    const MetricValue v = FaithfulnessEstimate(f_, x_, a, base_);
    ASSERT_TRUE(v.value.has_value());
    EXPECT_LE(std::abs(*v.value), 1.0);
  }
  const MetricValue flat =
      FaithfulnessEstimate(f_, x_, Vector::Constant(4, 0.2), base_);
  EXPECT_FALSE(flat.value.has_value());
  EXPECT_EQ(flat.reason, kDegenerateCorrelation);
  const auto constant = RowFunction([](const Vector&) { return 1.0; });
  const Vector a = (Vector(4) << 1, 2, 3, 4).finished();
  EXPECT_EQ(FaithfulnessEstimate(constant, x_, a, base_).reason,
            kDegenerateCorrelation);
  EXPECT_THROW(FaithfulnessEstimate(f_, x_, Vector::Ones(3), base_), InputError);
}

TEST(Selectivity, ConstantModel) {
  const auto f = RowFunction([](const Vector&) { return 0.7; });
  EXPECT_DOUBLE_EQ(Selectivity(f, Vector::Ones(3), Vector::Ones(3),
                               Vector::Zero(3)),
                   0.7);
}

TEST(Selectivity, DecayCurveMean) {
  // Removing feature 0 first drops the score from 0.9 to 0.5 and it stays.
  const auto f = RowFunction([](const Vector& z) { return 0.5 + 0.4 * z[0]; });
  const Vector attribution = (Vector(2) << 0.8, 0.1).finished();
  EXPECT_NEAR(Selectivity(f, Vector::Ones(2), attribution, Vector::Zero(2)),
              0.6333333333333333, 1e-15);
  // The reverse order keeps 0.9 one step longer.
  const Vector reversed = (Vector(2) << 0.1, 0.8).finished();
  EXPECT_NEAR(Selectivity(f, Vector::Ones(2), reversed, Vector::Zero(2)),
              (0.9 + 0.9 + 0.5) / 3.0, 1e-15);
}

TEST(Selectivity, TiesBreakToLowerIndex) {
  const auto f = RowFunction([](const Vector& z) { return z[0]; });
  // Equal attributions: feature 0 goes first.
  EXPECT_NEAR(Selectivity(f, Vector::Ones(2), Vector::Ones(2), Vector::Zero(2)),
              1.0 / 3.0, 1e-15);
}

TEST(Selectivity, WithinScoreRange) {
  const auto f = RowFunction(
      [](const Vector& z) { return 1.0 / (1.0 + std::exp(-z.sum())); });
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    Vector x(5), a(5);
    for (int i = 0; i < 5; ++i) {
      x[i] = rng.Normal();
      a[i] = rng.Normal();
    }
    const double s = Selectivity(f, x, a, Vector::Zero(5));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Sensitivity, ConstantExplainerIsZero) {
  MetricConfig cfg;
  const SensitivityResult r =
      Sensitivity([](const Vector&) { return Vector::Ones(3); },
                  Vector::Zero(3), cfg);
  EXPECT_EQ(*r.average.value, 0.0);
  EXPECT_EQ(*r.maximum.value, 0.0);
}

// Identity explainer: D_j = |eta_j| / |x|, replayed from the documented
// draw order.
TEST(Sensitivity, IdentityExplainerMatchesReplay) {
  MetricConfig cfg;
  cfg.seed = 31;
  const Vector x = (Vector(3) << 1.0, -2.0, 0.5).finished();
  const SensitivityResult r =
      Sensitivity([](const Vector& z) { return z; }, x, cfg);
  Rng rng(cfg.seed);
  double sum = 0.0, max = 0.0;
  for (int j = 0; j < cfg.n_perturb; ++j) {
    double sq = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double m = rng.Uniform(cfg.lower_bound, cfg.upper_bound);
      rng.Uniform();
      sq += m * m;
    }
    const double dj = std::sqrt(sq) / x.norm();
    sum += dj;
    max = std::max(max, dj);
  }
  EXPECT_NEAR(*r.average.value, sum / cfg.n_perturb, 1e-12);
  EXPECT_NEAR(*r.maximum.value, max, 1e-12);
  EXPECT_LE(*r.average.value, *r.maximum.value);
  EXPECT_EQ(r.skipped, 0);
}

TEST(Sensitivity, ZeroReferenceUsesAbsoluteNorm) {
  MetricConfig cfg;
  cfg.lower_bound = cfg.upper_bound = 0.02;
  const SensitivityResult r =
      Sensitivity([](const Vector& z) { return z; }, Vector::Zero(4), cfg);
  EXPECT_NEAR(*r.average.value, 0.04, 1e-12);
}

TEST(Sensitivity, FailuresAreSkippedOrReported) {
  MetricConfig cfg;
  int calls = 0;
  const SensitivityResult partial = Sensitivity(
      [&](const Vector& z) -> Vector {
        if (calls++ % 2 == 0 && calls > 1) throw NumericError("boom");
        return z;
      },
      Vector::Ones(2), cfg);
  EXPECT_GT(partial.skipped, 0);
  EXPECT_TRUE(partial.average.value.has_value());

  int n = 0;
  const SensitivityResult none = Sensitivity(
      [&](const Vector& z) -> Vector {
        if (n++ > 0) throw NumericError("boom");
        return z;
      },
      Vector::Ones(2), cfg);
  EXPECT_EQ(none.average.reason, kAllPerturbationsFailed);
  EXPECT_EQ(none.skipped, cfg.n_perturb);

  const SensitivityResult ref = Sensitivity(
      [](const Vector&) -> Vector { throw NumericError("boom"); },
      Vector::Ones(2), cfg);
  EXPECT_EQ(ref.average.reason, kExplainerFailed);
  EXPECT_EQ(ref.maximum.reason, kExplainerFailed);
}

TEST(Sensitivity, ValidatesConfig) {
  MetricConfig cfg;
  cfg.lower_bound = 0.1;
  cfg.upper_bound = 0.05;
  EXPECT_THROW(
      Sensitivity([](const Vector& z) { return z; }, Vector::Ones(2), cfg),
      InputError);
  cfg = MetricConfig{};
  cfg.n_perturb = 0;
  EXPECT_THROW(cfg.Validate(), InputError);
}

TEST(Complexity, Examples) {
  EXPECT_NEAR(*Complexity(Vector::Constant(5, -0.3)).value, std::log(5.0),
              1e-12);
  EXPECT_EQ(*Complexity((Vector(3) << 0, 2, 0).finished()).value, 0.0);
  EXPECT_NEAR(*Complexity((Vector(3) << 0.5, 0.25, 0.25).finished()).value,
              1.0397207708399179, 1e-12);
  const MetricValue zero = Complexity(Vector::Zero(3));
  EXPECT_FALSE(zero.value.has_value());
  EXPECT_EQ(zero.reason, kDegenerateAttribution);
}

TEST(Complexity, SignAndScaleInvariantAndBounded) {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const int d = 1 + t % 9;
    Vector a(d);
    for (int i = 0; i < d; ++i) a[i] = rng.Normal();
    const double h = *Complexity(a).value;
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(d) + 1e-12);
    EXPECT_NEAR(*Complexity(-3.5 * a).value, h, 1e-12);
  }
}

TEST(MetricNames, RoundTrip) {
  for (Metric m : kAllMetrics) EXPECT_EQ(ParseMetric(MetricName(m)), m);
  EXPECT_FALSE(ParseMetric("accuracy").has_value());
}

}  // namespace
}  // namespace xaieval::metrics
