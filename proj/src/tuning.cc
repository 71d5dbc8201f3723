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

#include "xaieval/tuning.h"

#include <cmath>

#include "xaieval/data.h"
#include "xaieval/parallel.h"
#include "xaieval/scores.h"

namespace xaieval::models {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int UniformIntIn(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(hi - lo + 1)));
}

Matrix SelectRows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace

Family FamilyOf(const ModelParams& params) {
  return std::visit(
      Overloaded{[](const LogisticParams&) { return Family::kLogistic; },
                 [](const ForestParams&) { return Family::kForest; },
                 [](const BoostedParams&) { return Family::kBoosted; }},
      params);
}

nlohmann::json ToJson(const ModelParams& params) {
  return std::visit(
      Overloaded{
          [](const LogisticParams& p) -> nlohmann::json {
            return {{"family", "logistic"}, {"C", p.c}, {"max_iter", p.max_iter}};
          },
          [](const ForestParams& p) -> nlohmann::json {
            nlohmann::json j{{"family", "forest"},
                             {"n_trees", p.n_trees},
                             {"max_depth", nullptr},
                             {"max_features", p.max_features.ToString()},
                             {"min_split", p.min_split},
                             {"min_leaf", p.min_leaf},
                             {"bootstrap", p.bootstrap}};
            if (p.max_depth) j["max_depth"] = *p.max_depth;
            return j;
          },
          [](const BoostedParams& p) -> nlohmann::json {
            return {{"family", "boosted"},
                    {"max_depth", p.max_depth},
                    {"learning_rate", p.learning_rate},
                    {"n_trees", p.n_trees},
                    {"subsample", p.subsample},
                    {"colsample", p.colsample}};
          }},
      params);
}

ModelParams DefaultParams(Family family) {
  switch (family) {
    case Family::kLogistic:
      return LogisticParams{1.0, 1000};
    case Family::kForest: {
      ForestParams p;
      p.n_trees = 100;
      return p;
    }
    case Family::kBoosted: {
      BoostedParams p;
      p.max_depth = 3;
      p.learning_rate = 0.1;
      p.n_trees = 100;
      return p;
    }
  }
  throw InputError("unknown model family");
}

ModelParams SampleParams(Family family, Rng& rng) {
  switch (family) {
    case Family::kLogistic:
      return LogisticParams{std::exp(rng.Uniform(std::log(0.1), std::log(10.0))),
                            1000};
    case Family::kForest: {
      ForestParams p;
      p.n_trees = 25 * UniformIntIn(rng, 1, 6);
      const int depth_choice = UniformIntIn(rng, 0, 5);
      if (depth_choice > 0) p.max_depth = depth_choice + 2;
      switch (UniformIntIn(rng, 0, 2)) {
        case 0:
          p.max_features = {MaxFeatures::Kind::kSqrt, 0};
          break;
        case 1:
          p.max_features = {MaxFeatures::Kind::kCount, 5};
          break;
        default:
          p.max_features = {MaxFeatures::Kind::kCount, 10};
      }
      p.min_split = UniformIntIn(rng, 2, 5);
      p.min_leaf = UniformIntIn(rng, 1, 2);
      return p;
    }
    case Family::kBoosted: {
      BoostedParams p;
      p.max_depth = UniformIntIn(rng, 2, 4);
      p.learning_rate = rng.Uniform(0.03, 0.10);
      p.n_trees = UniformIntIn(rng, 50, 300);
      p.subsample = rng.Uniform(0.7, 1.0);
      p.colsample = rng.Uniform(0.7, 1.0);
      return p;
    }
  }
  throw InputError("unknown model family");
}

bool WithinSearchSpace(const ModelParams& params) {
  return std::visit(
      Overloaded{
          [](const LogisticParams& p) {
            return p.c >= 0.1 && p.c <= 10.0 && p.max_iter == 1000;
          },
          [](const ForestParams& p) {
            const bool depth_ok =
                !p.max_depth || (*p.max_depth >= 3 && *p.max_depth <= 7);
            const bool features_ok =
                p.max_features.kind == MaxFeatures::Kind::kSqrt ||
                (p.max_features.kind == MaxFeatures::Kind::kCount &&
                 (p.max_features.count == 5 || p.max_features.count == 10));
            return p.n_trees >= 25 && p.n_trees <= 150 && p.n_trees % 25 == 0 &&
                   depth_ok && features_ok && p.min_split >= 2 &&
                   p.min_split <= 5 && p.min_leaf >= 1 && p.min_leaf <= 2 &&
                   p.bootstrap;
          },
          [](const BoostedParams& p) {
            return p.max_depth >= 2 && p.max_depth <= 4 &&
                   p.learning_rate >= 0.03 && p.learning_rate <= 0.10 &&
                   p.n_trees >= 50 && p.n_trees <= 300 && p.subsample >= 0.7 &&
                   p.subsample <= 1.0 && p.colsample >= 0.7 && p.colsample <= 1.0;
          }},
      params);
}

std::unique_ptr<Predictor> TrainModel(const ModelParams& params,
                                      const Matrix& x, std::span<const int> y,
                                      std::uint64_t seed,
                                      std::size_t n_classes) {
  return std::visit(
      Overloaded{
          [&](const LogisticParams& p) -> std::unique_ptr<Predictor> {
            return std::make_unique<LogisticModel>(
                TrainLogistic(x, y, p, n_classes));
          },
          [&](const ForestParams& p) -> std::unique_ptr<Predictor> {
            return std::make_unique<ForestModel>(
                TrainForest(x, y, p, seed, n_classes));
          },
          [&](const BoostedParams& p) -> std::unique_ptr<Predictor> {
            return std::make_unique<BoostedModel>(
                TrainBoosted(x, y, p, seed, n_classes));
          }},
      params);
}

TuneResult Tune(Family family, const Matrix& x, std::span<const int> y,
                int n_trials, std::uint64_t seed, int workers,
                std::size_t n_classes) {
  if (n_trials < 1) throw InputError("tune: n_trials must be at least 1");
  const std::size_t k = CheckTrainingInputs(x, y, n_classes);

  const data::SplitIndices split =
      data::StratifiedSplit(y, 0.8, DeriveSeed(seed, {stage::kTuneSplit}));
  const Matrix x_fit = SelectRows(x, split.train);
  const Matrix x_val = SelectRows(x, split.test);
  std::vector<int> y_fit, y_val;
  for (const std::size_t i : split.train) y_fit.push_back(y[i]);
  for (const std::size_t i : split.test) y_val.push_back(y[i]);

  TuneResult result;
  result.trials.resize(static_cast<std::size_t>(n_trials));
  for (std::size_t t = 0; t < result.trials.size(); ++t) {
    TrialResult& trial = result.trials[t];
    trial.index = t;
    trial.seed = DeriveSeed(seed, {stage::kTuneTrial, t});
    Rng rng(trial.seed);
    trial.params = SampleParams(family, rng);
  }
  ParallelFor(result.trials.size(), workers, [&](std::size_t t) {
    TrialResult& trial = result.trials[t];
    if (y_val.empty()) {
      trial.validation_f1 = 0.0;
      return;
    }
    const auto model = TrainModel(trial.params, x_fit, y_fit,
                                  DeriveSeed(trial.seed, {1}), k);
    trial.validation_f1 =
        ComputeScores(y_val, model->PredictClasses(x_val)).f1;
  });
  for (const TrialResult& trial : result.trials) {
    if (trial.validation_f1 > result.trials[result.best_index].validation_f1) {
      result.best_index = trial.index;
    }
  }
  result.best = result.trials[result.best_index].params;
  return result;
}

}  // namespace xaieval::models
