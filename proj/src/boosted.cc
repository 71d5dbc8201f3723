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

#include "xaieval/boosted.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <utility>

#include "xaieval/random.h"

namespace xaieval::models {
namespace {

constexpr double kMinHessian = 1e-16;
constexpr double kMinPrior = 1e-12;

std::span<const double> Row(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

// Converts raw margins into class probabilities, in place semantics per row.
void MarginsToProba(const Matrix& margins, std::size_t n_classes, Matrix& out) {
  out.resize(margins.rows(), static_cast<Eigen::Index>(n_classes));
  for (Eigen::Index i = 0; i < margins.rows(); ++i) {
    if (n_classes == 2) {
      const double p1 = 1.0 / (1.0 + std::exp(-margins(i, 0)));
      out(i, 0) = 1.0 - p1;
      out(i, 1) = p1;
    } else {
      auto row = out.row(i);
      const double m = margins.row(i).maxCoeff();
      row.array() = (margins.row(i).array() - m).exp();
      row /= row.sum();
    }
  }
}

// Exact greedy second-order regression tree.
class GradientTreeBuilder {
 public:
  GradientTreeBuilder(const Matrix& x, const std::vector<double>& grad,
                      const std::vector<double>& hess,
                      const std::vector<int>& features,
                      const BoostedParams& params)
      : x_(x), g_(grad), h_(hess), features_(features), params_(params) {}

  DecisionTree Fit(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    Build(0, rows_.size(), 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  double Score(double g, double h) const { return g * g / (h + params_.lambda); }

  int Build(std::size_t begin, std::size_t end, int depth) {
    double g_sum = 0.0, h_sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      g_sum += g_[rows_[i]];
      h_sum += h_[rows_[i]];
    }
    const int id = static_cast<int>(nodes_.size());
    TreeNode leaf;
    leaf.value = {-g_sum / (h_sum + params_.lambda) * params_.learning_rate};
    nodes_.push_back(std::move(leaf));
    if (depth >= params_.max_depth || end - begin < 2) return id;

    const double parent = Score(g_sum, h_sum);
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::tuple<double, double, double>> column(end - begin);
    for (const int f : features_) {
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = rows_[i];
        column[i - begin] = {x_(static_cast<Eigen::Index>(r), f), g_[r], h_[r]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) {
                  return std::get<0>(a) < std::get<0>(b);
                });
      double gl = 0.0, hl = 0.0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        gl += std::get<1>(column[i]);
        hl += std::get<2>(column[i]);
        const double v = std::get<0>(column[i]);
        const double next = std::get<0>(column[i + 1]);
        if (!(v < next)) continue;
        const double hr = h_sum - hl;
        if (hl < params_.min_child_weight || hr < params_.min_child_weight) {
          continue;
        }
        const double gain = Score(gl, hl) + Score(g_sum - gl, hr) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = Midpoint(v, next);
        }
      }
    }
    if (best_feature < 0) return id;

    const auto mid_it = std::stable_partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(begin),
        rows_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
          return x_(static_cast<Eigen::Index>(r), best_feature) <= best_threshold;
        });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());
    const int left = Build(begin, mid, depth + 1);
    const int right = Build(mid, end, depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    node.value.clear();
    return id;
  }

  const Matrix& x_;
  const std::vector<double>& g_;
  const std::vector<double>& h_;
  const std::vector<int>& features_;
  const BoostedParams& params_;
  std::vector<std::size_t> rows_;
  std::vector<TreeNode> nodes_;
};

std::size_t SampleCount(double fraction, std::size_t total) {
  const auto n = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(total) + 0.5));
  return std::clamp<std::size_t>(n, 1, total);
}

}  // namespace

std::string_view ObjectiveName(Objective objective) {
  return objective == Objective::kBinaryLogistic ? "binary-logistic" : "softmax";
}

BoostedModel::BoostedModel(std::vector<std::vector<DecisionTree>> rounds,
                           Vector base_margin, BoostedParams params,
                           std::uint64_t seed, std::size_t n_classes,
                           std::size_t n_features)
    : rounds_(std::move(rounds)),
      base_margin_(std::move(base_margin)),
      params_(params),
      seed_(seed),
      n_classes_(n_classes),
      n_features_(n_features) {}

Matrix BoostedModel::PredictProba(const Matrix& rows) const {
  return PredictProba(rows, rounds_.size());
}

Matrix BoostedModel::PredictProba(const Matrix& rows,
                                  std::size_t n_rounds) const {
  if (static_cast<std::size_t>(rows.cols()) != n_features_) {
    throw InputError("boosted: feature count mismatch");
  }
  n_rounds = std::min(n_rounds, rounds_.size());
  const auto t = static_cast<Eigen::Index>(trees_per_round());
  Matrix margins(rows.rows(), t);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    margins.row(i) = base_margin_.transpose();
    const auto row = Row(rows, i);
    for (std::size_t r = 0; r < n_rounds; ++r) {
      for (Eigen::Index k = 0; k < t; ++k) {
        margins(i, k) += rounds_[r][static_cast<std::size_t>(k)].Evaluate(row)[0];
      }
    }
  }
  Matrix proba;
  MarginsToProba(margins, n_classes_, proba);
  return proba;
}

nlohmann::json BoostedModel::ToJson() const {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& round : rounds_) {
    nlohmann::json trees = nlohmann::json::array();
    for (const DecisionTree& tree : round) trees.push_back(tree.ToJson());
    rounds.push_back(std::move(trees));
  }
  return {{"format", "xaieval-model"},
          {"version", 1},
          {"family", FamilyName(family())},
          {"objective", ObjectiveName(objective())},
          {"n_classes", n_classes_},
          {"n_features", n_features_},
          {"seed", seed_},
          {"params",
           {{"max_depth", params_.max_depth},
            {"learning_rate", params_.learning_rate},
            {"n_trees", params_.n_trees},
            {"subsample", params_.subsample},
            {"colsample", params_.colsample},
            {"lambda", params_.lambda},
            {"min_child_weight", params_.min_child_weight}}},
          {"base_margin",
           std::vector<double>(base_margin_.begin(), base_margin_.end())},
          {"rounds", std::move(rounds)}};
}

double LogLoss(const Matrix& proba, std::span<const int> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    total -= std::log(
        std::max(proba(static_cast<Eigen::Index>(i), y[i]), 1e-15));
  }
  return total / static_cast<double>(y.size());
}

BoostedModel TrainBoosted(const Matrix& x, std::span<const int> y,
                          const BoostedParams& params, std::uint64_t seed,
                          std::size_t n_classes) {
  const std::size_t k = CheckTrainingInputs(x, y, n_classes);
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw InputError("boosted: learning_rate must lie in (0, 1]");
  }
  if (!(params.subsample > 0.0 && params.subsample <= 1.0) ||
      !(params.colsample > 0.0 && params.colsample <= 1.0)) {
    throw InputError("boosted: subsample and colsample must lie in (0, 1]");
  }
  if (params.n_trees < 0 || params.max_depth < 0) {
    throw InputError("boosted: negative n_trees or max_depth");
  }
  const std::size_t n = y.size();
  const auto d = static_cast<std::size_t>(x.cols());
  const std::size_t t = k == 2 ? 1 : k;

  std::vector<double> prior(k, 0.0);
  for (const int label : y) prior[static_cast<std::size_t>(label)] += 1.0;
  for (double& p : prior) p = std::max(p / static_cast<double>(n), kMinPrior);
  Vector base(static_cast<Eigen::Index>(t));
  if (k == 2) {
    base[0] = std::log(prior[1] / prior[0]);
  } else {
    for (std::size_t c = 0; c < k; ++c) {
      base[static_cast<Eigen::Index>(c)] = std::log(prior[c]);
    }
  }

  Matrix margins(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  margins.rowwise() = base.transpose();
  Matrix proba;
  MarginsToProba(margins, k, proba);

  std::vector<std::vector<DecisionTree>> rounds;
  std::vector<double> history{LogLoss(proba, y)};
  std::vector<double> grad(n), hess(n);
  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
  std::vector<int> all_features(d);
  std::iota(all_features.begin(), all_features.end(), 0);

  for (int r = 0; r < params.n_trees; ++r) {
    Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(r)}));
    std::vector<std::size_t> rows = all_rows;
    if (params.subsample < 1.0) {
      rng.Shuffle(rows);
      rows.resize(SampleCount(params.subsample, n));
      std::sort(rows.begin(), rows.end());
    }
    std::vector<int> features = all_features;
    if (params.colsample < 1.0) {
      rng.Shuffle(features);
      features.resize(SampleCount(params.colsample, d));
      std::sort(features.begin(), features.end());
    }

    std::vector<DecisionTree> round;
    round.reserve(t);
    for (std::size_t c = 0; c < t; ++c) {
      const std::size_t cls = k == 2 ? 1 : c;
      for (std::size_t i = 0; i < n; ++i) {
        const double p = proba(static_cast<Eigen::Index>(i),
                               static_cast<Eigen::Index>(cls));
        const double target = static_cast<std::size_t>(y[i]) == cls ? 1.0 : 0.0;
        grad[i] = p - target;
        // Softmax uses the diagonal bound 2p(1-p) on the Hessian.
        const double h = k == 2 ? p * (1.0 - p) : 2.0 * p * (1.0 - p);
        hess[i] = std::max(h, kMinHessian);
      }
      GradientTreeBuilder builder(x, grad, hess, features, params);
      round.push_back(builder.Fit(rows));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = Row(x, static_cast<Eigen::Index>(i));
      for (std::size_t c = 0; c < t; ++c) {
        margins(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) +=
            round[c].Evaluate(row)[0];
      }
    }
    MarginsToProba(margins, k, proba);
    history.push_back(LogLoss(proba, y));
    rounds.push_back(std::move(round));
  }

  BoostedModel model(std::move(rounds), std::move(base), params, seed, k, d);
  model.loss_history_ = std::move(history);
  return model;
}

}  // namespace xaieval::models
