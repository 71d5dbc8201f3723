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

#include "xaieval/model_io.h"

#include <string>

#include "xaieval/boosted.h"
#include "xaieval/forest.h"
#include "xaieval/logistic.h"

namespace xaieval::models {

std::unique_ptr<Predictor> PredictorFromJson(const nlohmann::json& doc) {
  if (doc.value("format", "") != "xaieval-model") {
    throw InputError("model document: unknown format");
  }
  if (doc.value("version", 0) != 1) {
    throw InputError("model document: unsupported version");
  }
  const auto family = ParseFamily(doc.at("family").get<std::string>());
  if (!family) throw InputError("model document: unknown family");
  const auto k = doc.at("n_classes").get<std::size_t>();
  const auto d = doc.at("n_features").get<std::size_t>();
  const nlohmann::json& params = doc.at("params");

  switch (*family) {
    case Family::kLogistic: {
      const auto rows = doc.at("weights").get<std::vector<std::vector<double>>>();
      const auto bias = doc.at("bias").get<std::vector<double>>();
      if (rows.size() != k || bias.size() != k) {
        throw InputError("model document: logistic shape mismatch");
      }
      Matrix w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
      for (std::size_t r = 0; r < k; ++r) {
        if (rows[r].size() != d) {
          throw InputError("model document: logistic shape mismatch");
        }
        for (std::size_t c = 0; c < d; ++c) {
          w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      return std::make_unique<LogisticModel>(
          std::move(w), Eigen::Map<const Vector>(bias.data(), bias.size()),
          params.at("C").get<double>());
    }
    case Family::kForest: {
      ForestParams p;
      p.n_trees = params.at("n_trees").get<int>();
      if (!params.at("max_depth").is_null()) {
        p.max_depth = params.at("max_depth").get<int>();
      }
      p.max_features =
          MaxFeatures::Parse(params.at("max_features").get<std::string>());
      p.min_split = params.at("min_split").get<int>();
      p.min_leaf = params.at("min_leaf").get<int>();
      p.bootstrap = params.at("bootstrap").get<bool>();
      std::vector<DecisionTree> trees;
      for (const auto& t : doc.at("trees")) trees.push_back(DecisionTree::FromJson(t));
      return std::make_unique<ForestModel>(
          std::move(trees),
          doc.at("tree_seeds").get<std::vector<std::uint64_t>>(), p, k, d);
    }
    case Family::kBoosted: {
      BoostedParams p;
      p.max_depth = params.at("max_depth").get<int>();
      p.learning_rate = params.at("learning_rate").get<double>();
      p.n_trees = params.at("n_trees").get<int>();
      p.subsample = params.at("subsample").get<double>();
      p.colsample = params.at("colsample").get<double>();
      p.lambda = params.at("lambda").get<double>();
      p.min_child_weight = params.at("min_child_weight").get<double>();
      std::vector<std::vector<DecisionTree>> rounds;
      for (const auto& r : doc.at("rounds")) {
        std::vector<DecisionTree> round;
        for (const auto& t : r) round.push_back(DecisionTree::FromJson(t));
        rounds.push_back(std::move(round));
      }
      const auto base = doc.at("base_margin").get<std::vector<double>>();
      return std::make_unique<BoostedModel>(
          std::move(rounds), Eigen::Map<const Vector>(base.data(), base.size()),
          p, doc.at("seed").get<std::uint64_t>(), k, d);
    }
  }
  throw InputError("model document: unknown family");
}

}  // namespace xaieval::models
