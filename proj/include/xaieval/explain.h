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

#ifndef XAIEVAL_EXPLAIN_H_
#define XAIEVAL_EXPLAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xaieval/common.h"
#include "xaieval/predictor.h"

namespace xaieval::explain {

enum class Technique { kLime, kKernelShap, kFeatureAblation };

inline constexpr Technique kAllTechniques[] = {
    Technique::kLime, Technique::kKernelShap, Technique::kFeatureAblation};

std::string_view TechniqueName(Technique technique);
std::optional<Technique> ParseTechnique(std::string_view name);

// Scores a batch of rows (one per matrix row) for a fixed output.
using ScoreFn = std::function<Vector(const Matrix& rows)>;

// f_c: the predicted probability of class `cls`. Holds a reference to model.
ScoreFn ClassScore(const models::Predictor& model, int cls);

struct ExplainConfig {
  int n_samples = 200;
  double kernel_width = 0.1;
  double ridge_lambda = 1.0;
  std::uint64_t seed = 0;
  // Reference input for Kernel SHAP and Feature Ablation.
  Vector baseline;
  // Explained class; the model's argmax at x when unset.
  std::optional<int> target_class;
  // Optional feature -> group id map. When set, Feature Ablation replaces a
  // whole group at once and assigns the group's effect to every member.
  std::vector<int> ablation_groups;
  // Kernel SHAP enumerates every coalition while 2^d is at most this value.
  std::size_t shap_enumeration_limit = 4096;

  // Throws InputError when a field is out of range for d features.
  void Validate(std::size_t n_features) const;
};

struct Attribution {
  Vector values;
  int explained_class = 0;
  Technique technique = Technique::kFeatureAblation;
  std::int64_t sample_id = -1;
  // Hash of the technique settings that produced the values.
  std::string fingerprint;
  // Non-fatal conditions, e.g. "efficiency-only" for a Kernel SHAP fallback.
  std::vector<std::string> flags;
};

// Per-feature arithmetic mean of the training rows.
Vector MeanBaseline(const Matrix& x_train);

// values[i] = f(x) - f(x with feature i (or its group) set to baseline[i]).
// Uses d + 1 evaluations in one batch (one per group when grouped).
Vector FeatureAblationValues(const ScoreFn& f, const Vector& x,
                             const Vector& baseline,
                             std::span<const int> groups = {});

// Perturbation j is x + e_j where e_j holds draws j*d .. j*d + d - 1 of
// Rng(seed).Normal(). Weights are exp(-|e_j|^2 / (2 w^2)), rescaled so the
// largest equals 1 (computed in log space so narrow kernels do not
// underflow). Returns the coefficients of a weighted ridge fit with an
// unpenalized intercept.
Vector LimeValues(const ScoreFn& f, const Vector& x, const ExplainConfig& cfg);

struct ShapResult {
  Vector values;
  bool enumerated = false;
  // The weighted system was rank deficient; values split the total effect
  // equally.
  bool efficiency_only = false;
};

// Kernel SHAP with the efficiency constraint sum(phi) = f(x) - f(baseline)
// enforced by eliminating the last coordinate. Enumerates all proper
// nonempty coalitions with exact Shapley-kernel weights while 2^d <=
// enumeration_limit; otherwise draws ceil(n/2) coalitions with size
// probability proportional to the kernel mass and uniform membership, each
// paired with its complement.
ShapResult KernelShapValues(const ScoreFn& f, const Vector& x,
                            const Vector& baseline, int n_samples,
                            std::uint64_t seed,
                            std::size_t enumeration_limit = 4096);

// Shapley kernel weight (d-1) / (C(d,s) * s * (d-s)) for 0 < s < d.
double ShapleyKernelWeight(std::size_t d, std::size_t s);

Attribution ExplainFeatureAblation(const models::Predictor& model,
                                   const Vector& x, const ExplainConfig& cfg);
Attribution ExplainLime(const models::Predictor& model, const Vector& x,
                        const ExplainConfig& cfg);
Attribution ExplainKernelShap(const models::Predictor& model, const Vector& x,
                              const ExplainConfig& cfg);
Attribution Explain(Technique technique, const models::Predictor& model,
                    const Vector& x, const ExplainConfig& cfg);

std::string Fingerprint(Technique technique, const ExplainConfig& cfg);

// JSON-lines record {dataset, model, technique, sample_id, class, values}.
nlohmann::json ToJson(const Attribution& attribution, std::string_view dataset,
                      std::string_view model);

}  // namespace xaieval::explain

#endif  // XAIEVAL_EXPLAIN_H_
