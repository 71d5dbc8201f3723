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

#ifndef XAIEVAL_METRICS_H_
#define XAIEVAL_METRICS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "xaieval/common.h"
#include "xaieval/explain.h"

namespace xaieval::metrics {

enum class Metric {
  kFaithfulness,
  kSelectivity,
  kAvgSensitivity,
  kMaxSensitivity,
  kComplexity,
};

inline constexpr Metric kAllMetrics[] = {
    Metric::kFaithfulness, Metric::kSelectivity, Metric::kAvgSensitivity,
    Metric::kMaxSensitivity, Metric::kComplexity};

std::string_view MetricName(Metric metric);
std::optional<Metric> ParseMetric(std::string_view name);

// A metric result; degenerate inputs yield no value plus a reason tag.
struct MetricValue {
  std::optional<double> value;
  std::string reason;

  static MetricValue Of(double v) { return {v, {}}; }
  static MetricValue Missing(std::string why) {
    return {std::nullopt, std::move(why)};
  }
};

inline constexpr std::string_view kDegenerateCorrelation =
    "degenerate-correlation";
inline constexpr std::string_view kDegenerateAttribution =
    "degenerate-attribution";
inline constexpr std::string_view kAllPerturbationsFailed =
    "all-perturbations-failed";
inline constexpr std::string_view kExplainerFailed = "explainer-failed";

struct MetricConfig {
  int n_perturb = 20;
  double lower_bound = 0.01;
  double upper_bound = 0.05;
  std::uint64_t seed = 0;
  double zero_norm_tolerance = 1e-12;

  void Validate() const;
};

// Pearson correlation; nullopt when either input has zero variance or
// fewer than two entries.
std::optional<double> PearsonCorrelation(std::span<const double> a,
                                         std::span<const double> b);

// Pearson correlation between the attribution and the single-feature
// baseline-replacement effects f(x) - f(x with feature i at baseline).
MetricValue FaithfulnessEstimate(const explain::ScoreFn& f, const Vector& x,
                                 const Vector& attribution,
                                 const Vector& baseline);

// Mean of the decay curve s_0..s_d, where s_k scores x with its top-k
// features (by descending signed attribution, ties to the lower index)
// replaced by the baseline.
double Selectivity(const explain::ScoreFn& f, const Vector& x,
                   const Vector& attribution, const Vector& baseline);

// Returns the attribution of a (possibly perturbed) input. May throw.
using Explainer = std::function<Vector(const Vector& x)>;

struct SensitivityResult {
  MetricValue average;
  MetricValue maximum;
  int skipped = 0;
};

// For j = 1..n_perturb and each coordinate i, perturbation j draws, in this
// order from Rng(cfg.seed): a magnitude Uniform(lower, upper) and then a
// sign (negative when Uniform() < 0.5). D_j = |e(x) - e(x + eta_j)| /
// |e(x)|, falling back to the absolute norm when |e(x)| is below the
// tolerance. Throwing draws are skipped and counted.
SensitivityResult Sensitivity(const Explainer& explainer, const Vector& x,
                              const MetricConfig& cfg);

// Shannon entropy (natural log) of |a| / sum|a|.
MetricValue Complexity(const Vector& attribution);

}  // namespace xaieval::metrics

#endif  // XAIEVAL_METRICS_H_
