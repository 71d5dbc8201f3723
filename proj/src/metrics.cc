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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "xaieval/random.h"

namespace xaieval::metrics {
namespace {

bool AllEqual(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) ==
         v.end();
}

void CheckShapes(const Vector& x, const Vector& attribution,
                 const Vector& baseline) {
  if (attribution.size() != x.size() || baseline.size() != x.size()) {
    throw InputError("metric: attribution, sample and baseline sizes differ");
  }
}

}  // namespace

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kFaithfulness:
      return "faithfulness";
    case Metric::kSelectivity:
      return "selectivity";
    case Metric::kAvgSensitivity:
      return "avg_sensitivity";
    case Metric::kMaxSensitivity:
      return "max_sensitivity";
    case Metric::kComplexity:
      return "complexity";
  }
  return "unknown";
}

std::optional<Metric> ParseMetric(std::string_view name) {
  for (const Metric m : kAllMetrics) {
    if (MetricName(m) == name) return m;
  }
  return std::nullopt;
}

void MetricConfig::Validate() const {
  if (n_perturb < 1) throw InputError("n_perturb must be at least 1");
  if (!(lower_bound > 0.0 && lower_bound <= upper_bound)) {
    throw InputError("perturbation bounds must satisfy 0 < lower <= upper");
  }
  if (!(zero_norm_tolerance >= 0.0)) {
    throw InputError("zero_norm_tolerance must be >= 0");
  }
}

std::optional<double> PearsonCorrelation(std::span<const double> a,
                                         std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("correlation: size mismatch");
  if (a.size() < 2 || AllEqual(a) || AllEqual(b)) return std::nullopt;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

MetricValue FaithfulnessEstimate(const explain::ScoreFn& f, const Vector& x,
                                 const Vector& attribution,
                                 const Vector& baseline) {
  CheckShapes(x, attribution, baseline);
  const Vector delta = explain::FeatureAblationValues(f, x, baseline);
  const auto r = PearsonCorrelation(
      std::span<const double>(attribution.data(), attribution.size()),
      std::span<const double>(delta.data(), delta.size()));
  if (!r) return MetricValue::Missing(std::string(kDegenerateCorrelation));
  return MetricValue::Of(*r);
}

double Selectivity(const explain::ScoreFn& f, const Vector& x,
                   const Vector& attribution, const Vector& baseline) {
  CheckShapes(x, attribution, baseline);
  const Eigen::Index d = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return attribution[a] > attribution[b];
                   });
  Matrix rows(d + 1, d);
  rows.row(0) = x.transpose();
  for (Eigen::Index k = 1; k <= d; ++k) {
    rows.row(k) = rows.row(k - 1);
    const Eigen::Index feature = order[static_cast<std::size_t>(k - 1)];
    rows(k, feature) = baseline[feature];
  }
  return f(rows).mean();
}

SensitivityResult Sensitivity(const Explainer& explainer, const Vector& x,
                              const MetricConfig& cfg) {
  cfg.Validate();
  SensitivityResult result;
  Vector reference;
  try {
    reference = explainer(x);
  } catch (const std::exception&) {
    result.average = MetricValue::Missing(std::string(kExplainerFailed));
    result.maximum = result.average;
    return result;
  }
  const double ref_norm = reference.norm();
  const double denom = ref_norm < cfg.zero_norm_tolerance ? 1.0 : ref_norm;

  Rng rng(cfg.seed);
  std::vector<double> changes;
  Vector z(x.size());
  for (int j = 0; j < cfg.n_perturb; ++j) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double magnitude = rng.Uniform(cfg.lower_bound, cfg.upper_bound);
      const double sign = rng.Uniform() < 0.5 ? -1.0 : 1.0;
      z[i] = x[i] + sign * magnitude;
    }
    try {
      const Vector e = explainer(z);
      if (e.size() != reference.size()) {
        throw InputError("explainer returned a different length");
      }
      changes.push_back((reference - e).norm() / denom);
    } catch (const std::exception&) {
      ++result.skipped;
    }
  }
  if (changes.empty()) {
    result.average = MetricValue::Missing(std::string(kAllPerturbationsFailed));
    result.maximum = result.average;
    return result;
  }
  const double sum = std::accumulate(changes.begin(), changes.end(), 0.0);
  result.average = MetricValue::Of(sum / static_cast<double>(changes.size()));
  result.maximum =
      MetricValue::Of(*std::max_element(changes.begin(), changes.end()));
  return result;
}

MetricValue Complexity(const Vector& attribution) {
  const Vector mag = attribution.cwiseAbs();
  const double total = mag.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    return MetricValue::Missing(std::string(kDegenerateAttribution));
  }
  double h = 0.0;
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    if (mag[i] == 0.0) continue;
    const double p = mag[i] / total;
    h -= p * std::log(p);
  }
  return MetricValue::Of(std::max(h, 0.0));
}

}  // namespace xaieval::metrics
