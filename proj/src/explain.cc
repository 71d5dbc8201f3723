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

#include "xaieval/explain.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "xaieval/random.h"

namespace xaieval::explain {
namespace {

void CheckSample(const Vector& x, std::size_t d) {
  if (static_cast<std::size_t>(x.size()) != d) {
    throw InputError("sample has " + std::to_string(x.size()) +
                     " features, model expects " + std::to_string(d));
  }
  if (!x.allFinite()) throw InputError("non-finite sample");
}

int ResolveClass(const models::Predictor& model, const Vector& x,
                 const ExplainConfig& cfg) {
  if (cfg.target_class) {
    if (*cfg.target_class < 0 ||
        static_cast<std::size_t>(*cfg.target_class) >= model.n_classes()) {
      throw InputError("target class out of range");
    }
    return *cfg.target_class;
  }
  return models::ArgMax(model.PredictProbaRow(x));
}

Attribution Finish(Vector values, int cls, Technique technique,
                   const ExplainConfig& cfg) {
  if (!values.allFinite()) {
    throw NumericError(std::string(TechniqueName(technique)) +
                       ": non-finite attribution");
  }
  Attribution a;
  a.values = std::move(values);
  a.explained_class = cls;
  a.technique = technique;
  a.fingerprint = Fingerprint(technique, cfg);
  return a;
}

double Binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

// Masked input: coordinates in the coalition from x, the rest from baseline.
void FillMasked(const std::vector<char>& in, const Vector& x,
                const Vector& baseline, Eigen::Ref<Eigen::RowVectorXd> row) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    row[i] = in[static_cast<std::size_t>(i)] ? x[i] : baseline[i];
  }
}

}  // namespace

std::string_view TechniqueName(Technique technique) {
  switch (technique) {
    case Technique::kLime:
      return "lime";
    case Technique::kKernelShap:
      return "kernel_shap";
    case Technique::kFeatureAblation:
      return "feature_ablation";
  }
  return "unknown";
}

std::optional<Technique> ParseTechnique(std::string_view name) {
  for (const Technique t : kAllTechniques) {
    if (TechniqueName(t) == name) return t;
  }
  return std::nullopt;
}

ScoreFn ClassScore(const models::Predictor& model, int cls) {
  return [&model, cls](const Matrix& rows) -> Vector {
    return model.PredictProba(rows).col(cls);
  };
}

void ExplainConfig::Validate(std::size_t n_features) const {
  if (n_samples < 1) throw InputError("n_samples must be at least 1");
  if (!(kernel_width > 0.0)) throw InputError("kernel_width must be positive");
  if (!(ridge_lambda >= 0.0)) throw InputError("ridge_lambda must be >= 0");
  if (baseline.size() != 0 &&
      static_cast<std::size_t>(baseline.size()) != n_features) {
    throw InputError("baseline length does not match the feature count");
  }
  if (!ablation_groups.empty() && ablation_groups.size() != n_features) {
    throw InputError("ablation_groups length does not match the feature count");
  }
}

Vector MeanBaseline(const Matrix& x_train) {
  if (x_train.rows() == 0) throw InputError("baseline: empty training matrix");
  return x_train.colwise().mean().transpose();
}

Vector FeatureAblationValues(const ScoreFn& f, const Vector& x,
                             const Vector& baseline,
                             std::span<const int> groups) {
  const auto d = x.size();
  if (baseline.size() != d) throw InputError("ablation: baseline size mismatch");
  if (groups.empty()) {
    Matrix rows(d + 1, d);
    rows.row(0) = x.transpose();
    for (Eigen::Index i = 0; i < d; ++i) {
      rows.row(i + 1) = x.transpose();
      rows(i + 1, i) = baseline[i];
    }
    const Vector scores = f(rows);
    return scores[0] - scores.tail(d).array();
  }

  if (static_cast<Eigen::Index>(groups.size()) != d) {
    throw InputError("ablation: group map size mismatch");
  }
  std::map<int, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < d; ++i) {
    members[groups[static_cast<std::size_t>(i)]].push_back(i);
  }
  Matrix rows(static_cast<Eigen::Index>(members.size()) + 1, d);
  rows.row(0) = x.transpose();
  Eigen::Index r = 1;
  for (const auto& [id, idx] : members) {
    rows.row(r) = x.transpose();
    for (const Eigen::Index i : idx) rows(r, i) = baseline[i];
    ++r;
  }
  const Vector scores = f(rows);
  Vector values(d);
  r = 1;
  for (const auto& [id, idx] : members) {
    for (const Eigen::Index i : idx) values[i] = scores[0] - scores[r];
    ++r;
  }
  return values;
}

Vector LimeValues(const ScoreFn& f, const Vector& x, const ExplainConfig& cfg) {
  if (cfg.n_samples < 2) throw InputError("lime: n_samples must be at least 2");
  if (!(cfg.kernel_width > 0.0)) throw InputError("lime: kernel_width must be positive");
  if (!(cfg.ridge_lambda >= 0.0)) throw InputError("lime: ridge_lambda must be >= 0");
  const auto d = x.size();
  const auto n = static_cast<Eigen::Index>(cfg.n_samples);

  Rng rng(cfg.seed);
  Matrix z(n, d);
  Vector log_w(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double dist2 = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double e = rng.Normal();
      z(j, i) = x[i] + e;
      dist2 += e * e;
    }
    log_w[j] = -dist2 / (2.0 * cfg.kernel_width * cfg.kernel_width);
  }
  const Vector w = (log_w.array() - log_w.maxCoeff()).exp();
  const Vector y = f(z);

  const double w_sum = w.sum();
  const Eigen::RowVectorXd z_mean = (w.transpose() * z) / w_sum;
  const double y_mean = w.dot(y) / w_sum;
  Matrix zc = z.rowwise() - z_mean;
  const Vector yc = y.array() - y_mean;
  const Vector sqrt_w = w.array().sqrt();
  zc = sqrt_w.asDiagonal() * zc;
  const Vector yw = sqrt_w.cwiseProduct(yc);

  Eigen::MatrixXd gram = zc.transpose() * zc;
  gram.diagonal().array() += cfg.ridge_lambda;
  const Eigen::VectorXd rhs = zc.transpose() * yw;
  if (cfg.ridge_lambda > 0.0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() == Eigen::Success) {
      Vector beta = ldlt.solve(rhs);
      if (beta.allFinite()) return beta;
    }
  }
  return Eigen::MatrixXd(zc).completeOrthogonalDecomposition().solve(yw);
}

double ShapleyKernelWeight(std::size_t d, std::size_t s) {
  return static_cast<double>(d - 1) /
         (Binomial(d, s) * static_cast<double>(s) * static_cast<double>(d - s));
}

ShapResult KernelShapValues(const ScoreFn& f, const Vector& x,
                            const Vector& baseline, int n_samples,
                            std::uint64_t seed,
                            std::size_t enumeration_limit) {
  const auto d = static_cast<std::size_t>(x.size());
  if (d == 0) throw InputError("kernel_shap: no features");
  if (static_cast<std::size_t>(baseline.size()) != d) {
    throw InputError("kernel_shap: baseline size mismatch");
  }
  const auto di = static_cast<Eigen::Index>(d);

  std::vector<std::vector<char>> coalitions;
  std::vector<double> weights;
  const bool enumerate = d < 63 && (std::uint64_t{1} << d) <= enumeration_limit;
  if (enumerate) {
    const std::uint64_t total = std::uint64_t{1} << d;
    for (std::uint64_t mask = 1; mask + 1 < total; ++mask) {
      std::vector<char> in(d);
      std::size_t size = 0;
      for (std::size_t i = 0; i < d; ++i) {
        in[i] = (mask >> i) & 1U;
        size += in[i];
      }
      coalitions.push_back(std::move(in));
      weights.push_back(ShapleyKernelWeight(d, size));
    }
  } else if (d > 1) {
    if (n_samples < 1) throw InputError("kernel_shap: n_samples must be >= 1");
    // Size s has total kernel mass (d-1) / (s (d-s)).
    std::vector<double> cumulative(d - 1);
    double acc = 0.0;
    for (std::size_t s = 1; s < d; ++s) {
      acc += 1.0 / static_cast<double>(s * (d - s));
      cumulative[s - 1] = acc;
    }
    Rng rng(seed);
    std::vector<std::size_t> order(d);
    while (coalitions.size() < static_cast<std::size_t>(n_samples)) {
      const double u = rng.Uniform() * acc;
      const std::size_t s =
          static_cast<std::size_t>(
              std::upper_bound(cumulative.begin(), cumulative.end(), u) -
              cumulative.begin()) + 1;
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng.Shuffle(order);
      std::vector<char> in(d, 0);
      for (std::size_t i = 0; i < std::min(s, d - 1); ++i) in[order[i]] = 1;
      std::vector<char> complement(d);
      for (std::size_t i = 0; i < d; ++i) complement[i] = !in[i];
      coalitions.push_back(std::move(in));
      weights.push_back(1.0);
      if (coalitions.size() < static_cast<std::size_t>(n_samples)) {
        coalitions.push_back(std::move(complement));
        weights.push_back(1.0);
      }
    }
  }

  const auto m = static_cast<Eigen::Index>(coalitions.size());
  Matrix rows(m + 2, di);
  rows.row(0) = x.transpose();
  rows.row(1) = baseline.transpose();
  for (Eigen::Index j = 0; j < m; ++j) {
    FillMasked(coalitions[static_cast<std::size_t>(j)], x, baseline,
               rows.row(j + 2));
  }
  const Vector scores = f(rows);
  const double f_base = scores[1];
  const double total_effect = scores[0] - f_base;

  ShapResult result;
  result.enumerated = enumerate;
  if (d == 1) {
    result.values = Vector::Constant(1, total_effect);
    return result;
  }

  // Eliminate the last coordinate: phi_last = total - sum(others).
  Eigen::MatrixXd a(m, di - 1);
  Vector t(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& in = coalitions[static_cast<std::size_t>(j)];
    const double z_last = in[d - 1] ? 1.0 : 0.0;
    const double sw = std::sqrt(weights[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i + 1 < di; ++i) {
      a(j, i) = sw * ((in[static_cast<std::size_t>(i)] ? 1.0 : 0.0) - z_last);
    }
    t[j] = sw * (scores[j + 2] - f_base - z_last * total_effect);
  }
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  result.values.resize(di);
  if (cod.rank() < di - 1) {
    result.values.setConstant(total_effect / static_cast<double>(d));
    result.efficiency_only = true;
    return result;
  }
  const Vector head = cod.solve(t);
  result.values.head(di - 1) = head;
  result.values[di - 1] = total_effect - head.sum();
  return result;
}

Attribution ExplainFeatureAblation(const models::Predictor& model,
                                   const Vector& x, const ExplainConfig& cfg) {
  const std::size_t d = model.n_features();
  CheckSample(x, d);
  cfg.Validate(d);
  if (cfg.baseline.size() == 0) throw InputError("ablation: baseline required");
  const int cls = ResolveClass(model, x, cfg);
  return Finish(FeatureAblationValues(ClassScore(model, cls), x, cfg.baseline,
                                      cfg.ablation_groups),
                cls, Technique::kFeatureAblation, cfg);
}

Attribution ExplainLime(const models::Predictor& model, const Vector& x,
                        const ExplainConfig& cfg) {
  const std::size_t d = model.n_features();
  CheckSample(x, d);
  cfg.Validate(d);
  const int cls = ResolveClass(model, x, cfg);
  return Finish(LimeValues(ClassScore(model, cls), x, cfg), cls,
                Technique::kLime, cfg);
}

Attribution ExplainKernelShap(const models::Predictor& model, const Vector& x,
                              const ExplainConfig& cfg) {
  const std::size_t d = model.n_features();
  CheckSample(x, d);
  cfg.Validate(d);
  if (cfg.baseline.size() == 0) throw InputError("kernel_shap: baseline required");
  const int cls = ResolveClass(model, x, cfg);
  ShapResult shap =
      KernelShapValues(ClassScore(model, cls), x, cfg.baseline, cfg.n_samples,
                       cfg.seed, cfg.shap_enumeration_limit);
  Attribution a =
      Finish(std::move(shap.values), cls, Technique::kKernelShap, cfg);
  if (shap.efficiency_only) a.flags.push_back("efficiency-only");
  return a;
}

Attribution Explain(Technique technique, const models::Predictor& model,
                    const Vector& x, const ExplainConfig& cfg) {
  switch (technique) {
    case Technique::kLime:
      return ExplainLime(model, x, cfg);
    case Technique::kKernelShap:
      return ExplainKernelShap(model, x, cfg);
    case Technique::kFeatureAblation:
      return ExplainFeatureAblation(model, x, cfg);
  }
  throw InputError("unknown technique");
}

std::string Fingerprint(Technique technique, const ExplainConfig& cfg) {
  char buf[256];
  switch (technique) {
    case Technique::kLime:
      std::snprintf(buf, sizeof(buf), "lime;n=%d;w=%.17g;lambda=%.17g;seed=%llu",
                    cfg.n_samples, cfg.kernel_width, cfg.ridge_lambda,
                    static_cast<unsigned long long>(cfg.seed));
      break;
    case Technique::kKernelShap:
      std::snprintf(buf, sizeof(buf), "kernel_shap;n=%d;limit=%zu;seed=%llu",
                    cfg.n_samples, cfg.shap_enumeration_limit,
                    static_cast<unsigned long long>(cfg.seed));
      break;
    case Technique::kFeatureAblation:
      std::snprintf(buf, sizeof(buf), "feature_ablation;grouped=%d",
                    cfg.ablation_groups.empty() ? 0 : 1);
      break;
  }
  std::string text(buf);
  for (Eigen::Index i = 0; i < cfg.baseline.size(); ++i) {
    char v[32];
    std::snprintf(v, sizeof(v), ";%.17g", cfg.baseline[i]);
    text += v;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(text)));
  return hex;
}

nlohmann::json ToJson(const Attribution& attribution, std::string_view dataset,
                      std::string_view model) {
  return {{"dataset", dataset},
          {"model", model},
          {"technique", TechniqueName(attribution.technique)},
          {"sample_id", attribution.sample_id},
          {"class", attribution.explained_class},
          {"values", std::vector<double>(attribution.values.begin(),
                                         attribution.values.end())}};
}

}  // namespace xaieval::explain
