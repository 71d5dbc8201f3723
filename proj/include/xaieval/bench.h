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

#ifndef XAIEVAL_BENCH_H_
#define XAIEVAL_BENCH_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xaieval/common.h"
#include "xaieval/data.h"
#include "xaieval/explain.h"
#include "xaieval/metrics.h"
#include "xaieval/predictor.h"
#include "xaieval/scores.h"

namespace xaieval::bench {

// Gaussian class clusters. Each class gets a random centre on the
// informative features (scaled by `separation`); the other features are pure
// noise. Categorical columns are noise features cut into letter bins.
struct SyntheticSpec {
  std::size_t n_rows = 200;
  std::size_t n_features = 4;
  // 0 means every numeric feature is informative.
  std::size_t n_informative = 0;
  std::size_t n_categorical = 0;
  int n_classes = 2;
  double separation = 1.0;
  // Fraction of labels replaced by a uniformly drawn class.
  double label_noise = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

inline constexpr std::string_view kSyntheticTarget = "target";

data::RawTable GenerateSynthetic(const SyntheticSpec& spec);

// Renders a synthetic table as CSV text (header first).
std::string ToCsv(const data::RawTable& table);

struct DatasetSpec {
  std::string name;
  // CSV file, resolved against the configuration's directory when relative.
  std::string path;
  std::string target_name;
  std::optional<SyntheticSpec> synthetic;
};

struct RunConfig {
  std::vector<DatasetSpec> datasets;
  std::optional<std::uint64_t> seed;
  int per_class = 5;
  double train_ratio = 0.8;
  int n_trials = 30;
  std::vector<models::Family> models = {std::begin(models::kAllFamilies),
                                        std::end(models::kAllFamilies)};
  std::vector<explain::Technique> techniques = {
      std::begin(explain::kAllTechniques), std::end(explain::kAllTechniques)};
  // Explainer settings; baseline, seed and target class are set per sample.
  int n_samples = 200;
  double kernel_width = 0.1;
  double ridge_lambda = 1.0;
  std::size_t shap_enumeration_limit = 4096;
  // Explainer sample count used inside the sensitivity metrics; 0 reuses
  // n_samples.
  int sensitivity_samples = 0;
  int n_perturb = 20;
  double perturb_lower = 0.01;
  double perturb_upper = 0.05;
  std::vector<double> bin_edges = {0.50, 0.55, 0.60, 0.65, 0.70, 0.75,
                                   0.80, 0.85, 0.90, 0.95, 1.00};
  // Cell values read as missing in CSV datasets.
  std::vector<std::string> missing_markers =
      data::CsvOptions{}.missing_markers;
  int parallelism = 1;
  // Feature Ablation removes one-hot groups as a unit.
  bool group_one_hot = false;

  std::uint64_t master_seed() const { return seed.value_or(0); }
  int inner_samples() const {
    return sensitivity_samples > 0 ? sensitivity_samples : n_samples;
  }
  // Throws InputError naming the offending field.
  void Validate() const;
};

// Strict: unknown keys and wrong types are errors (InputError).
RunConfig RunConfigFromJson(const nlohmann::json& doc);
nlohmann::json ToJson(const RunConfig& config);
// 16 hex digits of FNV-1a over the canonical JSON form.
std::string ConfigHash(const RunConfig& config);

struct ConsensusGroups {
  std::vector<std::size_t> correct;
  std::vector<std::size_t> wrong;
};

inline constexpr std::string_view kCorrectGroup = "correct";
inline constexpr std::string_view kWrongGroup = "wrong";

// correct: every model predicts y_i; wrong: every model misses y_i.
ConsensusGroups FormConsensusGroups(
    std::span<const std::vector<int>> predictions, std::span<const int> y_true);

// Up to k members per class, drawn by a seeded shuffle of the class members
// of `group`. Ordered by class index, then draw order. `labels` is indexed
// by the values stored in `group`.
std::vector<std::size_t> SamplePerClass(std::span<const std::size_t> group,
                                        std::span<const int> labels, int k,
                                        std::uint64_t seed);

// Bin label "lo-hi" in percent, e.g. "70-75". Bins are half-open except the
// last, which is closed. nullopt when f1 falls outside [edges.front(),
// edges.back()].
std::optional<std::string> AssignBin(double f1, std::span<const double> edges);
std::string BinLabel(double lower, double upper);

// Attribution of one sample plus its five metric values, in the order of
// metrics::kAllMetrics. Sensitivity re-explains each perturbed input for the
// same class with `inner_samples` explainer samples and a seed derived from
// the explainer seed and the input's coordinates.
struct SampleEvaluation {
  explain::Attribution attribution;
  std::vector<metrics::MetricValue> metrics;
};

// Throws when the attribution of x itself cannot be computed.
SampleEvaluation EvaluateSample(const models::Predictor& model,
                                explain::Technique technique, const Vector& x,
                                const explain::ExplainConfig& explain_config,
                                const metrics::MetricConfig& metric_config,
                                int inner_samples);

// One metric value for one (dataset, model, technique, sample, group).
struct MetricRecord {
  std::string dataset;
  std::string model;
  double f1 = 0.0;
  std::optional<std::string> f1_bin;
  std::string group;
  std::string technique;
  std::string metric;
  std::int64_t sample_id = -1;
  std::optional<double> value;
  std::string reason;
  std::size_t n_features = 0;
};

nlohmann::json ToJson(const MetricRecord& record);
MetricRecord MetricRecordFromJson(const nlohmann::json& doc);

// Faithfulness is reported inverted; every other metric as computed.
double ReportedValue(std::string_view metric, double raw);

struct BinKey {
  std::string bin;
  std::string group;
  std::string technique;
  std::string metric;

  auto operator<=>(const BinKey&) const = default;
};

struct AggregateRow {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  // Present values, missing values, distinct (dataset, sample) pairs and
  // distinct (dataset, model) pairs behind the present values.
  std::size_t count = 0;
  std::size_t missing_count = 0;
  std::size_t n_samples = 0;
  std::size_t n_model_dataset_pairs = 0;
};

using AggregateTable = std::map<BinKey, AggregateRow>;

// Reduces records in their given order. Records without a bin and keys with
// no present value produce no row.
AggregateTable Aggregate(std::span<const MetricRecord> records);

// Why records did not reach a table row, with counts.
std::map<std::string, std::size_t> Exclusions(
    std::span<const MetricRecord> records);

struct CorrelationPoint {
  std::string dataset;
  std::size_t n_features = 0;
  double value = 0.0;
};

struct CorrelationRow {
  std::string metric;
  std::optional<double> r;
  std::string note;
  std::vector<CorrelationPoint> points;
};

// Pearson r between dataset feature count and the dataset mean of each
// metric (reported orientation, all present records of the dataset).
// Datasets without a feature count or without values are skipped. Throws
// InputError when fewer than three datasets remain for every metric.
std::vector<CorrelationRow> FeatureCountCorrelation(
    std::span<const MetricRecord> records,
    const std::map<std::string, std::size_t>& feature_counts);

struct ModelSummary {
  std::string model;
  nlohmann::json params;
  models::EvalScores scores;
  std::optional<std::string> f1_bin;
};

struct DatasetSummary {
  std::string name;
  std::string checksum;
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<ModelSummary> models;
  std::size_t n_correct = 0;
  std::size_t n_wrong = 0;
  std::vector<std::int64_t> sampled_correct;
  std::vector<std::int64_t> sampled_wrong;
  std::size_t n_records = 0;
  std::vector<std::string> warnings;
  std::optional<std::string> error;
};

nlohmann::json ToJson(const DatasetSummary& summary);

struct BenchmarkReport {
  RunConfig config;
  std::vector<DatasetSummary> datasets;
  std::vector<MetricRecord> records;
  AggregateTable aggregate;
  std::vector<CorrelationRow> correlation;

  bool ok() const;
};

// Dataset paths are resolved against base_dir. Progress lines go to `log`
// when set. Dataset failures are recorded in their summary and the run
// continues.
BenchmarkReport RunBenchmark(const RunConfig& config,
                             const std::filesystem::path& base_dir = {},
                             std::ostream* log = nullptr);

// Design choices recorded in every manifest.
nlohmann::json DecisionFlags();

nlohmann::json Manifest(const BenchmarkReport& report);

// Feature counts keyed by dataset name, read from a manifest.
std::map<std::string, std::size_t> FeatureCountsFromManifest(
    const nlohmann::json& manifest);

}  // namespace xaieval::bench

#endif  // XAIEVAL_BENCH_H_
