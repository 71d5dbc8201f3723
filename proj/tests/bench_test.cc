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

#include "xaieval/bench.h"

#include <cmath>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "xaieval/random.h"
#include "xaieval/report_io.h"

namespace xaieval::bench {
namespace {

using nlohmann::json;

TEST(Consensus, PartialAgreementBelongsToNeitherGroup) {
  const std::vector<int> y{0, 1, 1};
  const std::vector<std::vector<int>> preds{{0, 1, 0}, {0, 1, 1}, {0, 0, 1}};
  const ConsensusGroups g = FormConsensusGroups(preds, y);
  EXPECT_EQ(g.correct, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(g.wrong.empty());
}

TEST(Consensus, AllWrongAndSingleModel) {
  const std::vector<int> y{0, 1, 2, 1};
  const std::vector<std::vector<int>> preds{{1, 1, 0, 1}, {2, 1, 1, 0}};
  EXPECT_EQ(FormConsensusGroups(preds, y).wrong,
            (std::vector<std::size_t>{0, 2}));
  const std::vector<std::vector<int>> one{{0, 0, 2, 2}};
  const ConsensusGroups g = FormConsensusGroups(one, y);
  EXPECT_EQ(g.correct.size() + g.wrong.size(), y.size());
}

TEST(Consensus, DisjointOnRandomPredictions) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> y(30);
    for (int& v : y) v = static_cast<int>(rng.UniformInt(3));
    std::vector<std::vector<int>> preds(1 + t % 3, std::vector<int>(30));
    for (auto& p : preds) {
      for (int& v : p) v = static_cast<int>(rng.UniformInt(3));
    }
    const ConsensusGroups g = FormConsensusGroups(preds, y);
    std::set<std::size_t> c(g.correct.begin(), g.correct.end());
    for (std::size_t i : g.wrong) EXPECT_FALSE(c.contains(i));
    for (std::size_t i : g.correct) {
      for (const auto& p : preds) EXPECT_EQ(p[i], y[i]);
    }
  }
}

TEST(Consensus, Errors) {
  const std::vector<int> y{0, 1};
  EXPECT_THROW(FormConsensusGroups(std::vector<std::vector<int>>{}, y),
               InputError);
  const std::vector<std::vector<int>> short_pred{{0}};
  EXPECT_THROW(FormConsensusGroups(short_pred, y), InputError);
}

TEST(SamplePerClass, WheneverPossible) {
  const std::vector<int> labels{0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  const std::vector<std::size_t> group{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto picked = SamplePerClass(group, labels, 5, 3);
  ASSERT_EQ(picked.size(), 8u);
  // Class 0 first (all three members), then five of class 1.
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(labels[picked[i]], 0);
  for (std::size_t i = 3; i < 8; ++i) EXPECT_EQ(labels[picked[i]], 1);
  EXPECT_EQ(picked, SamplePerClass(group, labels, 5, 3));
  EXPECT_EQ(std::set<std::size_t>(picked.begin(), picked.end()).size(), 8u);
}

TEST(SamplePerClass, FivePerClassAndEdgeCases) {
  std::vector<int> labels(20);
  std::vector<std::size_t> group(20);
  for (std::size_t i = 0; i < 20; ++i) {
    labels[i] = static_cast<int>(i % 2);
    group[i] = i;
  }
  EXPECT_EQ(SamplePerClass(group, labels, 5, 9).size(), 10u);
  EXPECT_TRUE(SamplePerClass({}, labels, 5, 9).empty());
  EXPECT_THROW(SamplePerClass(group, labels, 0, 9), InputError);
  EXPECT_NE(SamplePerClass(group, labels, 5, 9),
            SamplePerClass(group, labels, 5, 10));
}

TEST(AssignBin, Examples) {
  const RunConfig cfg;
  EXPECT_EQ(AssignBin(0.52, cfg.bin_edges), "50-55");
  EXPECT_EQ(AssignBin(0.62, cfg.bin_edges), "60-65");
  EXPECT_EQ(AssignBin(1.00, cfg.bin_edges), "95-100");
  EXPECT_EQ(AssignBin(0.50, cfg.bin_edges), "50-55");
  EXPECT_EQ(AssignBin(0.55, cfg.bin_edges), "55-60");
  EXPECT_EQ(AssignBin(0.95, cfg.bin_edges), "95-100");
  EXPECT_FALSE(AssignBin(0.49, cfg.bin_edges).has_value());
  EXPECT_FALSE(AssignBin(std::nan(""), cfg.bin_edges).has_value());
  const std::vector<double> custom{0.0, 0.125, 1.0};
  EXPECT_EQ(AssignBin(0.1, custom), "0-12.5");
}

MetricRecord Rec(std::string metric, std::optional<double> value,
                 std::optional<std::string> bin = "70-75",
                 std::string dataset = "ds", std::int64_t sample = 0) {
  MetricRecord r;
  r.dataset = std::move(dataset);
  r.model = "logistic";
  r.f1 = 0.72;
  r.f1_bin = std::move(bin);
  r.group = "correct";
  r.technique = "lime";
  r.metric = std::move(metric);
  r.sample_id = sample;
  r.value = value;
  if (!value) r.reason = "degenerate-correlation";
  return r;
}

TEST(Aggregate, Examples) {
  const std::vector<MetricRecord> two{Rec("complexity", 0.2),
                                      Rec("complexity", 0.4, "70-75", "ds", 1)};
  const AggregateRow row = Aggregate(two).begin()->second;
  EXPECT_EQ(row.min, 0.2);
  EXPECT_NEAR(row.mean, 0.3, 1e-15);
  EXPECT_EQ(row.max, 0.4);
  EXPECT_EQ(row.count, 2u);
  EXPECT_EQ(row.n_samples, 2u);
  EXPECT_EQ(row.n_model_dataset_pairs, 1u);

  const std::vector<MetricRecord> faith{Rec("faithfulness", 1.0)};
  const AggregateRow f = Aggregate(faith).begin()->second;
  EXPECT_EQ(f.min, -1.0);
  EXPECT_EQ(f.max, -1.0);

  const std::vector<MetricRecord> mixed{Rec("faithfulness", 0.5),
                                        Rec("faithfulness", std::nullopt)};
  const AggregateRow m = Aggregate(mixed).begin()->second;
  EXPECT_EQ(m.count, 1u);
  EXPECT_EQ(m.missing_count, 1u);
}

TEST(Aggregate, ExclusionsAccountForEveryRecord) {
  Rng rng(4);
  std::vector<MetricRecord> records;
  const char* bins[] = {"50-55", "90-95"};
  for (int i = 0; i < 500; ++i) {
    std::optional<std::string> bin;
    if (rng.Uniform() < 0.8) bin = bins[rng.UniformInt(2)];
    std::optional<double> value;
    if (rng.Uniform() < 0.9) value = rng.Normal();
    const std::string metric(
        metrics::MetricName(metrics::kAllMetrics[rng.UniformInt(5)]));
    records.push_back(Rec(metric, value, bin, "ds" + std::to_string(i % 4), i));
  }
  // A key whose only record is missing.
  records.push_back(Rec("selectivity", std::nullopt, "60-65"));
  const AggregateTable table = Aggregate(records);
  std::size_t accounted = 0;
  for (const auto& [key, row] : table) {
    accounted += row.count + row.missing_count;
    EXPECT_GE(row.count, 1u);
    EXPECT_LE(row.min, row.mean);
    EXPECT_LE(row.mean, row.max);
  }
  for (const auto& [reason, n] : Exclusions(records)) accounted += n;
  EXPECT_EQ(accounted, records.size());
  EXPECT_EQ(Exclusions(records).at("no-present-value"), 1u);
}

TEST(Aggregate, IdenticalValuesKeepMeanInsideRange) {
  std::vector<MetricRecord> records;
  for (int i = 0; i < 3; ++i) records.push_back(Rec("complexity", 0.1));
  const AggregateRow row = Aggregate(records).begin()->second;
  EXPECT_EQ(row.mean, 0.1);
}

std::vector<MetricRecord> PointRecords(
    const std::vector<std::pair<std::string, double>>& points) {
  std::vector<MetricRecord> out;
  for (const auto& [ds, v] : points) out.push_back(Rec("complexity", v, "70-75", ds));
  return out;
}

TEST(Correlation, Examples) {
  const std::map<std::string, std::size_t> counts{{"a", 1}, {"b", 2}, {"c", 3}};
  auto rows = FeatureCountCorrelation(
      PointRecords({{"a", 1}, {"b", 2}, {"c", 3}}), counts);
  const auto complexity = std::find_if(rows.begin(), rows.end(), [](auto& r) {
    return r.metric == "complexity";
  });
  ASSERT_TRUE(complexity->r.has_value());
  EXPECT_NEAR(*complexity->r, 1.0, 1e-15);
  EXPECT_EQ(complexity->points.size(), 3u);

  rows = FeatureCountCorrelation(PointRecords({{"a", 2}, {"b", 1}, {"c", 3}}),
                                 counts);
  EXPECT_NEAR(*rows.back().r, 0.5, 1e-15);

  rows = FeatureCountCorrelation(PointRecords({{"a", 2}, {"b", 2}, {"c", 2}}),
                                 counts);
  EXPECT_FALSE(rows.back().r.has_value());
  EXPECT_EQ(rows.back().note, "zero-variance");
  // Metrics without values are reported, not dropped.
  EXPECT_EQ(rows.front().note, "fewer-than-3-datasets");

  EXPECT_THROW(FeatureCountCorrelation(PointRecords({{"a", 1}, {"b", 2}}), counts),
               InputError);
}

TEST(Correlation, UsesReportedOrientationAndDatasetMeans) {
  const std::map<std::string, std::size_t> counts{{"a", 1}, {"b", 2}, {"c", 3}};
  std::vector<MetricRecord> records;
  for (const auto& [ds, v] : std::vector<std::pair<std::string, double>>{
           {"a", 0.9}, {"a", 0.7}, {"b", 0.5}, {"c", 0.1}}) {
    records.push_back(Rec("faithfulness", v, std::nullopt, ds));
  }
  const auto rows = FeatureCountCorrelation(records, counts);
  EXPECT_EQ(rows.front().metric, "faithfulness");
  EXPECT_NEAR(rows.front().points[0].value, -0.8, 1e-15);
  EXPECT_GT(*rows.front().r, 0.9);
}

TEST(MetricRecordJson, RoundTripAndErrors) {
  const MetricRecord r = Rec("selectivity", 0.1 + 0.2, std::nullopt);
  const MetricRecord back = MetricRecordFromJson(json::parse(ToJson(r).dump()));
  EXPECT_EQ(back.value, r.value);
  EXPECT_FALSE(back.f1_bin.has_value());
  EXPECT_EQ(back.metric, "selectivity");
  const MetricRecord missing = Rec("selectivity", std::nullopt);
  EXPECT_EQ(MetricRecordFromJson(ToJson(missing)).reason, missing.reason);

  json bad = ToJson(r);
  bad["metric"] = "accuracy";
  EXPECT_THROW(MetricRecordFromJson(bad), InputError);
  bad = ToJson(r);
  bad.erase("value");
  EXPECT_THROW(MetricRecordFromJson(bad), InputError);
  bad = ToJson(r);
  bad["extra"] = 1;
  EXPECT_THROW(MetricRecordFromJson(bad), InputError);
}

TEST(ReportIo, FormatDoubleRoundTrips) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.Normal() * std::pow(10.0, rng.Uniform(-20, 20));
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
  EXPECT_EQ(FormatDouble(0.5), "0.5");
  EXPECT_EQ(FormatDouble(-0.0), "0");
  EXPECT_EQ(FormatDouble(55.0), "55");
}

TEST(ReportIo, RecordsRoundTripAndLineNumbers) {
  const std::vector<MetricRecord> records{Rec("complexity", 1.25),
                                          Rec("faithfulness", std::nullopt)};
  std::stringstream text;
  WriteRecords(records, text);
  const auto back = ReadRecords(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].value, 1.25);

  std::stringstream broken;
  WriteRecords(records, broken);
  broken << "\n{not json\n";
  try {
    ReadRecords(broken);
    FAIL() << "expected a parse error";
  } catch (const RecordParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ReportIo, AggregateCsvLayout) {
  std::ostringstream out;
  WriteAggregateCsv(Aggregate(std::vector<MetricRecord>{Rec("complexity", 0.5)}),
                    out);
  EXPECT_EQ(out.str(),
            "f1_bin,group,technique,metric,min,mean,max,count,missing_count,"
            "n_samples,n_model_dataset_pairs\n"
            "70-75,correct,lime,complexity,0.5,0.5,0.5,1,0,1,1\n");
  const json doc = AggregateToJson(Aggregate(std::vector<MetricRecord>{}));
  EXPECT_TRUE(doc["rows"].empty());
}

TEST(RunConfigJson, DefaultsAndStrictness) {
  const json minimal = json::parse(R"({
    "datasets": [{"path": "data/iris.csv", "target_name": "species"}]
  })");
  const RunConfig cfg = RunConfigFromJson(minimal);
  EXPECT_EQ(cfg.datasets[0].name, "iris");
  EXPECT_EQ(cfg.per_class, 5);
  EXPECT_EQ(cfg.n_samples, 200);
  EXPECT_EQ(cfg.bin_edges.size(), 11u);
  EXPECT_FALSE(cfg.seed.has_value());

  const RunConfig again = RunConfigFromJson(ToJson(cfg));
  EXPECT_EQ(ConfigHash(again), ConfigHash(cfg));

  json no_target = minimal;
  no_target["datasets"][0].erase("target_name");
  EXPECT_THROW(RunConfigFromJson(no_target), InputError);
  json unknown = minimal;
  unknown["per_clas"] = 3;
  EXPECT_THROW(RunConfigFromJson(unknown), InputError);
  json edges = minimal;
  edges["bin_edges"] = {0.5, 0.5, 1.0};
  EXPECT_THROW(RunConfigFromJson(edges), InputError);
  json zero = minimal;
  zero["per_class"] = 0;
  EXPECT_THROW(RunConfigFromJson(zero), InputError);
  json technique = minimal;
  technique["techniques"] = {"gradcam"};
  EXPECT_THROW(RunConfigFromJson(technique), InputError);
  json wrong_type = minimal;
  wrong_type["n_trials"] = "many";
  EXPECT_THROW(RunConfigFromJson(wrong_type), InputError);

  EXPECT_EQ(cfg.missing_markers, (std::vector<std::string>{"", "NA", "?"}));
  json markers = minimal;
  markers["missing_markers"] = {"-", "n/a"};
  const RunConfig custom = RunConfigFromJson(markers);
  EXPECT_EQ(custom.missing_markers, (std::vector<std::string>{"-", "n/a"}));
  EXPECT_EQ(RunConfigFromJson(ToJson(custom)).missing_markers,
            custom.missing_markers);
  EXPECT_NE(ConfigHash(custom), ConfigHash(cfg));
  markers["missing_markers"] = "-";
  EXPECT_THROW(RunConfigFromJson(markers), InputError);
  markers["missing_markers"] = {1};
  EXPECT_THROW(RunConfigFromJson(markers), InputError);
}

TEST(RunConfigJson, HashIgnoresParallelismOnly) {
  RunConfig a;
  a.datasets.push_back({"x", "x.csv", "y", std::nullopt});
  RunConfig b = a;
  b.parallelism = 4;
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.seed = 3;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
}

TEST(Synthetic, ShapeAndDeterminism) {
  SyntheticSpec spec;
  spec.n_rows = 50;
  spec.n_features = 3;
  spec.n_categorical = 2;
  spec.n_classes = 3;
  spec.seed = 8;
  const data::RawTable t = GenerateSynthetic(spec);
  EXPECT_EQ(t.n_rows, 50u);
  EXPECT_EQ(t.columns.size(), 6u);
  EXPECT_EQ(t.target_name, "target");
  EXPECT_NO_THROW(t.Validate());
  EXPECT_EQ(ToCsv(t), ToCsv(GenerateSynthetic(spec)));
  const data::ColumnSchema schema = data::InferSchema(t);
  EXPECT_EQ(schema.n_classes(), 3u);
  EXPECT_EQ(schema.columns[3].kind, data::ColumnKind::kCategorical);
  spec.n_informative = 5;
  EXPECT_THROW(GenerateSynthetic(spec), InputError);
}

RunConfig SmallConfig() {
  RunConfig cfg;
  cfg.seed = 5;
  cfg.n_trials = 1;
  cfg.n_samples = 40;
  cfg.sensitivity_samples = 10;
  cfg.n_perturb = 3;
  SyntheticSpec spec;
  spec.n_rows = 120;
  spec.n_features = 4;
  spec.label_noise = 0.15;
  spec.seed = 1;
  cfg.datasets.push_back({"tiny", "", "target", spec});
  return cfg;
}

TEST(RunBenchmark, RecordStructure) {
  const BenchmarkReport report = RunBenchmark(SmallConfig());
  ASSERT_TRUE(report.ok());
  const DatasetSummary& s = report.datasets[0];
  const std::size_t sampled = s.sampled_correct.size() + s.sampled_wrong.size();
  EXPECT_GT(sampled, 0u);
  EXPECT_LE(sampled, 20u);
  EXPECT_LE(report.records.size(), 900u);
  // Five metrics for every (model, technique, sample).
  EXPECT_EQ(report.records.size(), 3u * 3u * 5u * sampled);

  std::set<std::int64_t> correct(s.sampled_correct.begin(),
                                 s.sampled_correct.end());
  for (std::int64_t id : s.sampled_wrong) EXPECT_FALSE(correct.contains(id));

  // The same samples for every model and technique.
  std::map<std::pair<std::string, std::string>, std::set<std::int64_t>> seen;
  std::map<std::tuple<std::string, std::string, std::int64_t>, int> per_task;
  for (const MetricRecord& r : report.records) {
    seen[{r.model, r.technique}].insert(r.sample_id);
    ++per_task[{r.model, r.technique, r.sample_id}];
    EXPECT_EQ(r.f1_bin, AssignBin(r.f1, report.config.bin_edges));
    if (r.value && r.metric == "complexity") {
      EXPECT_LE(*r.value, std::log(4.0) + 1e-12);
    }
  }
  for (const auto& [key, ids] : seen) EXPECT_EQ(ids.size(), sampled);
  for (const auto& [key, n] : per_task) EXPECT_EQ(n, 5);

  const json manifest = Manifest(report);
  EXPECT_EQ(manifest["config_hash"], ConfigHash(report.config));
  EXPECT_EQ(manifest["datasets"][0]["n_features"], 4);
  EXPECT_TRUE(manifest["decisions"].contains("faithfulness_reporting"));
  EXPECT_EQ(FeatureCountsFromManifest(manifest).at("tiny"), 4u);
  // Below three datasets the correlation table says why r is missing.
  for (const auto& row : report.correlation) {
    EXPECT_EQ(row.note, "fewer-than-3-datasets");
  }
}

TEST(RunBenchmark, ParallelismDoesNotChangeRecords) {
  RunConfig cfg = SmallConfig();
  const BenchmarkReport a = RunBenchmark(cfg);
  cfg.parallelism = 3;
  const BenchmarkReport b = RunBenchmark(cfg);
  std::ostringstream ra, rb;
  WriteRecords(a.records, ra);
  WriteRecords(b.records, rb);
  EXPECT_EQ(ra.str(), rb.str());
}

TEST(RunBenchmark, DatasetFailuresAreIsolated) {
  RunConfig cfg = SmallConfig();
  cfg.datasets.insert(cfg.datasets.begin(),
                      {"missing", "/nonexistent/file.csv", "y", std::nullopt});
  const BenchmarkReport report = RunBenchmark(cfg);
  EXPECT_FALSE(report.ok());
  ASSERT_EQ(report.datasets.size(), 2u);
  EXPECT_TRUE(report.datasets[0].error.has_value());
  EXPECT_FALSE(report.datasets[1].error.has_value());
  EXPECT_GT(report.records.size(), 0u);
  for (const MetricRecord& r : report.records) EXPECT_EQ(r.dataset, "tiny");
}

}  // namespace
}  // namespace xaieval::bench
