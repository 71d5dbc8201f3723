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

#include "xaieval/cli.h"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xaieval/bench.h"
#include "xaieval/data.h"
#include "xaieval/explain.h"
#include "xaieval/metrics.h"
#include "xaieval/random.h"
#include "xaieval/report_io.h"
#include "xaieval/tuning.h"

namespace xaieval::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// A failure that maps to a specific exit code.
struct Exit {
  int code;
  std::string message;
};

std::optional<std::uint64_t> SeedFromEnv() {
  const char* text = std::getenv(kSeedEnv);
  if (text == nullptr || *text == '\0') return std::nullopt;
  std::uint64_t seed = 0;
  std::istringstream in(text);
  if (!(in >> seed) || !in.eof()) {
    throw Exit{kExitUsage, std::string(kSeedEnv) + " is not an unsigned integer"};
  }
  return seed;
}

struct RunOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::optional<std::vector<std::string>> missing_markers;
  bool quiet = false;
};

int CmdRun(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    text = bench::ReadFile(opt.config);
  } catch (const InputError& e) {
    throw Exit{kExitUsage, std::string("config: ") + e.what()};
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Exit{kExitUsage, opt.config + ":" +
                               std::to_string(LineOfOffset(text, e.byte)) +
                               ": " + e.what()};
  }
  bench::RunConfig cfg;
  try {
    cfg = bench::RunConfigFromJson(doc);
    if (opt.seed) {
      cfg.seed = opt.seed;
    } else if (!cfg.seed) {
      cfg.seed = SeedFromEnv();
    }
    if (opt.parallelism) cfg.parallelism = *opt.parallelism;
    if (opt.missing_markers) cfg.missing_markers = *opt.missing_markers;
    cfg.Validate();
  } catch (const InputError& e) {
    throw Exit{kExitUsage, opt.config + ": " + e.what()};
  }

  const bench::BenchmarkReport report = bench::RunBenchmark(
      cfg, fs::path(opt.config).parent_path(), opt.quiet ? nullptr : &err);
  bench::WriteReport(report, opt.out);
  std::size_t failed = 0;
  for (const auto& s : report.datasets) {
    if (s.error) {
      ++failed;
      err << "dataset " << s.name << " failed: " << *s.error << '\n';
    }
  }
  out << report.records.size() << " records, " << report.aggregate.size()
      << " aggregate rows written to " << opt.out << '\n';
  return failed == 0 ? kExitOk : kExitFailure;
}

struct ExplainOptions {
  std::string data;
  std::string target;
  std::size_t index = 0;
  std::string model = "logistic";
  std::string technique = "kernel_shap";
  std::optional<std::uint64_t> seed;
  int trials = 0;
  double train_ratio = 0.8;
  int n_samples = 200;
  double kernel_width = 0.1;
  double ridge_lambda = 1.0;
  int n_perturb = 20;
  int sensitivity_samples = 0;
  std::vector<std::string> missing_markers = data::CsvOptions{}.missing_markers;
};

int CmdExplain(const ExplainOptions& opt, std::ostream& out) {
  const auto family = models::ParseFamily(opt.model);
  if (!family) throw Exit{kExitUsage, "unknown model '" + opt.model + "'"};
  const auto technique = explain::ParseTechnique(opt.technique);
  if (!technique) {
    throw Exit{kExitUsage, "unknown technique '" + opt.technique + "'"};
  }
  if (opt.n_samples < 2 || opt.n_perturb < 1 || opt.trials < 0 ||
      !(opt.train_ratio > 0.0 && opt.train_ratio < 1.0)) {
    throw Exit{kExitUsage, "invalid numeric option"};
  }
  const std::uint64_t seed = opt.seed ? *opt.seed : SeedFromEnv().value_or(0);
  const std::string name = fs::path(opt.data).stem().string();
  const std::uint64_t ds = Fnv1a64(name);

  data::CsvOptions csv;
  csv.missing_markers = opt.missing_markers;
  const data::RawTable table = data::LoadCsv(opt.data, opt.target, csv);
  if (opt.index >= table.n_rows) {
    throw Exit{kExitFailure, "sample index " + std::to_string(opt.index) +
                                 " out of range (" +
                                 std::to_string(table.n_rows) + " rows)"};
  }
  const data::ColumnSchema schema = data::InferSchema(table);
  const std::vector<int> labels = data::EncodeLabels(table, schema);
  const data::SplitIndices split = data::StratifiedSplit(
      labels, opt.train_ratio, DeriveSeed(seed, {ds, stage::kSplit}));
  const data::RawTable train_raw = table.SelectRows(split.train);
  const data::PreprocessorState state = data::FitPreprocessor(train_raw, schema);
  const data::FeatureMatrix train = data::Transform(state, train_raw);
  const std::size_t row[] = {opt.index};
  const data::FeatureMatrix sample = data::Transform(state, table.SelectRows(row));
  std::vector<int> y_train;
  for (const std::size_t i : split.train) y_train.push_back(labels[i]);

  const auto fam = static_cast<std::uint64_t>(*family);
  models::ModelParams params = models::DefaultParams(*family);
  if (opt.trials > 0) {
    params = models::Tune(*family, train.values, y_train, opt.trials,
                          DeriveSeed(seed, {ds, stage::kTuneTrial, fam}), 1,
                          schema.n_classes())
                 .best;
  }
  const auto model =
      models::TrainModel(params, train.values, y_train,
                         DeriveSeed(seed, {ds, stage::kFinalFit, fam}),
                         schema.n_classes());

  const auto tech = static_cast<std::uint64_t>(*technique);
  explain::ExplainConfig ecfg;
  ecfg.n_samples = opt.n_samples;
  ecfg.kernel_width = opt.kernel_width;
  ecfg.ridge_lambda = opt.ridge_lambda;
  ecfg.baseline = explain::MeanBaseline(train.values);
  ecfg.seed = DeriveSeed(seed, {ds, stage::kExplain, opt.index, tech});
  metrics::MetricConfig mcfg;
  mcfg.n_perturb = opt.n_perturb;
  mcfg.seed = DeriveSeed(seed, {ds, stage::kSensitivity, opt.index, tech});
  const Vector x = sample.values.row(0).transpose();
  const bench::SampleEvaluation eval = bench::EvaluateSample(
      *model, *technique, x, ecfg, mcfg,
      opt.sensitivity_samples > 0 ? opt.sensitivity_samples : opt.n_samples);

  const explain::Attribution& a = eval.attribution;
  json metric_values = json::object();
  json reasons = json::object();
  for (std::size_t m = 0; m < eval.metrics.size(); ++m) {
    const std::string key(metrics::MetricName(metrics::kAllMetrics[m]));
    const auto& v = eval.metrics[m];
    metric_values[key] = v.value ? json(*v.value) : json(nullptr);
    if (!v.value) reasons[key] = v.reason;
  }
  const Vector proba = model->PredictProbaRow(x);
  json doc = {
      {"dataset", name},
      {"row", opt.index},
      {"seed", seed},
      {"model", opt.model},
      {"params", models::ToJson(params)},
      {"technique", opt.technique},
      {"explained_class", a.explained_class},
      {"class_label", schema.class_labels[static_cast<std::size_t>(a.explained_class)]},
      {"true_label", schema.class_labels[static_cast<std::size_t>(labels[opt.index])]},
      {"probabilities", std::vector<double>(proba.begin(), proba.end())},
      {"feature_names", train.feature_names},
      {"values", std::vector<double>(a.values.begin(), a.values.end())},
      {"metrics", metric_values},
      {"flags", a.flags}};
  if (!reasons.empty()) doc["reasons"] = reasons;
  out << doc.dump(2) << '\n';
  return kExitOk;
}

std::vector<bench::MetricRecord> LoadRecords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kExitFailure, "cannot read " + path};
  try {
    return bench::ReadRecords(in);
  } catch (const bench::RecordParseError& e) {
    throw Exit{kExitFailure, path + ":" + std::to_string(e.line()) + ": " +
                                 e.what()};
  }
}

void Emit(const std::optional<std::string>& path, const std::string& text,
          std::ostream& out) {
  if (path) {
    bench::WriteFile(*path, text);
  } else {
    out << text;
  }
}

int CmdReport(const std::string& records_path, const std::string& format,
              const std::optional<std::string>& output, std::ostream& out) {
  const auto records = LoadRecords(records_path);
  const bench::AggregateTable table = bench::Aggregate(records);
  std::ostringstream text;
  if (format == "json") {
    text << bench::AggregateToJson(table).dump(2) << '\n';
  } else {
    bench::WriteAggregateCsv(table, text);
  }
  Emit(output, text.str(), out);
  return kExitOk;
}

int CmdCorrelate(const std::string& records_path,
                 const std::string& summary_path,
                 const std::optional<std::string>& points_path,
                 std::ostream& out) {
  const auto records = LoadRecords(records_path);
  std::map<std::string, std::size_t> counts;
  try {
    counts = bench::FeatureCountsFromManifest(
        json::parse(bench::ReadFile(summary_path)));
  } catch (const json::exception& e) {
    throw Exit{kExitFailure, summary_path + ": " + e.what()};
  } catch (const InputError& e) {
    throw Exit{kExitFailure, summary_path + ": " + e.what()};
  }
  std::vector<bench::CorrelationRow> rows;
  try {
    rows = bench::FeatureCountCorrelation(records, counts);
  } catch (const InputError& e) {
    throw Exit{kExitFailure, e.what()};
  }
  std::ostringstream table, points;
  bench::WriteCorrelationCsv(rows, table);
  bench::WritePointsCsv(rows, points);
  out << table.str();
  if (points_path) {
    bench::WriteFile(*points_path, points.str());
  } else {
    out << '\n' << points.str();
  }
  return kExitOk;
}

}  // namespace

std::size_t LineOfOffset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(),
                            text.begin() + static_cast<std::ptrdiff_t>(offset),
                            '\n'));
}

int RunMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Train tabular classifiers, explain them and score the "
               "explanations."};
  app.name("xaieval");
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a benchmark configuration");
  run_cmd->add_option("config", run.config, "JSON run configuration")
      ->required();
  run_cmd->add_option("-o,--out", run.out, "Output directory")->required();
  run_cmd->add_option("--seed", run.seed, "Master seed (overrides config)");
  run_cmd->add_option("--parallelism", run.parallelism, "Worker threads")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--missing-markers", run.missing_markers,
                      "Missing-value markers (replaces the configured list)");
  run_cmd->add_flag("-q,--quiet", run.quiet, "No progress lines");

  ExplainOptions ex;
  CLI::App* explain_cmd =
      app.add_subcommand("explain", "Explain one row of a CSV dataset");
  explain_cmd->add_option("data", ex.data, "CSV file")->required();
  explain_cmd->add_option("-t,--target", ex.target, "Target column")
      ->required();
  explain_cmd->add_option("-i,--index", ex.index, "0-based data row")
      ->required();
  explain_cmd->add_option("-m,--model", ex.model,
                          "logistic | forest | boosted")
      ->capture_default_str();
  explain_cmd->add_option("--technique", ex.technique,
                          "lime | kernel_shap | feature_ablation")
      ->capture_default_str();
  explain_cmd->add_option("--seed", ex.seed, "Master seed");
  explain_cmd->add_option("--trials", ex.trials,
                          "Random-search trials (0 = default parameters)")
      ->capture_default_str();
  explain_cmd->add_option("--train-ratio", ex.train_ratio)
      ->capture_default_str();
  explain_cmd->add_option("--n-samples", ex.n_samples,
                          "Explainer perturbations / coalitions")
      ->capture_default_str();
  explain_cmd->add_option("--kernel-width", ex.kernel_width)
      ->capture_default_str();
  explain_cmd->add_option("--ridge-lambda", ex.ridge_lambda)
      ->capture_default_str();
  explain_cmd->add_option("--n-perturb", ex.n_perturb,
                          "Sensitivity perturbations")
      ->capture_default_str();
  explain_cmd->add_option("--sensitivity-samples", ex.sensitivity_samples,
                          "Explainer samples inside sensitivity (0 = same)")
      ->capture_default_str();
  explain_cmd->add_option("--missing-markers", ex.missing_markers, "Missing-value markers");

  std::string records_path;
  std::string format = "csv";
  std::optional<std::string> report_out;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Recompute the aggregate table from records");
  report_cmd->add_option("records", records_path, "records.jsonl")->required();
  report_cmd->add_option("-f,--format", format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  report_cmd->add_option("-o,--out", report_out, "Output file (default stdout)");

  std::string summary_path;
  std::optional<std::string> points_path;
  CLI::App* correlate_cmd = app.add_subcommand(
      "correlate", "Correlate dataset feature counts with metric means");
  correlate_cmd->add_option("records", records_path, "records.jsonl")
      ->required();
  correlate_cmd->add_option("-s,--summary", summary_path, "manifest.json")
      ->required();
  correlate_cmd->add_option("-p,--points", points_path,
                            "Point-cloud CSV (default: after the table)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return CmdRun(run, out, err);
    if (*explain_cmd) return CmdExplain(ex, out);
    if (*report_cmd) return CmdReport(records_path, format, report_out, out);
    if (*correlate_cmd) {
      return CmdCorrelate(records_path, summary_path, points_path, out);
    }
  } catch (const Exit& e) {
    err << "xaieval: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "xaieval: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace xaieval::cli
