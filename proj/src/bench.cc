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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <utility>

#include "xaieval/parallel.h"
#include "xaieval/random.h"
#include "xaieval/report_io.h"
#include "xaieval/tuning.h"

namespace xaieval::bench {
namespace {

using nlohmann::json;

std::string Hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Reads an object field by field and rejects keys nobody asked for.
class StrictObject {
 public:
  StrictObject(const json& doc, std::string where)
      : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) throw InputError(where_ + ": expected an object");
  }

  const json* Find(const std::string& key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  void Int(const std::string& key, std::int64_t lo, auto& out) {
    if (const json* v = Find(key)) {
      if (!v->is_number_integer()) Fail(key, "expected an integer");
      const auto n = v->get<std::int64_t>();
      if (n < lo) Fail(key, "must be at least " + std::to_string(lo));
      out = static_cast<std::remove_reference_t<decltype(out)>>(n);
    }
  }

  void Real(const std::string& key, double& out) {
    if (const json* v = Find(key)) {
      if (!v->is_number()) Fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  void Bool(const std::string& key, bool& out) {
    if (const json* v = Find(key)) {
      if (!v->is_boolean()) Fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void String(const std::string& key, std::string& out) {
    if (const json* v = Find(key)) {
      if (!v->is_string()) Fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  template <typename T, typename ParseFn>
  void NameList(const std::string& key, std::vector<T>& out, ParseFn parse) {
    const json* v = Find(key);
    if (!v) return;
    if (!v->is_array()) Fail(key, "expected an array of names");
    out.clear();
    for (const json& item : *v) {
      if (!item.is_string()) Fail(key, "expected an array of names");
      const auto parsed = parse(item.get<std::string>());
      if (!parsed) Fail(key, "unknown name '" + item.get<std::string>() + "'");
      out.push_back(*parsed);
    }
  }

  [[noreturn]] void Fail(const std::string& key, const std::string& what) const {
    throw InputError(where_ + "." + key + ": " + what);
  }

  void Finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.contains(key)) {
        throw InputError(where_ + ": unknown field '" + key + "'");
      }
    }
  }

 private:
  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

SyntheticSpec SyntheticFromJson(const json& doc, const std::string& where) {
  SyntheticSpec spec;
  StrictObject obj(doc, where);
  obj.Int("n_rows", 0, spec.n_rows);
  obj.Int("n_features", 0, spec.n_features);
  obj.Int("n_informative", 0, spec.n_informative);
  obj.Int("n_categorical", 0, spec.n_categorical);
  obj.Int("n_classes", 0, spec.n_classes);
  obj.Real("separation", spec.separation);
  obj.Real("label_noise", spec.label_noise);
  obj.Int("seed", 0, spec.seed);
  obj.Finish();
  return spec;
}

json ToJson(const SyntheticSpec& s) {
  return {{"n_rows", s.n_rows},
          {"n_features", s.n_features},
          {"n_informative", s.n_informative},
          {"n_categorical", s.n_categorical},
          {"n_classes", s.n_classes},
          {"separation", s.separation},
          {"label_noise", s.label_noise},
          {"seed", s.seed}};
}

template <typename T, typename NameFn>
json Names(const std::vector<T>& items, NameFn name) {
  json out = json::array();
  for (const T& item : items) out.push_back(std::string(name(item)));
  return out;
}

template <typename T>
bool HasDuplicates(std::vector<T> items) {
  std::sort(items.begin(), items.end());
  return std::adjacent_find(items.begin(), items.end()) != items.end();
}

metrics::MetricValue Guarded(const auto& fn) {
  try {
    return fn();
  } catch (const std::exception&) {
    return metrics::MetricValue::Missing("evaluation-failed");
  }
}

// Explainer seed for a perturbed point: a function of the sample's seed and
// the point's exact coordinates, independent of evaluation order.
std::uint64_t PointSeed(std::uint64_t seed, const Vector& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    seed = DeriveSeed(seed, {std::bit_cast<std::uint64_t>(z[i])});
  }
  return seed;
}

}  // namespace

void SyntheticSpec::Validate() const {
  if (n_rows < 4) throw InputError("synthetic: n_rows must be at least 4");
  if (n_features + n_categorical == 0) {
    throw InputError("synthetic: at least one feature is required");
  }
  if (n_informative > n_features) {
    throw InputError("synthetic: n_informative exceeds n_features");
  }
  if (n_classes < 2) throw InputError("synthetic: n_classes must be at least 2");
  if (static_cast<std::size_t>(n_classes) * 2 > n_rows) {
    throw InputError("synthetic: too few rows for the class count");
  }
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw InputError("synthetic: separation must be finite and >= 0");
  }
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) {
    throw InputError("synthetic: label_noise must lie in [0, 1]");
  }
}

data::RawTable GenerateSynthetic(const SyntheticSpec& spec) {
  spec.Validate();
  Rng rng(spec.seed);
  const std::size_t informative =
      spec.n_informative == 0 ? spec.n_features : spec.n_informative;
  const auto k = static_cast<std::size_t>(spec.n_classes);
  std::vector<std::vector<double>> centres(k, std::vector<double>(informative));
  for (auto& centre : centres) {
    for (double& c : centre) c = spec.separation * rng.Normal();
  }

  data::RawTable table;
  table.target_name = std::string(kSyntheticTarget);
  table.n_rows = spec.n_rows;
  for (std::size_t j = 0; j < spec.n_features; ++j) {
    table.columns.push_back({"x" + std::to_string(j), {}});
  }
  for (std::size_t j = 0; j < spec.n_categorical; ++j) {
    table.columns.push_back({"c" + std::to_string(j), {}});
  }
  table.columns.push_back({std::string(kSyntheticTarget), {}});
  for (auto& column : table.columns) column.cells.reserve(spec.n_rows);

  for (std::size_t i = 0; i < spec.n_rows; ++i) {
    const std::size_t cls = i % k;
    for (std::size_t j = 0; j < spec.n_features; ++j) {
      const double centre = j < informative ? centres[cls][j] : 0.0;
      table.columns[j].cells.emplace_back(FormatDouble(centre + rng.Normal()));
    }
    for (std::size_t j = 0; j < spec.n_categorical; ++j) {
      const double z = rng.Normal();
      const char* level = z < -0.5 ? "a" : (z < 0.5 ? "b" : "c");
      table.columns[spec.n_features + j].cells.emplace_back(level);
    }
    std::size_t label = cls;
    if (spec.label_noise > 0.0 && rng.Uniform() < spec.label_noise) {
      label = static_cast<std::size_t>(rng.UniformInt(k));
    }
    table.columns.back().cells.emplace_back(std::to_string(label));
  }
  return table;
}

std::string ToCsv(const data::RawTable& table) {
  std::string out;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j > 0) out += ',';
    out += table.columns[j].name;
  }
  out += '\n';
  for (std::size_t i = 0; i < table.n_rows; ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      if (j > 0) out += ',';
      const data::Cell& cell = table.columns[j].cells[i];
      if (cell) out += *cell;
    }
    out += '\n';
  }
  return out;
}

void RunConfig::Validate() const {
  if (datasets.empty()) throw InputError("config: datasets must not be empty");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const DatasetSpec& ds = datasets[i];
    const std::string where = "config: datasets[" + std::to_string(i) + "]";
    if (ds.name.empty()) throw InputError(where + ": missing name");
    names.push_back(ds.name);
    if (ds.synthetic) {
      if (!ds.path.empty()) {
        throw InputError(where + ": set either path or synthetic, not both");
      }
      if (ds.target_name != kSyntheticTarget) {
        throw InputError(where + ": synthetic datasets use target_name '" +
                         std::string(kSyntheticTarget) + "'");
      }
      ds.synthetic->Validate();
    } else {
      if (ds.path.empty()) throw InputError(where + ": missing path");
      if (ds.target_name.empty()) {
        throw InputError(where + ": missing target_name");
      }
    }
  }
  if (HasDuplicates(names)) throw InputError("config: duplicate dataset name");
  if (per_class < 1) throw InputError("config: per_class must be at least 1");
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw InputError("config: train_ratio must lie in (0, 1)");
  }
  if (n_trials < 0) throw InputError("config: n_trials must be >= 0");
  if (models.empty() || HasDuplicates(models)) {
    throw InputError("config: models must be nonempty and distinct");
  }
  if (techniques.empty() || HasDuplicates(techniques)) {
    throw InputError("config: techniques must be nonempty and distinct");
  }
  if (n_samples < 2) throw InputError("config: n_samples must be at least 2");
  if (sensitivity_samples != 0 && sensitivity_samples < 2) {
    throw InputError("config: sensitivity_samples must be 0 or at least 2");
  }
  if (!(kernel_width > 0.0)) throw InputError("config: kernel_width must be > 0");
  if (!(ridge_lambda >= 0.0)) {
    throw InputError("config: ridge_lambda must be >= 0");
  }
  metrics::MetricConfig metric;
  metric.n_perturb = n_perturb;
  metric.lower_bound = perturb_lower;
  metric.upper_bound = perturb_upper;
  metric.Validate();
  if (bin_edges.size() < 2) {
    throw InputError("config: bin_edges needs at least two edges");
  }
  for (std::size_t i = 0; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i] >= 0.0 && bin_edges[i] <= 1.0)) {
      throw InputError("config: bin_edges must lie in [0, 1]");
    }
    if (i > 0 && !(bin_edges[i] > bin_edges[i - 1])) {
      throw InputError("config: bin_edges must be strictly increasing");
    }
  }
  if (parallelism < 1) throw InputError("config: parallelism must be >= 1");
}

RunConfig RunConfigFromJson(const json& doc) {
  RunConfig cfg;
  StrictObject root(doc, "config");
  if (const json* seed = root.Find("seed")) {
    if (!seed->is_number_unsigned()) {
      root.Fail("seed", "expected a non-negative integer");
    }
    cfg.seed = seed->get<std::uint64_t>();
  }
  const json* datasets = root.Find("datasets");
  if (!datasets) throw InputError("config: missing datasets");
  if (!datasets->is_array()) root.Fail("datasets", "expected an array");
  for (std::size_t i = 0; i < datasets->size(); ++i) {
    const std::string where = "config.datasets[" + std::to_string(i) + "]";
    StrictObject obj((*datasets)[i], where);
    DatasetSpec ds;
    obj.String("name", ds.name);
    obj.String("path", ds.path);
    obj.String("target_name", ds.target_name);
    if (const json* syn = obj.Find("synthetic")) {
      ds.synthetic = SyntheticFromJson(*syn, where + ".synthetic");
      if (ds.target_name.empty()) ds.target_name = std::string(kSyntheticTarget);
    }
    obj.Finish();
    if (ds.name.empty() && !ds.path.empty()) {
      ds.name = std::filesystem::path(ds.path).stem().string();
    }
    cfg.datasets.push_back(std::move(ds));
  }
  root.Int("per_class", 1, cfg.per_class);
  root.Real("train_ratio", cfg.train_ratio);
  root.Int("n_trials", 0, cfg.n_trials);
  root.NameList("models", cfg.models, models::ParseFamily);
  root.NameList("techniques", cfg.techniques, explain::ParseTechnique);
  if (const json* ex = root.Find("explainer")) {
    StrictObject obj(*ex, "config.explainer");
    obj.Int("n_samples", 2, cfg.n_samples);
    obj.Real("kernel_width", cfg.kernel_width);
    obj.Real("ridge_lambda", cfg.ridge_lambda);
    obj.Int("shap_enumeration_limit", 0, cfg.shap_enumeration_limit);
    obj.Finish();
  }
  if (const json* m = root.Find("metrics")) {
    StrictObject obj(*m, "config.metrics");
    obj.Int("n_perturb", 1, cfg.n_perturb);
    obj.Real("perturb_lower", cfg.perturb_lower);
    obj.Real("perturb_upper", cfg.perturb_upper);
    obj.Int("sensitivity_samples", 0, cfg.sensitivity_samples);
    obj.Finish();
  }
  if (const json* edges = root.Find("bin_edges")) {
    if (!edges->is_array()) root.Fail("bin_edges", "expected an array");
    cfg.bin_edges.clear();
    for (const json& e : *edges) {
      if (!e.is_number()) root.Fail("bin_edges", "expected numbers");
      cfg.bin_edges.push_back(e.get<double>());
    }
  }
  if (const json* markers = root.Find("missing_markers")) {
    if (!markers->is_array()) root.Fail("missing_markers", "expected strings");
    cfg.missing_markers.clear();
    for (const json& m : *markers) {
      if (!m.is_string()) root.Fail("missing_markers", "expected strings");
      cfg.missing_markers.push_back(m.get<std::string>());
    }
  }
  root.Int("parallelism", 1, cfg.parallelism);
  root.Bool("group_one_hot", cfg.group_one_hot);
  root.Finish();
  cfg.Validate();
  return cfg;
}

json ToJson(const RunConfig& cfg) {
  json datasets = json::array();
  for (const DatasetSpec& ds : cfg.datasets) {
    json d = {{"name", ds.name}, {"target_name", ds.target_name}};
    if (ds.synthetic) {
      d["synthetic"] = ToJson(*ds.synthetic);
    } else {
      d["path"] = ds.path;
    }
    datasets.push_back(std::move(d));
  }
  json doc = {
      {"datasets", std::move(datasets)},
      {"per_class", cfg.per_class},
      {"train_ratio", cfg.train_ratio},
      {"n_trials", cfg.n_trials},
      {"models", Names(cfg.models, models::FamilyName)},
      {"techniques", Names(cfg.techniques, explain::TechniqueName)},
      {"explainer",
       {{"n_samples", cfg.n_samples},
        {"kernel_width", cfg.kernel_width},
        {"ridge_lambda", cfg.ridge_lambda},
        {"shap_enumeration_limit", cfg.shap_enumeration_limit}}},
      {"metrics",
       {{"n_perturb", cfg.n_perturb},
        {"perturb_lower", cfg.perturb_lower},
        {"perturb_upper", cfg.perturb_upper},
        {"sensitivity_samples", cfg.sensitivity_samples}}},
      {"bin_edges", cfg.bin_edges},
      {"missing_markers", cfg.missing_markers},
      {"parallelism", cfg.parallelism},
      {"group_one_hot", cfg.group_one_hot}};
  if (cfg.seed) doc["seed"] = *cfg.seed;
  return doc;
}

std::string ConfigHash(const RunConfig& config) {
  json doc = ToJson(config);
  // Worker count never changes results, so it does not change the hash.
  doc.erase("parallelism");
  return Hex64(Fnv1a64(doc.dump()));
}

ConsensusGroups FormConsensusGroups(
    std::span<const std::vector<int>> predictions, std::span<const int> y_true) {
  if (predictions.empty()) throw InputError("consensus: no models");
  for (const auto& p : predictions) {
    if (p.size() != y_true.size()) {
      throw InputError("consensus: prediction length differs from labels");
    }
  }
  ConsensusGroups groups;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    std::size_t hits = 0;
    for (const auto& p : predictions) hits += p[i] == y_true[i] ? 1 : 0;
    if (hits == predictions.size()) groups.correct.push_back(i);
    if (hits == 0) groups.wrong.push_back(i);
  }
  return groups;
}

std::vector<std::size_t> SamplePerClass(std::span<const std::size_t> group,
                                        std::span<const int> labels, int k,
                                        std::uint64_t seed) {
  if (k < 1) throw InputError("sample_per_class: k must be at least 1");
  std::map<int, std::vector<std::size_t>> by_class;
  for (const std::size_t i : group) {
    if (i >= labels.size()) throw InputError("sample_per_class: index out of range");
    by_class[labels[i]].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> out;
  for (auto& [label, members] : by_class) {
    rng.Shuffle(members);
    const std::size_t take = std::min(members.size(), static_cast<std::size_t>(k));
    out.insert(out.end(), members.begin(),
               members.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

std::string BinLabel(double lower, double upper) {
  const auto percent = [](double v) {
    return FormatDouble(std::round(v * 1e8) / 1e6);
  };
  return percent(lower) + "-" + percent(upper);
}

std::optional<std::string> AssignBin(double f1, std::span<const double> edges) {
  if (edges.size() < 2 || std::isnan(f1)) return std::nullopt;
  if (f1 < edges.front() || f1 > edges.back()) return std::nullopt;
  const auto it = std::upper_bound(edges.begin(), edges.end(), f1);
  std::size_t upper = static_cast<std::size_t>(it - edges.begin());
  if (upper == edges.size()) upper = edges.size() - 1;  // closed last bin
  return BinLabel(edges[upper - 1], edges[upper]);
}

json ToJson(const MetricRecord& r) {
  json doc = {{"dataset", r.dataset},
              {"model", r.model},
              {"f1", r.f1},
              {"f1_bin", r.f1_bin ? json(*r.f1_bin) : json(nullptr)},
              {"group", r.group},
              {"technique", r.technique},
              {"metric", r.metric},
              {"sample_id", r.sample_id},
              {"n_features", r.n_features},
              {"value", r.value ? json(*r.value) : json(nullptr)}};
  if (!r.reason.empty()) doc["reason"] = r.reason;
  return doc;
}

MetricRecord MetricRecordFromJson(const json& doc) {
  MetricRecord r;
  StrictObject obj(doc, "record");
  obj.String("dataset", r.dataset);
  obj.String("model", r.model);
  obj.Real("f1", r.f1);
  if (const json* bin = obj.Find("f1_bin"); bin && !bin->is_null()) {
    if (!bin->is_string()) obj.Fail("f1_bin", "expected a string or null");
    r.f1_bin = bin->get<std::string>();
  }
  obj.String("group", r.group);
  obj.String("technique", r.technique);
  obj.String("metric", r.metric);
  obj.Int("sample_id", -1, r.sample_id);
  obj.Int("n_features", 0, r.n_features);
  const json* value = obj.Find("value");
  if (!value) obj.Fail("value", "missing");
  if (!value->is_null()) {
    if (!value->is_number()) obj.Fail("value", "expected a number or null");
    r.value = value->get<double>();
  }
  obj.String("reason", r.reason);
  obj.Finish();
  if (r.dataset.empty() || r.model.empty() || r.technique.empty() ||
      r.metric.empty() || r.group.empty()) {
    throw InputError("record: dataset, model, group, technique and metric "
                     "are required");
  }
  if (!metrics::ParseMetric(r.metric)) {
    throw InputError("record: unknown metric '" + r.metric + "'");
  }
  return r;
}

double ReportedValue(std::string_view metric, double raw) {
  return metric == metrics::MetricName(metrics::Metric::kFaithfulness) ? -raw
                                                                       : raw;
}

AggregateTable Aggregate(std::span<const MetricRecord> records) {
  struct Acc {
    AggregateRow row;
    double sum = 0.0;
    std::set<std::pair<std::string, std::int64_t>> samples;
    std::set<std::pair<std::string, std::string>> pairs;
  };
  std::map<BinKey, Acc> acc;
  for (const MetricRecord& r : records) {
    if (!r.f1_bin) continue;
    Acc& a = acc[{*r.f1_bin, r.group, r.technique, r.metric}];
    if (!r.value) {
      ++a.row.missing_count;
      continue;
    }
    const double v = ReportedValue(r.metric, *r.value);
    if (a.row.count == 0) {
      a.row.min = a.row.max = v;
    } else {
      a.row.min = std::min(a.row.min, v);
      a.row.max = std::max(a.row.max, v);
    }
    a.sum += v;
    ++a.row.count;
    a.samples.emplace(r.dataset, r.sample_id);
    a.pairs.emplace(r.dataset, r.model);
  }
  AggregateTable table;
  for (auto& [key, a] : acc) {
    if (a.row.count == 0) continue;
    // Rounding in the sum can push the mean a hair past the extremes.
    a.row.mean = std::clamp(a.sum / static_cast<double>(a.row.count),
                            a.row.min, a.row.max);
    a.row.n_samples = a.samples.size();
    a.row.n_model_dataset_pairs = a.pairs.size();
    table.emplace(key, a.row);
  }
  return table;
}

std::map<std::string, std::size_t> Exclusions(
    std::span<const MetricRecord> records) {
  std::map<std::string, std::size_t> out;
  std::map<BinKey, std::pair<std::size_t, std::size_t>> keys;  // present, missing
  for (const MetricRecord& r : records) {
    if (!r.f1_bin) {
      ++out["f1-outside-bins"];
      continue;
    }
    auto& k = keys[{*r.f1_bin, r.group, r.technique, r.metric}];
    ++(r.value ? k.first : k.second);
  }
  for (const auto& [key, counts] : keys) {
    if (counts.first == 0) out["no-present-value"] += counts.second;
  }
  return out;
}

std::vector<CorrelationRow> FeatureCountCorrelation(
    std::span<const MetricRecord> records,
    const std::map<std::string, std::size_t>& feature_counts) {
  // metric -> dataset -> (sum, count), accumulated in record order.
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>>
      sums;
  std::set<std::string> datasets;
  for (const MetricRecord& r : records) {
    if (!feature_counts.contains(r.dataset)) continue;
    datasets.insert(r.dataset);
    if (!r.value) continue;
    auto& s = sums[r.metric][r.dataset];
    s.first += ReportedValue(r.metric, *r.value);
    ++s.second;
  }
  if (datasets.size() < 3) {
    throw InputError("correlation needs at least 3 datasets, got " +
                     std::to_string(datasets.size()));
  }
  std::vector<CorrelationRow> rows;
  for (const metrics::Metric m : metrics::kAllMetrics) {
    CorrelationRow row;
    row.metric = std::string(metrics::MetricName(m));
    for (const auto& [dataset, s] : sums[row.metric]) {
      row.points.push_back({dataset, feature_counts.at(dataset),
                            s.first / static_cast<double>(s.second)});
    }
    std::stable_sort(row.points.begin(), row.points.end(),
                     [](const CorrelationPoint& a, const CorrelationPoint& b) {
                       return a.n_features < b.n_features;
                     });
    std::vector<double> xs, ys;
    for (const auto& p : row.points) {
      xs.push_back(static_cast<double>(p.n_features));
      ys.push_back(p.value);
    }
    if (row.points.size() < 3) {
      row.note = "fewer-than-3-datasets";
    } else {
      row.r = metrics::PearsonCorrelation(xs, ys);
      if (!row.r) row.note = "zero-variance";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

SampleEvaluation EvaluateSample(const models::Predictor& model,
                                explain::Technique technique, const Vector& x,
                                const explain::ExplainConfig& ecfg,
                                const metrics::MetricConfig& mcfg,
                                int inner_samples) {
  SampleEvaluation out;
  out.attribution = explain::Explain(technique, model, x, ecfg);
  const explain::Attribution& a = out.attribution;
  const explain::ScoreFn f = explain::ClassScore(model, a.explained_class);
  out.metrics.push_back(Guarded([&] {
    return metrics::FaithfulnessEstimate(f, x, a.values, ecfg.baseline);
  }));
  out.metrics.push_back(Guarded([&] {
    return metrics::MetricValue::Of(
        metrics::Selectivity(f, x, a.values, ecfg.baseline));
  }));
  explain::ExplainConfig inner = ecfg;
  inner.n_samples = inner_samples;
  inner.target_class = a.explained_class;
  const metrics::SensitivityResult s = metrics::Sensitivity(
      [&](const Vector& z) {
        explain::ExplainConfig point = inner;
        point.seed = PointSeed(ecfg.seed, z);
        return explain::Explain(technique, model, z, point).values;
      },
      x, mcfg);
  out.metrics.push_back(s.average);
  out.metrics.push_back(s.maximum);
  out.metrics.push_back(metrics::Complexity(a.values));
  return out;
}

json ToJson(const DatasetSummary& s) {
  json models = json::array();
  for (const ModelSummary& m : s.models) {
    models.push_back({{"model", m.model},
                      {"params", m.params},
                      {"scores", models::ToJson(m.scores)},
                      {"f1_bin", m.f1_bin ? json(*m.f1_bin) : json(nullptr)}});
  }
  json doc = {{"name", s.name},
              {"checksum", s.checksum},
              {"n_rows", s.n_rows},
              {"n_features", s.n_features},
              {"n_classes", s.n_classes},
              {"n_train", s.n_train},
              {"n_test", s.n_test},
              {"models", std::move(models)},
              {"n_correct", s.n_correct},
              {"n_wrong", s.n_wrong},
              {"sampled_correct", s.sampled_correct},
              {"sampled_wrong", s.sampled_wrong},
              {"n_records", s.n_records},
              {"warnings", s.warnings}};
  doc["error"] = s.error ? json(*s.error) : json(nullptr);
  return doc;
}

bool BenchmarkReport::ok() const {
  return std::none_of(datasets.begin(), datasets.end(),
                      [](const DatasetSummary& s) { return s.error.has_value(); });
}

namespace {

struct DatasetOutcome {
  DatasetSummary summary;
  std::vector<MetricRecord> records;
};

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  void operator()(const std::string& line) {
    if (!out_) return;
    std::lock_guard lock(mu_);
    *out_ << line << '\n';
  }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

MetricRecord BaseRecord(const DatasetSummary& summary, const ModelSummary& model,
                        std::string_view group, explain::Technique technique,
                        std::int64_t sample_id) {
  MetricRecord r;
  r.dataset = summary.name;
  r.model = model.model;
  r.f1 = model.scores.f1;
  r.f1_bin = model.f1_bin;
  r.group = std::string(group);
  r.technique = std::string(explain::TechniqueName(technique));
  r.sample_id = sample_id;
  r.n_features = summary.n_features;
  return r;
}

// Scores one (model, technique, sample) task; always five records.
std::vector<MetricRecord> ScoreSample(const RunConfig& cfg,
                                      const models::Predictor& model,
                                      explain::Technique technique,
                                      const Vector& x,
                                      const explain::ExplainConfig& ecfg,
                                      std::uint64_t sensitivity_seed,
                                      const MetricRecord& base) {
  metrics::MetricConfig mcfg;
  mcfg.n_perturb = cfg.n_perturb;
  mcfg.lower_bound = cfg.perturb_lower;
  mcfg.upper_bound = cfg.perturb_upper;
  mcfg.seed = sensitivity_seed;
  std::vector<metrics::MetricValue> values;
  try {
    values = EvaluateSample(model, technique, x, ecfg, mcfg,
                            cfg.inner_samples())
                 .metrics;
  } catch (const std::exception&) {
    values.assign(
        std::size(metrics::kAllMetrics),
        metrics::MetricValue::Missing(std::string(metrics::kExplainerFailed)));
  }
  std::vector<MetricRecord> out;
  for (std::size_t m = 0; m < values.size(); ++m) {
    MetricRecord r = base;
    r.metric = std::string(metrics::MetricName(metrics::kAllMetrics[m]));
    r.value = values[m].value;
    r.reason = values[m].reason;
    out.push_back(std::move(r));
  }
  return out;
}

DatasetOutcome RunDataset(const RunConfig& cfg, const DatasetSpec& spec,
                          const std::filesystem::path& base_dir, Logger& log) {
  DatasetOutcome out;
  DatasetSummary& summary = out.summary;
  summary.name = spec.name;
  const std::uint64_t master = cfg.master_seed();
  const std::uint64_t ds = Fnv1a64(spec.name);

  data::RawTable table;
  if (spec.synthetic) {
    table = GenerateSynthetic(*spec.synthetic);
    summary.checksum = Hex64(Fnv1a64(ToCsv(table)));
  } else {
    std::filesystem::path path = spec.path;
    if (path.is_relative()) path = base_dir / path;
    const std::string text = ReadFile(path);
    summary.checksum = Hex64(Fnv1a64(text));
    data::CsvOptions options;
    options.missing_markers = cfg.missing_markers;
    table = data::ParseCsv(text, spec.target_name, options);
  }
  const data::ColumnSchema schema = data::InferSchema(table);
  const std::vector<int> labels = data::EncodeLabels(table, schema);
  summary.n_rows = table.n_rows;
  summary.n_classes = schema.n_classes();

  const data::SplitIndices split = data::StratifiedSplit(
      labels, cfg.train_ratio, DeriveSeed(master, {ds, stage::kSplit}));
  summary.warnings = split.warnings;
  const data::RawTable train_raw = table.SelectRows(split.train);
  const data::PreprocessorState state = data::FitPreprocessor(train_raw, schema);
  const data::FeatureMatrix train = data::Transform(state, train_raw);
  const data::FeatureMatrix test =
      data::Transform(state, table.SelectRows(split.test));
  for (const auto& w : test.warnings) summary.warnings.push_back(w);
  std::vector<int> y_train, y_test;
  for (const std::size_t i : split.train) y_train.push_back(labels[i]);
  for (const std::size_t i : split.test) y_test.push_back(labels[i]);
  summary.n_features = train.n_features();
  summary.n_train = split.train.size();
  summary.n_test = split.test.size();
  log("dataset " + spec.name + ": " + std::to_string(summary.n_rows) +
      " rows, " + std::to_string(summary.n_features) + " features, " +
      std::to_string(summary.n_classes) + " classes");

  std::vector<std::unique_ptr<models::Predictor>> trained;
  std::vector<std::vector<int>> predictions;
  for (const models::Family family : cfg.models) {
    const auto fam = static_cast<std::uint64_t>(family);
    models::ModelParams params = models::DefaultParams(family);
    if (cfg.n_trials > 0) {
      params = models::Tune(family, train.values, y_train, cfg.n_trials,
                            DeriveSeed(master, {ds, stage::kTuneTrial, fam}),
                            cfg.parallelism, schema.n_classes())
                   .best;
    }
    trained.push_back(models::TrainModel(
        params, train.values, y_train,
        DeriveSeed(master, {ds, stage::kFinalFit, fam}), schema.n_classes()));
    predictions.push_back(trained.back()->PredictClasses(test.values));
    ModelSummary m;
    m.model = std::string(models::FamilyName(family));
    m.params = models::ToJson(params);
    m.scores = models::ComputeScores(y_test, predictions.back());
    m.f1_bin = AssignBin(m.scores.f1, cfg.bin_edges);
    log("  " + m.model + ": macro F1 " + FormatDouble(m.scores.f1) + ", bin " +
        m.f1_bin.value_or("none"));
    summary.models.push_back(std::move(m));
  }

  const ConsensusGroups groups = FormConsensusGroups(predictions, y_test);
  summary.n_correct = groups.correct.size();
  summary.n_wrong = groups.wrong.size();
  const std::vector<std::size_t> picked[2] = {
      SamplePerClass(groups.correct, y_test, cfg.per_class,
                     DeriveSeed(master, {ds, stage::kSampling, 0})),
      SamplePerClass(groups.wrong, y_test, cfg.per_class,
                     DeriveSeed(master, {ds, stage::kSampling, 1}))};
  for (const std::size_t i : picked[0]) {
    summary.sampled_correct.push_back(static_cast<std::int64_t>(split.test[i]));
  }
  for (const std::size_t i : picked[1]) {
    summary.sampled_wrong.push_back(static_cast<std::int64_t>(split.test[i]));
  }

  explain::ExplainConfig base_cfg;
  base_cfg.n_samples = cfg.n_samples;
  base_cfg.kernel_width = cfg.kernel_width;
  base_cfg.ridge_lambda = cfg.ridge_lambda;
  base_cfg.shap_enumeration_limit = cfg.shap_enumeration_limit;
  base_cfg.baseline = explain::MeanBaseline(train.values);
  if (cfg.group_one_hot) {
    base_cfg.ablation_groups.assign(train.source_column.begin(),
                                    train.source_column.end());
  }

  struct Task {
    std::size_t model;
    explain::Technique technique;
    std::size_t group;
    std::size_t position;  // row of the test partition
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < trained.size(); ++m) {
    for (const explain::Technique t : cfg.techniques) {
      for (std::size_t g = 0; g < 2; ++g) {
        for (const std::size_t pos : picked[g]) tasks.push_back({m, t, g, pos});
      }
    }
  }
  std::vector<std::vector<MetricRecord>> results(tasks.size());
  ParallelFor(tasks.size(), cfg.parallelism, [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto sample_id = static_cast<std::int64_t>(split.test[task.position]);
    const auto tech = static_cast<std::uint64_t>(task.technique);
    const auto sid = static_cast<std::uint64_t>(sample_id);
    explain::ExplainConfig ecfg = base_cfg;
    ecfg.seed = DeriveSeed(master, {ds, stage::kExplain, sid, tech});
    const MetricRecord base = BaseRecord(
        summary, summary.models[task.model],
        task.group == 0 ? kCorrectGroup : kWrongGroup, task.technique, sample_id);
    results[i] = ScoreSample(
        cfg, *trained[task.model], task.technique,
        test.values.row(static_cast<Eigen::Index>(task.position)).transpose(),
        ecfg, DeriveSeed(master, {ds, stage::kSensitivity, sid, tech}), base);
  });
  for (auto& r : results) {
    for (auto& rec : r) out.records.push_back(std::move(rec));
  }
  summary.n_records = out.records.size();
  log("  " + std::to_string(summary.n_correct) + " consensus-correct, " +
      std::to_string(summary.n_wrong) + " consensus-wrong, " +
      std::to_string(picked[0].size() + picked[1].size()) + " sampled, " +
      std::to_string(summary.n_records) + " records");
  return out;
}

}  // namespace

BenchmarkReport RunBenchmark(const RunConfig& config,
                             const std::filesystem::path& base_dir,
                             std::ostream* log_stream) {
  config.Validate();
  BenchmarkReport report;
  report.config = config;
  Logger log(log_stream);
  for (const DatasetSpec& spec : config.datasets) {
    DatasetOutcome outcome;
    try {
      outcome = RunDataset(config, spec, base_dir, log);
    } catch (const std::exception& e) {
      outcome = {};
      outcome.summary.name = spec.name;
      outcome.summary.error = e.what();
      log("dataset " + spec.name + " failed: " + e.what());
    }
    for (auto& r : outcome.records) report.records.push_back(std::move(r));
    report.datasets.push_back(std::move(outcome.summary));
  }
  report.aggregate = Aggregate(report.records);

  std::map<std::string, std::size_t> counts;
  for (const DatasetSummary& s : report.datasets) {
    if (!s.error) counts[s.name] = s.n_features;
  }
  try {
    report.correlation = FeatureCountCorrelation(report.records, counts);
  } catch (const InputError&) {
    for (const metrics::Metric m : metrics::kAllMetrics) {
      report.correlation.push_back(
          {std::string(metrics::MetricName(m)), std::nullopt,
           "fewer-than-3-datasets", {}});
    }
  }
  return report;
}

json DecisionFlags() {
  return {
      {"normalization", "z-score (population sd, floor 1e-12)"},
      {"tuning", "seeded random search, stratified 80/20 validation split"},
      {"f1", "macro average over classes present in truth or prediction"},
      {"lime_weights", "exp kernel rescaled to max 1"},
      {"lime_regression", "raw perturbed coordinates, unpenalized intercept"},
      {"kernel_shap_sampling", "kernel-mass sizes, paired complements"},
      {"faithfulness", "pearson vs single-feature baseline replacement"},
      {"selectivity", "mean of decay curve s_0..s_d, signed ranking"},
      {"sensitivity",
       "signed uniform noise, relative L2 norm, absolute below 1e-12"},
      {"sensitivity_explainer",
       "fixed explained class; explainer seed derived from each point"},
      {"lime_kernel", "exp(-|z - x|^2 / (2 w^2))"},
      {"faithfulness_reporting", "negated in aggregates, raw in records"},
      {"binning", "per-model macro F1, half-open bins, last bin closed"},
      {"counts", "records, distinct samples, model-dataset pairs"},
      {"correlation", "dataset mean of reported values vs encoded d"}};
}

json Manifest(const BenchmarkReport& report) {
  json datasets = json::array();
  for (const DatasetSummary& s : report.datasets) datasets.push_back(ToJson(s));
  json exclusions = json::object();
  for (const auto& [reason, n] : Exclusions(report.records)) {
    exclusions[reason] = n;
  }
  return {{"format", "xaieval-manifest"},
          {"version", 1},
          {"seed", report.config.master_seed()},
          {"config_hash", ConfigHash(report.config)},
          {"config", ToJson(report.config)},
          {"decisions", DecisionFlags()},
          {"datasets", std::move(datasets)},
          {"n_records", report.records.size()},
          {"n_aggregate_rows", report.aggregate.size()},
          {"exclusions", std::move(exclusions)},
          {"ok", report.ok()}};
}

std::map<std::string, std::size_t> FeatureCountsFromManifest(const json& doc) {
  const auto it = doc.find("datasets");
  if (!doc.is_object() || it == doc.end() || !it->is_array()) {
    throw InputError("summary: expected an object with a datasets array");
  }
  std::map<std::string, std::size_t> out;
  for (const json& d : *it) {
    if (!d.is_object() || !d.contains("name") || !d["name"].is_string() ||
        !d.contains("n_features") || !d["n_features"].is_number_unsigned()) {
      throw InputError("summary: dataset entries need name and n_features");
    }
    if (d.contains("error") && !d["error"].is_null()) continue;
    out[d["name"].get<std::string>()] = d["n_features"].get<std::size_t>();
  }
  return out;
}

}  // namespace xaieval::bench
