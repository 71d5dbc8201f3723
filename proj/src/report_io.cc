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

#include "xaieval/report_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

namespace xaieval::bench {
namespace {

using nlohmann::json;

std::string Optional(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

// Quotes a CSV field when it holds a delimiter, quote or line break.
std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void WriteRecords(std::span<const MetricRecord> records, std::ostream& out) {
  for (const MetricRecord& r : records) out << ToJson(r).dump() << '\n';
}

std::vector<MetricRecord> ReadRecords(std::istream& in) {
  std::vector<MetricRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      records.push_back(MetricRecordFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw RecordParseError(number, e.what());
    } catch (const InputError& e) {
      throw RecordParseError(number, e.what());
    }
  }
  return records;
}

void WriteAggregateCsv(const AggregateTable& table, std::ostream& out) {
  out << "f1_bin,group,technique,metric,min,mean,max,count,missing_count,"
         "n_samples,n_model_dataset_pairs\n";
  for (const auto& [key, row] : table) {
    out << CsvField(key.bin) << ',' << CsvField(key.group) << ','
        << CsvField(key.technique) << ',' << CsvField(key.metric) << ','
        << FormatDouble(row.min) << ',' << FormatDouble(row.mean) << ','
        << FormatDouble(row.max) << ',' << row.count << ','
        << row.missing_count << ',' << row.n_samples << ','
        << row.n_model_dataset_pairs << '\n';
  }
}

json AggregateToJson(const AggregateTable& table) {
  json rows = json::array();
  for (const auto& [key, row] : table) {
    rows.push_back({{"f1_bin", key.bin},
                    {"group", key.group},
                    {"technique", key.technique},
                    {"metric", key.metric},
                    {"min", row.min},
                    {"mean", row.mean},
                    {"max", row.max},
                    {"count", row.count},
                    {"missing_count", row.missing_count},
                    {"n_samples", row.n_samples},
                    {"n_model_dataset_pairs", row.n_model_dataset_pairs}});
  }
  return {{"rows", std::move(rows)}};
}

void WriteCorrelationCsv(std::span<const CorrelationRow> rows,
                         std::ostream& out) {
  out << "metric,r,n_datasets,note\n";
  for (const CorrelationRow& row : rows) {
    out << CsvField(row.metric) << ',' << Optional(row.r) << ','
        << row.points.size() << ',' << CsvField(row.note) << '\n';
  }
}

void WritePointsCsv(std::span<const CorrelationRow> rows, std::ostream& out) {
  out << "metric,dataset,n_features,value\n";
  for (const CorrelationRow& row : rows) {
    for (const CorrelationPoint& p : row.points) {
      out << CsvField(row.metric) << ',' << CsvField(p.dataset) << ','
          << p.n_features << ',' << FormatDouble(p.value) << '\n';
    }
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

void WriteReport(const BenchmarkReport& report,
                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
  std::ostringstream records, aggregate, correlation;
  WriteRecords(report.records, records);
  WriteAggregateCsv(report.aggregate, aggregate);
  WriteCorrelationCsv(report.correlation, correlation);
  WriteFile(dir / kRecordsFile, records.str());
  WriteFile(dir / kAggregateFile, aggregate.str());
  WriteFile(dir / kCorrelationFile, correlation.str());
  WriteFile(dir / kManifestFile, Manifest(report).dump(2) + "\n");
}

}  // namespace xaieval::bench
