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

#ifndef XAIEVAL_REPORT_IO_H_
#define XAIEVAL_REPORT_IO_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "xaieval/bench.h"
#include "xaieval/common.h"

namespace xaieval::bench {

// A malformed line in a records file; line numbers start at 1.
class RecordParseError : public InputError {
 public:
  RecordParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Shortest text that reads back to the same double.
std::string FormatDouble(double value);

void WriteRecords(std::span<const MetricRecord> records, std::ostream& out);
// Blank lines are skipped.
std::vector<MetricRecord> ReadRecords(std::istream& in);

void WriteAggregateCsv(const AggregateTable& table, std::ostream& out);
nlohmann::json AggregateToJson(const AggregateTable& table);

void WriteCorrelationCsv(std::span<const CorrelationRow> rows,
                         std::ostream& out);
// One line per (metric, dataset) point.
void WritePointsCsv(std::span<const CorrelationRow> rows, std::ostream& out);

inline constexpr std::string_view kRecordsFile = "records.jsonl";
inline constexpr std::string_view kAggregateFile = "aggregate.csv";
inline constexpr std::string_view kCorrelationFile = "correlation.csv";
inline constexpr std::string_view kManifestFile = "manifest.json";

// Writes the four report files into `dir`, creating it when needed.
void WriteReport(const BenchmarkReport& report,
                 const std::filesystem::path& dir);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view text);

}  // namespace xaieval::bench

#endif  // XAIEVAL_REPORT_IO_H_
