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

#ifndef XAIEVAL_DATA_H_
#define XAIEVAL_DATA_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xaieval/common.h"

namespace xaieval::data {

// A missing cell is std::nullopt.
using Cell = std::optional<std::string>;

struct RawColumn {
  std::string name;
  std::vector<Cell> cells;
};

// Cells exactly as read from disk, before any typing.
struct RawTable {
  std::vector<RawColumn> columns;
  std::string target_name;
  std::size_t n_rows = 0;

  std::optional<std::size_t> FindColumn(std::string_view name) const;
  const RawColumn& Target() const;
  RawTable SelectRows(std::span<const std::size_t> rows) const;
  // Throws InputError when an invariant is broken.
  void Validate() const;
};

struct CsvOptions {
  std::vector<std::string> missing_markers = {"", "NA", "?"};
};

RawTable ParseCsv(std::string_view text, const std::string& target_name,
                  const CsvOptions& options = {});
RawTable LoadCsv(const std::string& path, const std::string& target_name,
                 const CsvOptions& options = {});

enum class ColumnKind { kNumeric, kCategorical, kTarget };

std::string_view ColumnKindName(ColumnKind kind);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Sorted distinct observed values; empty for numeric columns.
  std::vector<std::string> vocabulary;
};

struct ColumnSchema {
  std::vector<ColumnSpec> columns;
  std::size_t target_index = 0;
  // Class label strings; the class index of a label is its position here.
  std::vector<std::string> class_labels;

  std::size_t n_classes() const { return class_labels.size(); }
};

// Numeric iff every non-missing cell parses as a finite real.
ColumnSchema InferSchema(const RawTable& table);

// Maps target cells to class indices. Throws on labels absent from the schema.
std::vector<int> EncodeLabels(const RawTable& table, const ColumnSchema& schema);

// Parses a cell as a finite real, tolerating surrounding blanks.
std::optional<double> ParseReal(std::string_view cell);

struct ColumnState {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Numeric columns.
  double mean = 0.0;
  double stddev = 1.0;
  double median = 0.0;
  // Categorical columns. Vocabulary is sorted; its order is the one-hot order.
  std::vector<std::string> vocabulary;
  std::string mode;
};

inline constexpr double kMinStddev = 1e-12;

// Statistics fitted on training rows; feature columns only, in table order.
struct PreprocessorState {
  std::vector<ColumnState> columns;

  std::size_t n_features() const;
};

PreprocessorState FitPreprocessor(const RawTable& train_rows,
                                  const ColumnSchema& schema);

struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> feature_names;
  // Index into PreprocessorState::columns for every encoded feature.
  std::vector<std::size_t> source_column;
  // Unseen categories and similar non-fatal events.
  std::vector<std::string> warnings;

  std::size_t n_rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t n_features() const {
    return static_cast<std::size_t>(values.cols());
  }
};

// z-scores numeric columns and one-hot encodes categorical ones, imputing
// missing cells with the training median / mode first. Unseen categories
// produce an all-zero group.
FeatureMatrix Transform(const PreprocessorState& state, const RawTable& rows);

nlohmann::json ToJson(const PreprocessorState& state);
PreprocessorState PreprocessorStateFromJson(const nlohmann::json& doc);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// Per class c with n_c members the train side receives round(ratio * n_c)
// members (half rounds up), clamped to [1, n_c - 1]. Singleton classes go to
// train with a warning. Both index lists are returned in ascending order.
SplitIndices StratifiedSplit(std::span<const int> labels, double ratio,
                             std::uint64_t seed);

}  // namespace xaieval::data

#endif  // XAIEVAL_DATA_H_
