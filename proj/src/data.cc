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

#include "xaieval/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "xaieval/random.h"

namespace xaieval::data {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Splits CSV text into records. Quoted fields may contain commas, doubled
// quotes and newlines. Each field records whether it was quoted.
struct Field {
  std::string text;
  bool quoted = false;
};

struct Record {
  std::vector<Field> fields;
  std::size_t line = 0;
};

std::vector<Record> SplitRecords(std::string_view text) {
  std::vector<Record> records;
  Record current;
  Field field;
  bool in_quotes = false;
  bool record_has_content = false;
  std::size_t line = 1;
  current.line = line;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field = Field{};
  };
  auto end_record = [&] {
    end_field();
    const bool blank = !record_has_content && current.fields.size() == 1 &&
                       current.fields[0].text.empty() &&
                       !current.fields[0].quoted;
    if (!blank) records.push_back(std::move(current));
    current = Record{};
    current.line = line;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.text.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field.quoted = true;
        record_has_content = true;
        break;
      case ',':
        record_has_content = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        record_has_content = true;
        field.text.push_back(c);
    }
  }
  if (in_quotes) {
    throw InputError("csv: unterminated quoted field starting on line " +
                     std::to_string(current.line));
  }
  if (record_has_content || !field.text.empty() || !current.fields.empty()) {
    end_record();
  }
  return records;
}

std::vector<std::string> SortedLabels(const std::set<std::string>& distinct) {
  std::vector<std::string> labels(distinct.begin(), distinct.end());
  const bool all_numeric = std::all_of(labels.begin(), labels.end(),
                                       [](const std::string& s) {
                                         return ParseReal(s).has_value();
                                       });
  if (all_numeric) {
    std::stable_sort(labels.begin(), labels.end(),
                     [](const std::string& a, const std::string& b) {
                       return *ParseReal(a) < *ParseReal(b);
                     });
  }
  return labels;
}

}  // namespace

std::optional<double> ParseReal(std::string_view cell) {
  cell = Trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<std::size_t> RawTable::FindColumn(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

const RawColumn& RawTable::Target() const {
  const auto idx = FindColumn(target_name);
  if (!idx) throw InputError("missing target column '" + target_name + "'");
  return columns[*idx];
}

RawTable RawTable::SelectRows(std::span<const std::size_t> rows) const {
  RawTable out;
  out.target_name = target_name;
  out.n_rows = rows.size();
  out.columns.reserve(columns.size());
  for (const auto& col : columns) {
    RawColumn sub{col.name, {}};
    sub.cells.reserve(rows.size());
    for (const std::size_t r : rows) {
      if (r >= n_rows) throw InputError("row index out of range");
      sub.cells.push_back(col.cells[r]);
    }
    out.columns.push_back(std::move(sub));
  }
  return out;
}

void RawTable::Validate() const {
  for (const auto& col : columns) {
    if (col.cells.size() != n_rows) {
      throw InputError("column '" + col.name + "' has " +
                       std::to_string(col.cells.size()) + " cells, expected " +
                       std::to_string(n_rows));
    }
  }
  const RawColumn& target = Target();
  std::set<std::string> distinct;
  for (std::size_t r = 0; r < target.cells.size(); ++r) {
    if (!target.cells[r]) {
      throw InputError("target column '" + target_name +
                       "' has a missing value in data row " + std::to_string(r + 1));
    }
    distinct.insert(*target.cells[r]);
  }
  if (n_rows < 2) throw InputError("table needs at least 2 rows");
  if (distinct.size() < 2) {
    throw InputError("target column '" + target_name +
                     "' needs at least 2 distinct values");
  }
}

RawTable ParseCsv(std::string_view text, const std::string& target_name,
                  const CsvOptions& options) {
  const std::vector<Record> records = SplitRecords(text);
  if (records.empty()) throw InputError("csv: empty file");

  RawTable table;
  table.target_name = target_name;
  for (const Field& f : records[0].fields) {
    table.columns.push_back({std::string(Trim(f.text)), {}});
  }
  const std::size_t width = table.columns.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Record& rec = records[r];
    if (rec.fields.size() != width) {
      throw InputError("csv: line " + std::to_string(rec.line) + " has " +
                       std::to_string(rec.fields.size()) + " fields, header has " +
                       std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& raw = rec.fields[c].text;
      const std::string value(rec.fields[c].quoted ? std::string_view(raw)
                                                   : Trim(raw));
      const bool missing =
          std::find(options.missing_markers.begin(),
                    options.missing_markers.end(),
                    value) != options.missing_markers.end();
      table.columns[c].cells.push_back(missing ? Cell{} : Cell{value});
    }
  }
  table.n_rows = records.size() - 1;
  if (!table.FindColumn(target_name)) {
    throw InputError("csv: missing target column '" + target_name + "'");
  }
  table.Validate();
  return table;
}

RawTable LoadCsv(const std::string& path, const std::string& target_name,
                 const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), target_name, options);
}

std::string_view ColumnKindName(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kNumeric:
      return "numeric";
    case ColumnKind::kCategorical:
      return "categorical";
    case ColumnKind::kTarget:
      return "target";
  }
  return "unknown";
}

ColumnSchema InferSchema(const RawTable& table) {
  table.Validate();
  ColumnSchema schema;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const RawColumn& col = table.columns[c];
    ColumnSpec spec{col.name, ColumnKind::kNumeric, {}};
    std::set<std::string> distinct;
    bool numeric = true;
    for (const Cell& cell : col.cells) {
      if (!cell) continue;
      distinct.insert(*cell);
      if (numeric && !ParseReal(*cell)) numeric = false;
    }
    if (col.name == table.target_name) {
      spec.kind = ColumnKind::kTarget;
      schema.target_index = c;
      schema.class_labels = SortedLabels(distinct);
      spec.vocabulary = schema.class_labels;
    } else {
      if (distinct.empty()) {
        throw InputError("column '" + col.name + "' has no non-missing cells");
      }
      if (!numeric) {
        spec.kind = ColumnKind::kCategorical;
        spec.vocabulary.assign(distinct.begin(), distinct.end());
      }
    }
    schema.columns.push_back(std::move(spec));
  }
  return schema;
}

std::vector<int> EncodeLabels(const RawTable& table,
                              const ColumnSchema& schema) {
  std::map<std::string, int> index;
  for (std::size_t k = 0; k < schema.class_labels.size(); ++k) {
    index.emplace(schema.class_labels[k], static_cast<int>(k));
  }
  const RawColumn& target = table.Target();
  std::vector<int> labels;
  labels.reserve(target.cells.size());
  for (const Cell& cell : target.cells) {
    if (!cell) throw InputError("missing target value");
    const auto it = index.find(*cell);
    if (it == index.end()) throw InputError("unknown class label '" + *cell + "'");
    labels.push_back(it->second);
  }
  return labels;
}

std::size_t PreprocessorState::n_features() const {
  std::size_t d = 0;
  for (const auto& col : columns) {
    d += col.kind == ColumnKind::kNumeric ? 1 : col.vocabulary.size();
  }
  return d;
}

PreprocessorState FitPreprocessor(const RawTable& train_rows,
                                  const ColumnSchema& schema) {
  PreprocessorState state;
  for (const ColumnSpec& spec : schema.columns) {
    if (spec.kind == ColumnKind::kTarget) continue;
    const auto idx = train_rows.FindColumn(spec.name);
    if (!idx) throw InputError("column '" + spec.name + "' absent from rows");
    const RawColumn& col = train_rows.columns[*idx];
    ColumnState cs;
    cs.name = spec.name;
    cs.kind = spec.kind;
    if (spec.kind == ColumnKind::kNumeric) {
      std::vector<double> values;
      for (const Cell& cell : col.cells) {
        if (!cell) continue;
        const auto v = ParseReal(*cell);
        if (!v) throw InputError("non-numeric cell in numeric column '" + spec.name + "'");
        values.push_back(*v);
      }
      if (values.empty()) {
        throw InputError("numeric column '" + spec.name +
                         "' is entirely missing in training rows");
      }
      const double n = static_cast<double>(values.size());
      double sum = 0.0;
      for (const double v : values) sum += v;
      cs.mean = sum / n;
      double ss = 0.0;
      for (const double v : values) ss += (v - cs.mean) * (v - cs.mean);
      cs.stddev = std::max(std::sqrt(ss / n), kMinStddev);
      std::sort(values.begin(), values.end());
      const std::size_t m = values.size();
      cs.median = m % 2 == 1 ? values[m / 2]
                             : 0.5 * (values[m / 2 - 1] + values[m / 2]);
    } else {
      std::map<std::string, std::size_t> counts;
      for (const Cell& cell : col.cells) {
        if (cell) ++counts[*cell];
      }
      if (counts.empty()) {
        throw InputError("categorical column '" + spec.name +
                         "' is entirely missing in training rows");
      }
      std::size_t best = 0;
      for (const auto& [value, count] : counts) {
        cs.vocabulary.push_back(value);
        // Strict comparison keeps the lexicographically smallest mode.
        if (count > best) {
          best = count;
          cs.mode = value;
        }
      }
    }
    state.columns.push_back(std::move(cs));
  }
  return state;
}

FeatureMatrix Transform(const PreprocessorState& state, const RawTable& rows) {
  FeatureMatrix out;
  const std::size_t d = state.n_features();
  out.values = Matrix::Zero(static_cast<Eigen::Index>(rows.n_rows),
                            static_cast<Eigen::Index>(d));
  out.feature_names.reserve(d);
  out.source_column.reserve(d);

  std::size_t offset = 0;
  for (std::size_t c = 0; c < state.columns.size(); ++c) {
    const ColumnState& cs = state.columns[c];
    const auto idx = rows.FindColumn(cs.name);
    if (!idx) throw InputError("column '" + cs.name + "' absent from rows");
    const RawColumn& col = rows.columns[*idx];
    if (cs.kind == ColumnKind::kNumeric) {
      out.feature_names.push_back(cs.name);
      out.source_column.push_back(c);
      for (std::size_t r = 0; r < rows.n_rows; ++r) {
        double v = cs.median;
        if (col.cells[r]) {
          const auto parsed = ParseReal(*col.cells[r]);
          if (!parsed) {
            throw InputError("non-numeric cell '" + *col.cells[r] +
                             "' in numeric column '" + cs.name + "'");
          }
          v = *parsed;
        }
        out.values(static_cast<Eigen::Index>(r),
                   static_cast<Eigen::Index>(offset)) = (v - cs.mean) / cs.stddev;
      }
      offset += 1;
    } else {
      std::map<std::string_view, std::size_t> position;
      for (std::size_t k = 0; k < cs.vocabulary.size(); ++k) {
        position.emplace(cs.vocabulary[k], k);
        out.feature_names.push_back(cs.name + "=" + cs.vocabulary[k]);
        out.source_column.push_back(c);
      }
      for (std::size_t r = 0; r < rows.n_rows; ++r) {
        const std::string& value = col.cells[r] ? *col.cells[r] : cs.mode;
        const auto it = position.find(value);
        if (it == position.end()) {
          out.warnings.push_back("unseen category '" + value + "' in column '" +
                                 cs.name + "' (row " + std::to_string(r) + ")");
          continue;
        }
        out.values(static_cast<Eigen::Index>(r),
                   static_cast<Eigen::Index>(offset + it->second)) = 1.0;
      }
      offset += cs.vocabulary.size();
    }
  }
  return out;
}

nlohmann::json ToJson(const PreprocessorState& state) {
  nlohmann::json cols = nlohmann::json::array();
  for (const ColumnState& cs : state.columns) {
    nlohmann::json c{{"name", cs.name}, {"kind", ColumnKindName(cs.kind)}};
    if (cs.kind == ColumnKind::kNumeric) {
      c["mean"] = cs.mean;
      c["stddev"] = cs.stddev;
      c["median"] = cs.median;
    } else {
      c["vocabulary"] = cs.vocabulary;
      c["mode"] = cs.mode;
    }
    cols.push_back(std::move(c));
  }
  return {{"version", 1}, {"columns", std::move(cols)}};
}

PreprocessorState PreprocessorStateFromJson(const nlohmann::json& doc) {
  if (doc.value("version", 0) != 1) {
    throw InputError("unsupported preprocessor state version");
  }
  PreprocessorState state;
  for (const auto& c : doc.at("columns")) {
    ColumnState cs;
    cs.name = c.at("name").get<std::string>();
    const std::string kind = c.at("kind").get<std::string>();
    if (kind == "numeric") {
      cs.kind = ColumnKind::kNumeric;
      cs.mean = c.at("mean").get<double>();
      cs.stddev = c.at("stddev").get<double>();
      cs.median = c.at("median").get<double>();
    } else if (kind == "categorical") {
      cs.kind = ColumnKind::kCategorical;
      cs.vocabulary = c.at("vocabulary").get<std::vector<std::string>>();
      cs.mode = c.at("mode").get<std::string>();
    } else {
      throw InputError("unknown column kind '" + kind + "'");
    }
    state.columns.push_back(std::move(cs));
  }
  return state;
}

SplitIndices StratifiedSplit(std::span<const int> labels, double ratio,
                             std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InputError("split ratio must lie in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  SplitIndices split;
  split.seed = seed;
  for (auto& [label, idx] : members) {
    Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(label)}));
    rng.Shuffle(idx);
    const std::size_t n_c = idx.size();
    std::size_t n_train;
    if (n_c < 2) {
      n_train = n_c;
      split.warnings.push_back("class " + std::to_string(label) + " has " +
                               std::to_string(n_c) +
                               " member(s); placed in train only");
    } else {
      const auto rounded = static_cast<std::size_t>(
          std::floor(ratio * static_cast<double>(n_c) + 0.5));
      n_train = std::clamp<std::size_t>(rounded, 1, n_c - 1);
    }
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + n_train);
    split.test.insert(split.test.end(), idx.begin() + n_train, idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace xaieval::data
