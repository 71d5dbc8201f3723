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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "gtest/gtest.h"
#include "xaieval/random.h"

namespace xaieval::data {
namespace {

constexpr double kEps = 1e-9;

TEST(LoadCsv, ParsesHeaderAndRows) {
  const RawTable t = ParseCsv("a,b,y\n1,2,x\n3,4,z\n5,6,x\n", "y");
  EXPECT_EQ(t.n_rows, 3u);
  ASSERT_EQ(t.columns.size(), 3u);
  EXPECT_EQ(t.columns[0].name, "a");
  EXPECT_EQ(*t.columns[2].cells[1], "z");
}

TEST(LoadCsv, EmptyCellIsMissing) {
  const RawTable t = ParseCsv("a,b,y\n1.5,,x\n2,NA,y\n3,?,x\n", "y");
  EXPECT_FALSE(t.columns[1].cells[0].has_value());
  EXPECT_FALSE(t.columns[1].cells[1].has_value());
  EXPECT_FALSE(t.columns[1].cells[2].has_value());
  EXPECT_EQ(*t.columns[0].cells[0], "1.5");
}

TEST(LoadCsv, QuotedFieldsAndCrLf) {
  const RawTable t =
      ParseCsv("name,y\r\n\"Smith, J\",1\r\n\"say \"\"hi\"\"\",0\r\n", "y");
  EXPECT_EQ(*t.columns[0].cells[0], "Smith, J");
  EXPECT_EQ(*t.columns[0].cells[1], "say \"hi\"");
}

TEST(LoadCsv, Errors) {
  EXPECT_THROW(ParseCsv("", "y"), InputError);
  EXPECT_THROW(ParseCsv("a,y\n1,0\n2,1\n", "target"), InputError);
  EXPECT_THROW(ParseCsv("a,y\n1,0\n2\n", "y"), InputError);
  // Missing target cell.
  EXPECT_THROW(ParseCsv("a,y\n1,0\n2,\n3,1\n", "y"), InputError);
  // Single class.
  EXPECT_THROW(ParseCsv("a,y\n1,0\n2,0\n", "y"), InputError);
  EXPECT_THROW(LoadCsv("/nonexistent/file.csv", "y"), InputError);
}

TEST(LoadCsv, ReadsFromDisk) {
  const auto path =
      std::filesystem::temp_directory_path() / "xaieval_data_test.csv";
  std::ofstream(path) << "a,b,y\n1,2,0\n3,4,1\n5,6,0\n";
  const RawTable t = LoadCsv(path.string(), "y");
  EXPECT_EQ(t.n_rows, 3u);
  std::filesystem::remove(path);
}

TEST(InferSchema, ColumnKinds) {
  const RawTable t =
      ParseCsv("n,c,y\n1,1,yes\n2.5,two,no\n,1,yes\n", "y");
  const ColumnSchema s = InferSchema(t);
  EXPECT_EQ(s.columns[0].kind, ColumnKind::kNumeric);
  EXPECT_EQ(s.columns[1].kind, ColumnKind::kCategorical);
  EXPECT_EQ(s.columns[2].kind, ColumnKind::kTarget);
  EXPECT_EQ(s.n_classes(), 2u);
  EXPECT_EQ(s.target_index, 2u);
}

TEST(InferSchema, NumericLabelsSortNumerically) {
  const RawTable t = ParseCsv("a,y\n1,10\n2,2\n3,1\n", "y");
  const ColumnSchema s = InferSchema(t);
  EXPECT_EQ(s.class_labels, (std::vector<std::string>{"1", "2", "10"}));
  EXPECT_EQ(EncodeLabels(t, s), (std::vector<int>{2, 1, 0}));
}

TEST(InferSchema, AllMissingColumnIsAnError) {
  const RawTable t = ParseCsv("a,b,y\n1,,0\n2,,1\n", "y");
  EXPECT_THROW(InferSchema(t), InputError);
}

TEST(Preprocessor, NumericStatistics) {
  const RawTable t = ParseCsv("v,y\n1,a\n2,b\n3,a\n", "y");
  const PreprocessorState st = FitPreprocessor(t, InferSchema(t));
  ASSERT_EQ(st.columns.size(), 1u);
  EXPECT_NEAR(st.columns[0].mean, 2.0, kEps);
  EXPECT_NEAR(st.columns[0].stddev, 0.816496580927726, kEps);
  EXPECT_NEAR(st.columns[0].median, 2.0, kEps);

  const FeatureMatrix fm = Transform(st, t);
  EXPECT_NEAR(fm.values(0, 0), -1.224744871391589, kEps);
}

TEST(Preprocessor, MissingNumericImputesMedian) {
  const RawTable train = ParseCsv("v,y\n1,a\n2,b\n3,a\n", "y");
  const ColumnSchema schema = InferSchema(train);
  const PreprocessorState st = FitPreprocessor(train, schema);
  const RawTable test = ParseCsv("v,y\n,a\n2,b\n", "y");
  const FeatureMatrix fm = Transform(st, test);
  // Median 2 equals the mean, so the imputed row standardizes to 0.
  EXPECT_NEAR(fm.values(0, 0), (2.0 - st.columns[0].mean) / st.columns[0].stddev,
              kEps);
}

TEST(Preprocessor, CategoricalModeAndOneHot) {
  const RawTable t = ParseCsv("c,y\na,0\na,1\nb,0\n", "y");
  const ColumnSchema schema = InferSchema(t);
  const PreprocessorState st = FitPreprocessor(t, schema);
  EXPECT_EQ(st.columns[0].mode, "a");
  EXPECT_EQ(st.columns[0].vocabulary, (std::vector<std::string>{"a", "b"}));
  const FeatureMatrix fm = Transform(st, t);
  ASSERT_EQ(fm.n_features(), 2u);
  EXPECT_EQ(fm.values(0, 0), 1.0);
  EXPECT_EQ(fm.values(0, 1), 0.0);
  EXPECT_EQ(fm.feature_names[1], "c=b");
}

TEST(Preprocessor, UnseenCategoryGivesZeroGroupAndWarning) {
  const RawTable full = ParseCsv("c,y\na,0\nb,1\nz,0\n", "y");
  const ColumnSchema schema = InferSchema(full);
  const std::vector<std::size_t> train_rows{0, 1};
  const std::vector<std::size_t> test_rows{2};
  const PreprocessorState st = FitPreprocessor(full.SelectRows(train_rows), schema);
  const FeatureMatrix fm = Transform(st, full.SelectRows(test_rows));
  EXPECT_EQ(fm.values.row(0).sum(), 0.0);
  EXPECT_EQ(fm.warnings.size(), 1u);
}

TEST(Preprocessor, ConstantColumnClampsStddev) {
  const RawTable t = ParseCsv("v,y\n5,0\n5,1\n", "y");
  const PreprocessorState st = FitPreprocessor(t, InferSchema(t));
  EXPECT_EQ(st.columns[0].stddev, kMinStddev);
  EXPECT_EQ(Transform(st, t).values(0, 0), 0.0);
}

TEST(Preprocessor, AllMissingInTrainingIsAnError) {
  const RawTable full = ParseCsv("v,y\n,0\n,1\n3,0\n", "y");
  const ColumnSchema schema = InferSchema(full);
  const std::vector<std::size_t> rows{0, 1};
  EXPECT_THROW(FitPreprocessor(full.SelectRows(rows), schema), InputError);
}

TEST(Preprocessor, ColumnAbsentFromRows) {
  const RawTable t = ParseCsv("v,y\n1,0\n2,1\n", "y");
  const PreprocessorState st = FitPreprocessor(t, InferSchema(t));
  const RawTable other = ParseCsv("w,y\n1,0\n2,1\n", "y");
  EXPECT_THROW(Transform(st, other), InputError);
}

// Random mixed tables: standardized numeric features have zero mean and unit
// variance on the fitting rows; one-hot groups sum to 1; transform is pure.
TEST(Preprocessor, PropertiesOnRandomTables) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::string csv = "n1,n2,c,y\n";
    const int rows = 5 + static_cast<int>(rng.UniformInt(40));
    for (int r = 0; r < rows; ++r) {
      csv += rng.Uniform() < 0.1 ? "" : std::to_string(rng.Normal() * 3 + 1);
      csv += ",";
      csv += std::to_string(rng.Uniform(-5, 5));
      csv += ",";
      csv += rng.Uniform() < 0.1 ? "" : std::string(1, static_cast<char>('a' + rng.UniformInt(4)));
      csv += ",";
      csv += r % 2 == 0 ? "p\n" : "q\n";
    }
    const RawTable t = ParseCsv(csv, "y");
    const ColumnSchema schema = InferSchema(t);
    const PreprocessorState st = FitPreprocessor(t, schema);
    const FeatureMatrix a = Transform(st, t);
    const FeatureMatrix b = Transform(st, t);
    EXPECT_TRUE((a.values.array() == b.values.array()).all());
    EXPECT_EQ(a.n_features(), st.n_features());
    // n2 has no missing cells, so its standardized column is exact.
    const auto col = a.values.col(1);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    EXPECT_LT(std::abs(mean), kEps);
    EXPECT_NEAR(sd, 1.0, kEps);
    const Eigen::Index d = static_cast<Eigen::Index>(a.n_features());
    for (Eigen::Index r = 0; r < a.values.rows(); ++r) {
      EXPECT_DOUBLE_EQ(a.values.row(r).segment(2, d - 2).sum(), 1.0);
    }
  }
}

TEST(Preprocessor, JsonRoundTrip) {
  const RawTable t = ParseCsv("v,c,y\n1,a,0\n2,b,1\n4,a,0\n", "y");
  const PreprocessorState st = FitPreprocessor(t, InferSchema(t));
  const PreprocessorState back = PreprocessorStateFromJson(ToJson(st));
  EXPECT_EQ(ToJson(back).dump(), ToJson(st).dump());
  EXPECT_TRUE((Transform(back, t).values.array() ==
               Transform(st, t).values.array()).all());
}

TEST(StratifiedSplit, RoundsPerClass) {
  std::vector<int> labels{0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
  const SplitIndices s = StratifiedSplit(labels, 0.8, 3);
  std::map<int, int> train, test;
  for (auto i : s.train) ++train[labels[i]];
  for (auto i : s.test) ++test[labels[i]];
  EXPECT_EQ(train[0], 5);
  EXPECT_EQ(train[1], 3);
  EXPECT_EQ(test[0], 1);
  EXPECT_EQ(test[1], 1);
}

TEST(StratifiedSplit, TwoMemberClassSplitsOneOne) {
  std::vector<int> labels{0, 0, 1, 1, 1, 1, 1};
  const SplitIndices s = StratifiedSplit(labels, 0.8, 1);
  int train0 = 0;
  for (auto i : s.train) train0 += labels[i] == 0;
  EXPECT_EQ(train0, 1);
}

TEST(StratifiedSplit, SingletonClassGoesToTrainWithWarning) {
  std::vector<int> labels{0, 0, 0, 1};
  const SplitIndices s = StratifiedSplit(labels, 0.8, 1);
  EXPECT_NE(std::find(s.train.begin(), s.train.end(), 3u), s.train.end());
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(StratifiedSplit, DeterministicAndDisjoint) {
  std::vector<int> labels;
  for (int i = 0; i < 103; ++i) labels.push_back(i % 3 == 0 ? 2 : i % 2);
  const SplitIndices a = StratifiedSplit(labels, 0.8, 42);
  const SplitIndices b = StratifiedSplit(labels, 0.8, 42);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::vector<std::size_t> all = a.train;
  all.insert(all.end(), a.test.begin(), a.test.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), labels.size());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  // Each class within one sample of exact stratification.
  std::map<int, double> total, train;
  for (int l : labels) total[l] += 1;
  for (auto i : a.train) train[labels[i]] += 1;
  for (auto [label, n] : total) EXPECT_LE(std::abs(train[label] - 0.8 * n), 1.0);
}

TEST(StratifiedSplit, RejectsBadRatio) {
  std::vector<int> labels{0, 1};
  EXPECT_THROW(StratifiedSplit(labels, 1.0, 0), InputError);
  EXPECT_THROW(StratifiedSplit(labels, 0.0, 0), InputError);
}

}  // namespace
}  // namespace xaieval::data
