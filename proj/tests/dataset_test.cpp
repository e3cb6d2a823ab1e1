// Copyright 2026 The AOSOBoost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "aoso/dataset.hpp"
#include "test_util.hpp"

namespace aoso {
namespace {

Dataset Libsvm(const std::string& text, const LoadOptions& opts = {}) {
  std::istringstream in(text);
  return ParseLibsvm(in, opts);
}

Dataset Csv(const std::string& text, const LoadOptions& opts = {}) {
  std::istringstream in(text);
  return ParseCsv(in, opts);
}

template <typename Fn>
ParseError CaptureParseError(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse error";
  return ParseError("none");
}

TEST(Libsvm, SparseLineWithImplicitZeros) {
  const Dataset d = Libsvm("1 3:0.5 7:1.2\n");
  EXPECT_EQ(d.num_examples(), 1u);
  EXPECT_EQ(d.num_features(), 7u);
  EXPECT_EQ(d.raw_labels()[0], 1);
  const std::vector<double> want{0, 0, 0.5, 0, 0, 0, 1.2};
  EXPECT_EQ(d.Row(0), want);
}

TEST(Libsvm, EmptyFileIsRejected) {
  EXPECT_THROW(Libsvm(""), ParseError);
  EXPECT_THROW(Libsvm("\n  \n# only a comment\n"), ParseError);
}

TEST(Libsvm, TwentySixClasses) {
  std::string text;
  for (int y = 1; y <= 26; ++y) text += std::to_string(y) + " 1:" + std::to_string(y) + "\n";
  const Dataset d = Libsvm(text);
  EXPECT_EQ(d.num_classes(), 26);
  EXPECT_TRUE(d.label_map().IsIdentity());
  EXPECT_TRUE(d.label_map().RemapReport().empty());
  EXPECT_EQ(d.labels()[25], 25);
}

TEST(Libsvm, NonContiguousLabelsAreRemapped) {
  const Dataset d = Libsvm("10 1:1\n0 1:2\n4 1:3\n");
  EXPECT_EQ(d.num_classes(), 3);
  EXPECT_EQ(std::vector<int>(d.labels().begin(), d.labels().end()), (std::vector<int>{2, 0, 1}));
  EXPECT_EQ(d.label_map().RemapReport(), "labels remapped to classes 1..3: 0->1 4->2 10->3");
}

TEST(Libsvm, MalformedLinesReportLineNumbers) {
  EXPECT_EQ(CaptureParseError([] { Libsvm("1 1:2\nabc 1:2\n"); }).line(), 2u);
  EXPECT_EQ(CaptureParseError([] { Libsvm("1 1:2\n2 1:2\n1 3-4\n"); }).line(), 3u);
  EXPECT_EQ(CaptureParseError([] { Libsvm("1 0:2\n"); }).line(), 1u);
  EXPECT_EQ(CaptureParseError([] { Libsvm("1 x:2\n"); }).line(), 1u);
  EXPECT_EQ(CaptureParseError([] { Libsvm("1 2:y\n"); }).line(), 1u);
  EXPECT_EQ(CaptureParseError([] { Libsvm("1 2:1 2:3\n"); }).line(), 1u);
  EXPECT_EQ(CaptureParseError([] { Libsvm("2.5 1:1\n"); }).line(), 1u);
  EXPECT_EQ(CaptureParseError([] { Libsvm("-1 1:1\n"); }).line(), 1u);
  EXPECT_EQ(CaptureParseError([] { Libsvm("1 1:nan\n"); }).line(), 1u);
}

TEST(Libsvm, CommentsAndIntegralFloatLabels) {
  const Dataset d = Libsvm("# header\n2.0 1:1 # trailing\n\n1 2:3\n");
  EXPECT_EQ(d.num_examples(), 2u);
  EXPECT_EQ(d.raw_labels()[0], 2);
  EXPECT_EQ(d.value(1, 1), 3.0);
}

TEST(Libsvm, FixedLabelMapRejectsUnknownLabel) {
  LoadOptions opts;
  opts.label_map = LabelMap::FromValues({1, 2});
  EXPECT_THROW(Libsvm("3 1:1\n", opts), InvalidInput);
  EXPECT_EQ(Libsvm("2 1:1\n", opts).labels()[0], 1);
}

TEST(Libsvm, MinFeaturesPads) {
  LoadOptions opts;
  opts.min_features = 5;
  EXPECT_EQ(Libsvm("1 2:1\n", opts).num_features(), 5u);
}

TEST(Csv, NumericTable) {
  const Dataset d = Csv("1,2,0\n3,4,1\n5,6,1\n");
  EXPECT_EQ(d.num_examples(), 3u);
  EXPECT_EQ(d.num_features(), 2u);
  EXPECT_EQ(d.num_classes(), 2);
  EXPECT_EQ(d.Row(1), (std::vector<double>{3, 4}));
}

TEST(Csv, HeaderAutoDetected) {
  const Dataset d = Csv("a,b,label\n1,2,1\n3,4,2\n");
  EXPECT_EQ(d.num_examples(), 2u);
  EXPECT_EQ(d.value(0, 0), 1.0);
}

TEST(Csv, LabelColumnSelection) {
  LoadOptions opts;
  opts.label_column = 0;
  const Dataset d = Csv("7,1.5,2.5\n8,3.5,4.5\n", opts);
  EXPECT_EQ(d.raw_labels()[1], 8);
  EXPECT_EQ(d.Row(1), (std::vector<double>{3.5, 4.5}));
  opts.label_column = 3;
  EXPECT_THROW(Csv("1,2,3\n", opts), ParseError);
  opts.label_column = -4;
  EXPECT_THROW(Csv("1,2,3\n", opts), ParseError);
}

TEST(Csv, RaggedRowsAndBadCellsReportLocation) {
  auto ragged = CaptureParseError([] { Csv("1,2,0\n1,0\n"); });
  EXPECT_EQ(ragged.line(), 2u);
  auto bad = CaptureParseError([] { Csv("1,2,0\n1,zz,0\n"); });
  EXPECT_EQ(bad.line(), 2u);
  EXPECT_EQ(bad.column(), 2u);
  EXPECT_NE(std::string(bad.what()).find("line 2, column 2"), std::string::npos);
  EXPECT_THROW(Csv("a,b,c\n"), ParseError);
}

TEST(Formats, SparseAndDenseAgree) {
  std::mt19937_64 rng(20);
  std::uniform_int_distribution<int> v(0, 3);
  std::string csv;
  std::string svm;
  for (int i = 0; i < 40; ++i) {
    const int y = 1 + i % 4;
    svm += std::to_string(y);
    for (int f = 0; f < 5; ++f) {
      const int x = v(rng);
      csv += std::to_string(x) + ",";
      if (x != 0) svm += " " + std::to_string(f + 1) + ":" + std::to_string(x);
    }
    csv += std::to_string(y) + "\n";
    svm += "\n";
  }
  LoadOptions opts;
  opts.min_features = 5;
  EXPECT_EQ(Csv(csv), Libsvm(svm, opts));
}

TEST(Formats, LoadFromDiskByExtension) {
  testing::TempFile csv(".csv", "1,2,1\n3,4,2\n");
  testing::TempFile svm(".svm", "1 1:1 2:2\n2 1:3 2:4\n");
  EXPECT_EQ(LoadDataset(csv.path()), LoadDataset(svm.path()));
  EXPECT_THROW(LoadDataset("/nonexistent/file.csv"), ParseError);
}

TEST(Dataset, RejectsBadShapes) {
  EXPECT_THROW(Dataset(1, {}, {}), InvalidInput);
  EXPECT_THROW(Dataset(2, {1.0, 2.0, 3.0}, {1, 2}), InvalidInput);
  EXPECT_THROW(Dataset(1, {std::nan("")}, {1}), InvalidInput);
}

TEST(LabelMap, RequiresStrictlyIncreasingValues) {
  EXPECT_THROW(LabelMap::FromValues({2, 1}), InvalidInput);
  EXPECT_THROW(LabelMap::FromValues({1, 1}), InvalidInput);
  EXPECT_EQ(LabelMap::FromValues({0, 5}).ClassOf(5), 1);
}

TEST(Presort, HandExamples) {
  const Dataset d(1, {3.0, 1.0, 2.0}, {1, 1, 2});
  const SortedIndex idx = Presort(d);
  EXPECT_EQ(std::vector<std::uint32_t>(idx.order(0).begin(), idx.order(0).end()),
            (std::vector<std::uint32_t>{1, 2, 0}));

  const Dataset flat(1, {4.0, 4.0, 4.0, 4.0}, {1, 2, 1, 2});
  const SortedIndex fi = Presort(flat);
  EXPECT_EQ(std::vector<std::uint32_t>(fi.order(0).begin(), fi.order(0).end()),
            (std::vector<std::uint32_t>{0, 1, 2, 3}));
  EXPECT_EQ(fi.run_starts(0).size(), 1u);
}

TEST(Presort, StablePermutationOnRandomColumnsWithDuplicates) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const Dataset d = testing::RandomDataset(rng, 5 + t * 7, 3, 3, 2 + t % 5);
    const SortedIndex idx = Presort(d);
    for (std::size_t f = 0; f < d.num_features(); ++f) {
      auto order = std::vector<std::uint32_t>(idx.order(f).begin(), idx.order(f).end());
      const auto col = d.column(f);
      for (std::size_t j = 1; j < order.size(); ++j) {
        ASSERT_LE(col[order[j - 1]], col[order[j]]);
        if (col[order[j - 1]] == col[order[j]]) {
          ASSERT_LT(order[j - 1], order[j]);  // stability
        }
      }
      std::sort(order.begin(), order.end());
      for (std::size_t j = 0; j < order.size(); ++j) ASSERT_EQ(order[j], j);
      // Exact mode: one bin per distinct value, in value order.
      for (std::size_t j = 1; j < order.size(); ++j) {
        const auto a = idx.order(f)[j - 1], b = idx.order(f)[j];
        EXPECT_EQ(idx.bins(f)[a] == idx.bins(f)[b], col[a] == col[b]);
      }
    }
  }
}

TEST(Presort, QuantileBinsAreMonotoneAndBounded) {
  std::mt19937_64 rng(22);
  const Dataset d = testing::RandomDataset(rng, 500, 2, 3, 100);
  const SortedIndex idx = Presort(d, 8);
  for (std::size_t f = 0; f < 2; ++f) {
    const auto order = idx.order(f);
    const auto col = d.column(f);
    std::uint32_t max_bin = 0;
    for (std::size_t j = 1; j < order.size(); ++j) {
      EXPECT_LE(idx.bins(f)[order[j - 1]], idx.bins(f)[order[j]]);
      if (col[order[j - 1]] == col[order[j]]) {
        EXPECT_EQ(idx.bins(f)[order[j - 1]], idx.bins(f)[order[j]]);
      }
      max_bin = std::max(max_bin, idx.bins(f)[order[j]]);
    }
    EXPECT_LT(max_bin, 8u);
    EXPECT_GE(max_bin, 4u);
  }
  EXPECT_THROW(Presort(d, 1), ConfigError);
  EXPECT_THROW(Presort(d, -3), ConfigError);
}

}  // namespace
}  // namespace aoso
