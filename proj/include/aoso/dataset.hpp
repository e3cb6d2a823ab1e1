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

#ifndef AOSO_DATASET_HPP_
#define AOSO_DATASET_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "aoso/errors.hpp"

namespace aoso {

/// Maps the integer labels found in data files onto contiguous 0-based
/// class indices. The public (1-based) class id of index k is k + 1.
class LabelMap {
 public:
  LabelMap() = default;

  /// Sorted distinct values of `labels`.
  static LabelMap FromLabels(std::span<const std::int64_t> labels) {
    LabelMap map;
    map.values_.assign(labels.begin(), labels.end());
    std::sort(map.values_.begin(), map.values_.end());
    map.values_.erase(std::unique(map.values_.begin(), map.values_.end()), map.values_.end());
    return map;
  }

  static LabelMap FromValues(std::vector<std::int64_t> values) {
    if (!std::is_sorted(values.begin(), values.end()) ||
        std::adjacent_find(values.begin(), values.end()) != values.end()) {
      throw InvalidInput("label map: values must be strictly increasing");
    }
    LabelMap map;
    map.values_ = std::move(values);
    return map;
  }

  int num_classes() const { return static_cast<int>(values_.size()); }
  std::span<const std::int64_t> values() const { return values_; }

  int ClassOf(std::int64_t label) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), label);
    if (it == values_.end() || *it != label) {
      throw InvalidInput("label " + std::to_string(label) + " is not a known class");
    }
    return static_cast<int>(it - values_.begin());
  }

  std::int64_t LabelOf(int cls) const { return values_.at(static_cast<std::size_t>(cls)); }

  /// True when the labels already are exactly 1..K.
  bool IsIdentity() const {
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (values_[k] != static_cast<std::int64_t>(k + 1)) return false;
    }
    return true;
  }

  /// Human-readable "label -> class" listing, empty for identity maps.
  std::string RemapReport() const {
    if (IsIdentity()) return {};
    std::string out = "labels remapped to classes 1.." + std::to_string(values_.size()) + ":";
    for (std::size_t k = 0; k < values_.size(); ++k) {
      out += " " + std::to_string(values_[k]) + "->" + std::to_string(k + 1);
    }
    return out;
  }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::vector<std::int64_t> values_;
};

/// Dense column-major feature matrix with class labels. Immutable.
class Dataset {
 public:
  Dataset(std::size_t num_features, std::vector<double> columns, std::vector<std::int64_t> raw_labels,
          std::optional<LabelMap> label_map = std::nullopt)
      : num_examples_(raw_labels.size()),
        num_features_(num_features),
        columns_(std::move(columns)),
        raw_labels_(std::move(raw_labels)),
        label_map_(label_map ? std::move(*label_map) : LabelMap::FromLabels(raw_labels_)) {
    if (num_examples_ == 0) throw InvalidInput("dataset: no examples");
    if (columns_.size() != num_examples_ * num_features_) throw InvalidInput("dataset: feature matrix shape");
    if (!std::all_of(columns_.begin(), columns_.end(), [](double v) { return std::isfinite(v); })) {
      throw InvalidInput("dataset: non-finite feature value");
    }
    labels_.reserve(num_examples_);
    for (std::int64_t y : raw_labels_) labels_.push_back(label_map_.ClassOf(y));
  }

  std::size_t num_examples() const { return num_examples_; }
  std::size_t num_features() const { return num_features_; }
  int num_classes() const { return label_map_.num_classes(); }

  double value(std::size_t example, std::size_t feature) const {
    return columns_[feature * num_examples_ + example];
  }
  std::span<const double> column(std::size_t feature) const {
    return std::span<const double>(columns_).subspan(feature * num_examples_, num_examples_);
  }
  std::vector<double> Row(std::size_t example) const {
    std::vector<double> x(num_features_);
    for (std::size_t f = 0; f < num_features_; ++f) x[f] = value(example, f);
    return x;
  }

  /// 0-based class index per example.
  std::span<const int> labels() const { return labels_; }
  std::span<const std::int64_t> raw_labels() const { return raw_labels_; }
  const LabelMap& label_map() const { return label_map_; }

  /// Same examples with classes assigned through `map` (e.g. a model's).
  Dataset WithLabelMap(const LabelMap& map) const { return Dataset(num_features_, columns_, raw_labels_, map); }

  /// Appends all-zero columns up to `num_features`; never drops columns.
  Dataset PadFeatures(std::size_t num_features) const {
    if (num_features < num_features_) {
      throw InvalidInput("dataset has " + std::to_string(num_features_) + " features, expected " +
                         std::to_string(num_features));
    }
    std::vector<double> cols = columns_;
    cols.resize(num_examples_ * num_features, 0.0);
    return Dataset(num_features, std::move(cols), raw_labels_, label_map_);
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.num_features_ == b.num_features_ && a.columns_ == b.columns_ &&
           a.raw_labels_ == b.raw_labels_ && a.label_map_ == b.label_map_;
  }

 private:
  std::size_t num_examples_;
  std::size_t num_features_;
  std::vector<double> columns_;
  std::vector<std::int64_t> raw_labels_;
  LabelMap label_map_;
  std::vector<int> labels_;
};

struct LoadOptions {
  /// Fixed class assignment, e.g. the training set's when loading a test set.
  std::optional<LabelMap> label_map;
  /// libsvm only: pad to at least this many features.
  std::size_t min_features = 0;
  /// CSV only: 0-based label column, negative counts from the end.
  int label_column = -1;
};

namespace detail {

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> ParseDouble(std::string_view s) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Integer labels; "3.0" is accepted, "3.5" is not.
inline std::optional<std::int64_t> ParseLabel(std::string_view s) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  auto d = ParseDouble(s);
  if (d && std::abs(*d) < 9e15 && *d == std::trunc(*d)) return static_cast<std::int64_t>(*d);
  return std::nullopt;
}

}  // namespace detail

/// libsvm text: "label idx:val idx:val ...", 1-based indices in any order,
/// absent features are 0, duplicate indices are an error.
inline Dataset ParseLibsvm(std::istream& in, const LoadOptions& options = {}) {
  std::vector<std::int64_t> labels;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    std::istringstream tokens{std::string(view)};
    std::string tok;
    if (!(tokens >> tok)) continue;
    auto label = detail::ParseLabel(tok);
    if (!label) throw ParseError("non-numeric label '" + tok + "'", line_no);
    if (*label < 0) throw ParseError("labels must be non-negative integers", line_no);
    std::vector<std::pair<std::size_t, double>> row;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError("expected index:value, got '" + tok + "'", line_no);
      std::size_t index = 0;
      const std::string_view idx_text(tok.data(), colon);
      auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
      if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || index == 0) {
        throw ParseError("bad feature index '" + std::string(idx_text) + "'", line_no);
      }
      auto value = detail::ParseDouble(std::string_view(tok).substr(colon + 1));
      if (!value) throw ParseError("bad feature value in '" + tok + "'", line_no);
      for (const auto& [seen, unused] : row) {
        if (seen == index) throw ParseError("duplicate feature index " + std::to_string(index), line_no);
      }
      row.emplace_back(index, *value);
      max_index = std::max(max_index, index);
    }
    labels.push_back(*label);
    rows.push_back(std::move(row));
  }
  if (labels.empty()) throw ParseError("no examples");
  const std::size_t n = labels.size();
  const std::size_t d = std::max(max_index, options.min_features);
  std::vector<double> columns(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [index, value] : rows[i]) columns[(index - 1) * n + i] = value;
  }
  return Dataset(d, std::move(columns), std::move(labels), options.label_map);
}

/// Comma-separated numeric table. The first row is a header iff one of its
/// cells is not numeric.
inline Dataset ParseCsv(std::istream& in, const LoadOptions& options = {}) {
  std::vector<std::vector<double>> rows;
  std::vector<std::int64_t> labels;
  std::size_t width = 0;
  std::size_t label_col = 0;
  bool first = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::Trim(line).empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (first) {
      first = false;
      width = cells.size();
      const int col = options.label_column < 0 ? static_cast<int>(width) + options.label_column
                                               : options.label_column;
      if (col < 0 || col >= static_cast<int>(width)) {
        throw ParseError("label column " + std::to_string(options.label_column) + " out of range for " +
                             std::to_string(width) + " columns",
                         line_no);
      }
      label_col = static_cast<std::size_t>(col);
      const bool header = std::any_of(cells.begin(), cells.end(),
                                      [](std::string_view c) { return !detail::ParseDouble(c); });
      if (header) continue;
    }
    if (cells.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " cells, got " + std::to_string(cells.size()),
                       line_no);
    }
    std::vector<double> row;
    row.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) {
        auto label = detail::ParseLabel(cells[c]);
        if (!label) throw ParseError("non-integer label '" + std::string(cells[c]) + "'", line_no, c + 1);
        if (*label < 0) throw ParseError("labels must be non-negative integers", line_no, c + 1);
        labels.push_back(*label);
        continue;
      }
      auto value = detail::ParseDouble(cells[c]);
      if (!value) throw ParseError("non-numeric cell '" + std::string(cells[c]) + "'", line_no, c + 1);
      row.push_back(*value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no examples");
  const std::size_t n = rows.size();
  const std::size_t d = width - 1;
  std::vector<double> columns(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < d; ++f) columns[f * n + i] = rows[i][f];
  }
  return Dataset(d, std::move(columns), std::move(labels), options.label_map);
}

enum class DataFormat { kAuto, kLibsvm, kCsv };

inline DataFormat ResolveFormat(const std::string& path, DataFormat format) {
  if (format != DataFormat::kAuto) return format;
  const auto dot = path.rfind('.');
  return (dot != std::string::npos && path.substr(dot) == ".csv") ? DataFormat::kCsv : DataFormat::kLibsvm;
}

inline Dataset LoadDataset(const std::string& path, DataFormat format = DataFormat::kAuto,
                           const LoadOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return ResolveFormat(path, format) == DataFormat::kCsv ? ParseCsv(in, options) : ParseLibsvm(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Dataset LoadLibsvm(const std::string& path, const LoadOptions& options = {}) {
  return LoadDataset(path, DataFormat::kLibsvm, options);
}

inline Dataset LoadCsv(const std::string& path, const LoadOptions& options = {}) {
  return LoadDataset(path, DataFormat::kCsv, options);
}

/// Per-feature ascending orderings used by the split scan.
///
/// Besides the order itself every example carries a bin id per feature. In
/// exact mode the bin is the rank of the example's distinct value; with
/// `max_bins` > 0 adjacent distinct values are merged into at most that many
/// quantile bins. The split scan only cuts where the bin changes.
class SortedIndex {
 public:
  SortedIndex() = default;

  std::size_t num_features() const { return orders_.size(); }
  std::size_t num_examples() const { return num_examples_; }
  int max_bins() const { return max_bins_; }

  std::span<const std::uint32_t> order(std::size_t feature) const { return orders_[feature]; }
  std::span<const std::uint32_t> bins(std::size_t feature) const { return bins_[feature]; }
  /// Positions in order(feature) where a new run of equal values starts.
  std::span<const std::uint32_t> run_starts(std::size_t feature) const { return run_starts_[feature]; }

  friend SortedIndex Presort(const Dataset& data, int max_bins);

 private:
  std::size_t num_examples_ = 0;
  int max_bins_ = 0;
  std::vector<std::vector<std::uint32_t>> orders_;
  std::vector<std::vector<std::uint32_t>> bins_;
  std::vector<std::vector<std::uint32_t>> run_starts_;
};

/// Stable per-feature sort; ties keep example order.
inline SortedIndex Presort(const Dataset& data, int max_bins = 0) {
  if (max_bins < 0 || max_bins == 1) throw ConfigError("presort: max_bins must be 0 (exact) or >= 2");
  SortedIndex index;
  const std::size_t n = data.num_examples();
  index.num_examples_ = n;
  index.max_bins_ = max_bins;
  for (std::size_t f = 0; f < data.num_features(); ++f) {
    const auto col = data.column(f);
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });

    std::vector<std::uint32_t> runs;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == 0 || col[order[j]] != col[order[j - 1]]) runs.push_back(static_cast<std::uint32_t>(j));
    }

    // Run r covers [runs[r], runs[r+1]); assign each run to a bin.
    std::vector<std::uint32_t> run_bin(runs.size());
    if (max_bins == 0 || runs.size() <= static_cast<std::size_t>(max_bins)) {
      for (std::size_t r = 0; r < runs.size(); ++r) run_bin[r] = static_cast<std::uint32_t>(r);
    } else {
      const double target = static_cast<double>(n) / max_bins;
      std::uint32_t bin = 0;
      std::size_t filled = 0;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const std::size_t end = r + 1 < runs.size() ? runs[r + 1] : n;
        if (filled > 0 && static_cast<double>(filled) >= target * (bin + 1) &&
            bin + 1 < static_cast<std::uint32_t>(max_bins)) {
          ++bin;
        }
        run_bin[r] = bin;
        filled = end;
      }
    }
    std::vector<std::uint32_t> bins(n);
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const std::size_t end = r + 1 < runs.size() ? runs[r + 1] : n;
      for (std::size_t j = runs[r]; j < end; ++j) bins[order[j]] = run_bin[r];
    }
    index.orders_.push_back(std::move(order));
    index.bins_.push_back(std::move(bins));
    index.run_starts_.push_back(std::move(runs));
  }
  return index;
}

}  // namespace aoso

#endif  // AOSO_DATASET_HPP_
