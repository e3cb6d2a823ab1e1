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

#ifndef AOSO_EVALUATION_HPP_
#define AOSO_EVALUATION_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "aoso/booster.hpp"
#include "aoso/errors.hpp"

namespace aoso {

/// Gaussian approximation to the difference of two binomial error rates
/// measured on the same n test examples.
struct SignificanceResult {
  std::int64_t z1 = 0;
  std::int64_t z2 = 0;
  std::int64_t n = 0;
  double p_hat1 = 0.0;
  double p_hat2 = 0.0;
  double z_stat = 0.0;
  /// One-sided: probability of a gap at least this large in favour of the
  /// second result if both had the same error rate.
  double p_value = 0.5;
};

inline double NormalUpperTail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

inline SignificanceResult SignificanceTest(std::int64_t z1, std::int64_t z2, std::int64_t n) {
  if (n <= 0) throw InvalidInput("significance test: n must be positive");
  if (z1 < 0 || z1 > n || z2 < 0 || z2 > n) throw InvalidInput("significance test: error counts must lie in [0, n]");
  SignificanceResult r{z1, z2, n};
  const double dn = static_cast<double>(n);
  r.p_hat1 = static_cast<double>(z1) / dn;
  r.p_hat2 = static_cast<double>(z2) / dn;
  const double var = r.p_hat1 * (1.0 - r.p_hat1) / dn + r.p_hat2 * (1.0 - r.p_hat2) / dn;
  const double diff = r.p_hat1 - r.p_hat2;
  if (diff == 0.0) {
    r.z_stat = 0.0;
  } else if (var == 0.0) {
    r.z_stat = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  } else {
    r.z_stat = diff / std::sqrt(var);
  }
  r.p_value = NormalUpperTail(r.z_stat);
  return r;
}

struct ErrorSummary {
  std::int64_t errors = 0;
  std::int64_t total = 0;
  double error_rate = 0.0;
  /// confusion[truth][predicted], indexed by position in `classes`.
  std::vector<std::vector<std::int64_t>> confusion;
  std::vector<std::int64_t> classes;
};

/// Compares label sequences. Rows and columns of the confusion matrix are
/// the sorted union of labels seen in either sequence.
inline ErrorSummary SummarizeErrors(std::span<const std::int64_t> predicted, std::span<const std::int64_t> truth) {
  if (predicted.size() != truth.size()) {
    throw InvalidInput("evaluation: " + std::to_string(predicted.size()) + " predictions for " +
                       std::to_string(truth.size()) + " labels");
  }
  ErrorSummary s;
  std::vector<std::int64_t> all(predicted.begin(), predicted.end());
  all.insert(all.end(), truth.begin(), truth.end());
  const LabelMap map = LabelMap::FromLabels(all);
  s.classes.assign(map.values().begin(), map.values().end());
  const auto k = s.classes.size();
  s.confusion.assign(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = map.ClassOf(truth[i]);
    const int p = map.ClassOf(predicted[i]);
    ++s.confusion[t][p];
    if (t != p) ++s.errors;
  }
  s.total = static_cast<std::int64_t>(truth.size());
  s.error_rate = s.total ? static_cast<double>(s.errors) / static_cast<double>(s.total) : 0.0;
  return s;
}

inline constexpr const char* kMetricsHeader = "trees,train_loss,test_errors,test_error_rate,wall_ms";

inline std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void WriteMetricsCsv(std::span<const MetricsRow> rows, std::ostream& out) {
  out << kMetricsHeader << '\n';
  for (const MetricsRow& row : rows) {
    out << row.trees << ',' << FormatDouble(row.train_loss) << ',';
    if (row.test_errors) out << *row.test_errors;
    out << ',';
    if (row.test_error_rate) out << FormatDouble(*row.test_error_rate);
    out << ',' << row.wall_ms << '\n';
  }
}

}  // namespace aoso

#endif  // AOSO_EVALUATION_HPP_
