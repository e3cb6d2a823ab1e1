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

#ifndef AOSO_NUMERICS_HPP_
#define AOSO_NUMERICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aoso/errors.hpp"

// Probability link, logit loss and the per-example derivatives of the loss.
// Class indices are 0-based here; the 1-based labels of the file formats are
// translated in dataset.hpp.

namespace aoso {

/// Probabilities at or below this value are clamped inside log() when
/// reporting loss. Never applied to gradients or Hessians.
inline constexpr double kLossProbabilityFloor = 1e-15;

/// Neumaier-compensated accumulator in the widest native float type.
class CompensatedSum {
 public:
  void Add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double Value() const { return sum_ + compensation_; }

 private:
  long double sum_ = 0.0L;
  long double compensation_ = 0.0L;
};

/// Softmax of `scores` written to `probs`, stabilised by subtracting the max.
inline void LinkInto(std::span<const double> scores, std::span<double> probs) {
  if (scores.size() < 2) throw InvalidInput("link: need at least 2 classes");
  if (probs.size() != scores.size()) throw InvalidInput("link: output size mismatch");
  double top = scores[0];
  for (double f : scores) {
    if (!std::isfinite(f)) throw InvalidInput("link: non-finite score");
    top = std::max(top, f);
  }
  double denom = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    probs[k] = std::exp(scores[k] - top);
    denom += probs[k];
  }
  for (double& p : probs) p /= denom;
}

inline std::vector<double> Link(std::span<const double> scores) {
  std::vector<double> probs(scores.size());
  LinkInto(scores, probs);
  return probs;
}

/// -log p_y with p = Link(scores).
inline double SampleLoss(int y, std::span<const double> scores) {
  if (y < 0 || static_cast<std::size_t>(y) >= scores.size()) {
    throw InvalidInput("sample loss: class index " + std::to_string(y) + " out of range");
  }
  double top = scores[0];
  for (double f : scores) {
    if (!std::isfinite(f)) throw InvalidInput("sample loss: non-finite score");
    top = std::max(top, f);
  }
  double denom = 0.0;
  for (double f : scores) denom += std::exp(f - top);
  const double p = std::exp(scores[y] - top) / denom;
  return -std::log(std::max(p, kLossProbabilityFloor));
}

/// Sum of SampleLoss over a row-major N x K score matrix.
inline double TotalLoss(std::span<const int> labels, std::span<const double> scores,
                        int num_classes) {
  const std::size_t k = static_cast<std::size_t>(num_classes);
  if (scores.size() != labels.size() * k) throw InvalidInput("total loss: score matrix shape");
  CompensatedSum acc;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    acc.Add(SampleLoss(labels[i], scores.subspan(i * k, k)));
  }
  return static_cast<double>(acc.Value());
}

/// g_k = r_k - p_k where r is the one-hot encoding of y.
inline std::vector<double> SampleGradient(int y, std::span<const double> probs) {
  if (y < 0 || static_cast<std::size_t>(y) >= probs.size()) {
    throw InvalidInput("sample gradient: class index out of range");
  }
  std::vector<double> g(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    g[k] = (static_cast<int>(k) == y ? 1.0 : 0.0) - probs[k];
  }
  return g;
}

/// diag(p) - p p^T, row-major K x K.
inline std::vector<double> SampleHessian(std::span<const double> probs) {
  const std::size_t k = probs.size();
  std::vector<double> h(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      h[a * k + b] = (a == b ? probs[a] : 0.0) - probs[a] * probs[b];
    }
  }
  return h;
}

}  // namespace aoso

#endif  // AOSO_NUMERICS_HPP_
