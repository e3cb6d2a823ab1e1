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

#ifndef AOSO_PAIR_QUADRATIC_HPP_
#define AOSO_PAIR_QUADRATIC_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aoso/errors.hpp"

// The two-coordinate node subproblem. A node's second-order loss model
// restricted to t_r = t, t_s = -t is g t + h t^2 / 2 with
//   g = -(gbar_r - gbar_s),
//   h = sum_i p_ir (1 - p_ir) + p_is (1 - p_is) + 2 p_ir p_is,
// minimised at t* = -g / h with loss decrease g^2 / (2h).

namespace aoso {

inline constexpr int kNoClass = -1;

/// Guard on pair Hessians: at or below this the step and gain are zero.
inline constexpr double kHessianEpsilon = 1e-12;

/// Two distinct 0-based classes. `s == kNoClass` marks a single-class
/// update, used only by the diagonal LogitBoost baseline.
struct ClassPair {
  int r = 0;
  int s = 1;

  friend bool operator==(const ClassPair&, const ClassPair&) = default;
};

enum class PairRule { kFirstOrder, kSecondOrder };

struct PairSolution {
  double g = 0.0;
  double h = 0.0;
  double step = 0.0;
  double gain = 0.0;
};

/// Closed-form minimiser of g t + h t^2 / 2.
inline PairSolution SolvePair(double g, double h, double eps = kHessianEpsilon) {
  if (h < 0.0) throw InternalError("negative pair Hessian " + std::to_string(h));
  PairSolution sol{g, h, 0.0, 0.0};
  if (h > eps) {
    sol.step = -g / h;
    sol.gain = g * g / (2.0 * h);
  }
  return sol;
}

/// Aggregate statistics of the examples in a node.
///
/// gbar_k = sum (r_ik - p_ik), psum_k = sum p_ik, psq_k = sum p_ik^2 and,
/// for a single anchor class a, cross_k = sum p_ia p_ik. The anchor row is
/// all the second-order pair rule needs when a = argmax gbar; keeping only
/// that row makes every update O(K).
class NodeStats {
 public:
  explicit NodeStats(int num_classes, int anchor = kNoClass)
      : num_classes_(num_classes),
        anchor_(anchor),
        gbar_(num_classes, 0.0),
        psum_(num_classes, 0.0),
        psq_(num_classes, 0.0),
        cross_(anchor == kNoClass ? 0 : num_classes, 0.0) {
    if (num_classes < 2) throw InvalidInput("node stats: need at least 2 classes");
    if (anchor != kNoClass && (anchor < 0 || anchor >= num_classes)) {
      throw InvalidInput("node stats: anchor class out of range");
    }
  }

  void Add(int y, std::span<const double> p) { Update(y, p, 1.0); ++count_; }

  void Remove(int y, std::span<const double> p) {
    if (count_ == 0) throw InternalError("node stats: remove from empty statistics");
    Update(y, p, -1.0);
    --count_;
  }

  int num_classes() const { return num_classes_; }
  std::size_t count() const { return count_; }
  int anchor() const { return anchor_; }
  std::span<const double> gbar() const { return gbar_; }
  std::span<const double> psum() const { return psum_; }
  std::span<const double> psq() const { return psq_; }
  /// sum_i p_i,anchor * p_ik; empty when no anchor was requested.
  std::span<const double> cross() const { return cross_; }

  /// Pair Hessian h_rr + h_ss - 2 h_rs. One of r, s must be the anchor.
  double PairHessian(int r, int s) const {
    if (anchor_ == kNoClass || (r != anchor_ && s != anchor_)) {
      throw InternalError("node stats: pair Hessian needs the anchor cross row");
    }
    const int other = (r == anchor_) ? s : r;
    const double h = (psum_[r] - psq_[r]) + (psum_[s] - psq_[s]) + 2.0 * cross_[other];
    return std::max(h, 0.0);
  }

 private:
  void Update(int y, std::span<const double> p, double sign) {
    if (static_cast<int>(p.size()) != num_classes_) throw InvalidInput("node stats: probability arity");
    if (y < 0 || y >= num_classes_) throw InvalidInput("node stats: class index out of range");
    const double pa = anchor_ == kNoClass ? 0.0 : p[anchor_];
    for (int k = 0; k < num_classes_; ++k) {
      gbar_[k] += sign * ((k == y ? 1.0 : 0.0) - p[k]);
      psum_[k] += sign * p[k];
      psq_[k] += sign * p[k] * p[k];
      if (anchor_ != kNoClass) cross_[k] += sign * pa * p[k];
    }
  }

  int num_classes_;
  int anchor_;
  std::size_t count_ = 0;
  std::vector<double> gbar_;
  std::vector<double> psum_;
  std::vector<double> psq_;
  std::vector<double> cross_;
};

/// argmax_k gbar_k, lowest index on ties.
inline int AnchorClass(std::span<const double> gbar) {
  return static_cast<int>(std::max_element(gbar.begin(), gbar.end()) - gbar.begin());
}

/// Statistics of `examples` with the anchor set to argmax gbar. Two passes:
/// the anchor is only known once the gradient sums are complete.
inline NodeStats BuildNodeStats(std::span<const std::uint32_t> examples, std::span<const int> labels,
                                std::span<const double> probs, int num_classes) {
  const std::size_t k = static_cast<std::size_t>(num_classes);
  NodeStats plain(num_classes);
  for (std::uint32_t i : examples) plain.Add(labels[i], probs.subspan(i * k, k));
  NodeStats stats(num_classes, AnchorClass(plain.gbar()));
  for (std::uint32_t i : examples) stats.Add(labels[i], probs.subspan(i * k, k));
  return stats;
}

/// Scalar gradient of the pair subproblem.
inline double ScalarGradient(const NodeStats& stats, ClassPair pair) {
  return -(stats.gbar()[pair.r] - stats.gbar()[pair.s]);
}

inline double ScalarHessian(const NodeStats& stats, ClassPair pair) {
  return stats.PairHessian(pair.r, pair.s);
}

/// r = argmax gbar, s = argmin gbar.
inline ClassPair SelectPairFirstOrder(const NodeStats& stats) {
  const auto gbar = stats.gbar();
  const int r = AnchorClass(gbar);
  int s = kNoClass;
  for (int k = 0; k < stats.num_classes(); ++k) {
    if (k == r) continue;
    if (s == kNoClass || gbar[k] < gbar[s]) s = k;
  }
  return {r, s};
}

/// r = argmax gbar, s = argmax_{k != r} (gbar_r - gbar_k)^2 / h(r, k).
/// Candidates whose pair Hessian is at or below eps never win unless every
/// candidate is degenerate, in which case the lowest index is returned.
inline ClassPair SelectPairSecondOrder(const NodeStats& stats, double eps = kHessianEpsilon) {
  const auto gbar = stats.gbar();
  const int r = AnchorClass(gbar);
  if (stats.anchor() != r) {
    throw InternalError("second-order pair rule: statistics anchored at class " +
                        std::to_string(stats.anchor()) + ", expected " + std::to_string(r));
  }
  int s = kNoClass;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < stats.num_classes(); ++k) {
    if (k == r) continue;
    const double den = stats.PairHessian(r, k);
    const double diff = gbar[r] - gbar[k];
    const double score = den > eps ? diff * diff / den : -std::numeric_limits<double>::infinity();
    if (s == kNoClass || score > best) {
      s = k;
      best = score;
    }
  }
  return {r, s};
}

inline ClassPair SelectPair(const NodeStats& stats, PairRule rule) {
  return rule == PairRule::kFirstOrder ? SelectPairFirstOrder(stats) : SelectPairSecondOrder(stats);
}

}  // namespace aoso

#endif  // AOSO_PAIR_QUADRATIC_HPP_
