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

#ifndef AOSO_TREE_BUILDER_HPP_
#define AOSO_TREE_BUILDER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "aoso/dataset.hpp"
#include "aoso/errors.hpp"
#include "aoso/pair_quadratic.hpp"
#include "aoso/tree.hpp"

namespace aoso {

struct TreeConfig {
  /// Maximum number of leaves (J).
  int leaves = 20;
  std::size_t min_node_size = 1;
  PairRule pair_rule = PairRule::kSecondOrder;
  /// Workers for the per-feature split scan; results do not depend on it.
  int threads = 1;
  double eps = kHessianEpsilon;
};

/// How the pair of a node is chosen.
struct AdaptivePair {   // per node, from the node's own statistics
  PairRule rule = PairRule::kSecondOrder;
};
struct FixedPair {      // the same pair for every node of the tree
  ClassPair pair;
};
struct SingleClass {    // diagonal-Hessian scalar tree for one class
  int cls = 0;
};
using NodeObjective = std::variant<AdaptivePair, FixedPair, SingleClass>;

struct SplitCandidate {
  std::uint32_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

struct GrownTree {
  VectorTree tree;
  /// Leaf node index per example id; -1 for examples outside the active set.
  std::vector<std::int32_t> leaf_of;
  /// Sum of the leaves' approximate loss reductions g^2 / 2h.
  double leaf_gain = 0.0;
};

namespace detail {

/// Per-example scalar gradient and Hessian contributions once the pair is
/// fixed: a_i such that g = -sum a_i, and h_i.
inline void PairTerms(int y, std::span<const double> p, ClassPair pair, double& a, double& h) {
  if (pair.s == kNoClass) {
    const double pr = p[pair.r];
    a = (y == pair.r ? 1.0 : 0.0) - pr;
    h = pr * (1.0 - pr);
    return;
  }
  const double pr = p[pair.r];
  const double ps = p[pair.s];
  a = ((y == pair.r ? 1.0 : 0.0) - pr) - ((y == pair.s ? 1.0 : 0.0) - ps);
  h = pr * (1.0 - pr) + ps * (1.0 - ps) + 2.0 * pr * ps;
}

/// g^2 / 2h for g = -sum_a, guarded.
inline double HalfNewtonDecrease(double sum_a, double h, double eps) {
  return h > eps ? sum_a * sum_a / (2.0 * h) : 0.0;
}

struct ScanBest {
  bool found = false;
  std::uint32_t feature = 0;
  std::size_t position = 0;  // last index of the left side within the node range
  double gain = 0.0;
};

/// Walks one feature's node-local order, moving examples from right to left.
inline void ScanFeature(std::uint32_t feature, std::span<const std::uint32_t> ordered,
                        std::span<const std::uint32_t> bins, const double* a, const double* h, double total_a,
                        double total_h, double parent_term, std::size_t min_node, double eps, ScanBest& best) {
  const std::size_t n = ordered.size();
  if (n < 2 * min_node || n < 2) return;
  double left_a = 0.0;
  double left_h = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const std::uint32_t idx = ordered[j];
    left_a += a[idx];
    left_h += h[idx];
    if (bins[idx] == bins[ordered[j + 1]]) continue;
    const std::size_t nl = j + 1;
    if (nl < min_node || n - nl < min_node) continue;
    const double gain = HalfNewtonDecrease(left_a, left_h, eps) +
                        HalfNewtonDecrease(total_a - left_a, total_h - left_h, eps) - parent_term;
    if (!best.found || gain > best.gain) {
      best = {true, feature, j, gain};
    }
  }
}

inline double SplitThreshold(double below, double above) {
  const double mid = std::midpoint(below, above);
  return mid < above ? mid : below;
}

}  // namespace detail

/// Grows vector trees over a fixed dataset, reusing its work buffers.
///
/// Every feature keeps a node-partitioned copy of the global presorted order:
/// a node owns the same range [begin, end) in all of them. Splitting a node is
/// a stable partition of that range, so the orders never need re-sorting.
class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const SortedIndex& index, TreeConfig config)
      : data_(&data), index_(&index), config_(config) {
    if (config.leaves < 2) throw ConfigError("tree: leaves (J) must be >= 2");
    if (config.min_node_size < 1) throw ConfigError("tree: min_node_size must be >= 1");
    if (index.num_examples() != data.num_examples() || index.num_features() != data.num_features()) {
      throw InvalidInput("tree: sorted index does not match dataset");
    }
    const std::size_t n = data.num_examples();
    orders_.assign(data.num_features(), std::vector<std::uint32_t>(n));
    a_.assign(n, 0.0);
    h_.assign(n, 0.0);
    goes_left_.assign(n, 0);
    scratch_.resize(n);
  }

  const TreeConfig& config() const { return config_; }

  /// Best-first growth to at most J leaves. `probs` is the row-major N x K
  /// probability matrix; an empty `active` means all examples.
  GrownTree Grow(std::span<const double> probs, const NodeObjective& objective,
                 std::span<const std::uint32_t> active = {}) {
    const std::size_t n_all = data_->num_examples();
    const int k = data_->num_classes();
    if (probs.size() != n_all * static_cast<std::size_t>(k)) throw InvalidInput("tree: probability matrix shape");
    probs_ = probs;
    objective_ = &objective;
    std::size_t n = n_all;
    if (active.empty()) {
      for (std::size_t f = 0; f < orders_.size(); ++f) {
        std::copy(index_->order(f).begin(), index_->order(f).end(), orders_[f].begin());
      }
    } else {
      std::fill(goes_left_.begin(), goes_left_.end(), 0);
      for (std::uint32_t i : active) {
        if (i >= n_all) throw InvalidInput("tree: active example out of range");
        goes_left_[i] = 1;
      }
      n = static_cast<std::size_t>(std::count(goes_left_.begin(), goes_left_.end(), 1));
      if (n == 0) throw InvalidInput("tree: no active examples");
      for (std::size_t f = 0; f < orders_.size(); ++f) {
        std::copy_if(index_->order(f).begin(), index_->order(f).end(), orders_[f].begin(),
                     [&](std::uint32_t i) { return goes_left_[i] != 0; });
      }
    }
    if (orders_.empty()) {  // no features: the root is the only possible leaf
      root_examples_.clear();
      for (std::uint32_t i = 0; i < n_all; ++i) {
        if (active.empty() || goes_left_[i]) root_examples_.push_back(i);
      }
    }

    GrownTree out;
    std::vector<TreeNode>& nodes = out.tree.mutable_nodes();
    nodes.assign(1, TreeNode{});
    std::vector<Open> open;
    open.push_back(OpenNode(0, 0, n));

    while (static_cast<int>(open.size()) < config_.leaves) {
      std::size_t pick = open.size();
      for (std::size_t o = 0; o < open.size(); ++o) {
        if (!open[o].best || open[o].best->gain <= 0.0) continue;
        if (pick == open.size() || open[o].best->gain > open[pick].best->gain) pick = o;
      }
      if (pick == open.size()) break;
      const Open parent = open[pick];
      const std::size_t mid = Partition(parent);
      const auto left_id = static_cast<std::int32_t>(nodes.size());
      nodes.emplace_back();
      nodes.emplace_back();
      TreeNode& pn = nodes[parent.node];
      pn.is_leaf = false;
      pn.feature = parent.best->feature;
      pn.threshold = parent.best->threshold;
      pn.left = left_id;
      pn.right = left_id + 1;
      pn.pair = parent.pair;
      pn.gain = parent.best->gain;
      // Keep `open` ordered by node id so equal gains resolve to the older node.
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
      open.push_back(OpenNode(left_id, parent.begin, mid));
      open.push_back(OpenNode(left_id + 1, mid, parent.end));
    }

    out.leaf_of.assign(n_all, -1);
    for (const Open& leaf : open) {
      const PairSolution sol = SolvePair(-leaf.sum_a, leaf.sum_h, config_.eps);
      TreeNode& node = nodes[leaf.node];
      node.pair = leaf.pair;
      node.value = sol.step;
      out.leaf_gain += sol.gain;
      for (std::uint32_t i : Examples(leaf.begin, leaf.end)) out.leaf_of[i] = leaf.node;
    }
    return out;
  }

  /// Best split of the examples in [begin, end) for `pair`; exposed for tests
  /// through FindBestSplit below.
  std::optional<SplitCandidate> BestSplitForRange(std::size_t begin, std::size_t end, ClassPair pair) {
    FillTerms(begin, end, pair);
    double sa = 0.0;
    double sh = 0.0;
    for (std::uint32_t i : Examples(begin, end)) {
      sa += a_[i];
      sh += h_[i];
    }
    return ScanAll(begin, end, sa, sh);
  }

  /// Loads an explicit example set as the root range and returns its size.
  std::size_t LoadExamples(std::span<const std::uint32_t> examples) {
    std::fill(goes_left_.begin(), goes_left_.end(), 0);
    for (std::uint32_t i : examples) {
      if (i >= data_->num_examples()) throw InvalidInput("tree: example out of range");
      goes_left_[i] = 1;
    }
    const auto n = static_cast<std::size_t>(std::count(goes_left_.begin(), goes_left_.end(), 1));
    root_examples_.clear();
    for (std::uint32_t i = 0; i < data_->num_examples(); ++i) {
      if (orders_.empty() && goes_left_[i]) root_examples_.push_back(i);
    }
    for (std::size_t f = 0; f < orders_.size(); ++f) {
      std::copy_if(index_->order(f).begin(), index_->order(f).end(), orders_[f].begin(),
                   [&](std::uint32_t i) { return goes_left_[i] != 0; });
    }
    return n;
  }

  void SetProbabilities(std::span<const double> probs) { probs_ = probs; }

 private:
  struct Open {
    std::int32_t node = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
    ClassPair pair;
    double sum_a = 0.0;
    double sum_h = 0.0;
    std::optional<SplitCandidate> best;
  };

  std::span<const std::uint32_t> Examples(std::size_t begin, std::size_t end) const {
    if (orders_.empty()) return std::span<const std::uint32_t>(root_examples_).subspan(begin, end - begin);
    return std::span<const std::uint32_t>(orders_[0]).subspan(begin, end - begin);
  }

  ClassPair ChoosePair(std::size_t begin, std::size_t end) const {
    return std::visit(
        [&](const auto& obj) -> ClassPair {
          using T = std::decay_t<decltype(obj)>;
          if constexpr (std::is_same_v<T, FixedPair>) {
            return obj.pair;
          } else if constexpr (std::is_same_v<T, SingleClass>) {
            return {obj.cls, kNoClass};
          } else {
            const NodeStats stats =
                BuildNodeStats(Examples(begin, end), data_->labels(), probs_, data_->num_classes());
            return SelectPair(stats, obj.rule);
          }
        },
        *objective_);
  }

  void FillTerms(std::size_t begin, std::size_t end, ClassPair pair) {
    const auto k = static_cast<std::size_t>(data_->num_classes());
    const auto labels = data_->labels();
    for (std::uint32_t i : Examples(begin, end)) {
      detail::PairTerms(labels[i], probs_.subspan(i * k, k), pair, a_[i], h_[i]);
    }
  }

  Open OpenNode(std::int32_t node, std::size_t begin, std::size_t end) {
    Open open;
    open.node = node;
    open.begin = begin;
    open.end = end;
    open.pair = ChoosePair(begin, end);
    FillTerms(begin, end, open.pair);
    for (std::uint32_t i : Examples(begin, end)) {
      open.sum_a += a_[i];
      open.sum_h += h_[i];
    }
    open.best = ScanAll(begin, end, open.sum_a, open.sum_h);
    return open;
  }

  std::optional<SplitCandidate> ScanAll(std::size_t begin, std::size_t end, double sum_a, double sum_h) {
    const std::size_t d = orders_.size();
    const std::size_t n = end - begin;
    const double parent_term = detail::HalfNewtonDecrease(sum_a, sum_h, config_.eps);
    auto scan_range = [&](std::size_t f_begin, std::size_t f_end, detail::ScanBest& best) {
      for (std::size_t f = f_begin; f < f_end; ++f) {
        detail::ScanFeature(static_cast<std::uint32_t>(f),
                            std::span<const std::uint32_t>(orders_[f]).subspan(begin, n), index_->bins(f),
                            a_.data(), h_.data(), sum_a, sum_h, parent_term, config_.min_node_size, config_.eps,
                            best);
      }
    };
    detail::ScanBest best;
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(config_.threads, 1)), d);
    if (workers <= 1 || n * d < (1u << 15)) {
      scan_range(0, d, best);
    } else {
      std::vector<detail::ScanBest> partial(workers);
      {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] { scan_range(d * w / workers, d * (w + 1) / workers, partial[w]); });
        }
      }
      for (const auto& p : partial) {  // chunks are in feature order
        if (p.found && (!best.found || p.gain > best.gain)) best = p;
      }
    }
    if (!best.found || !(best.gain > 0.0)) return std::nullopt;
    const auto ordered = std::span<const std::uint32_t>(orders_[best.feature]).subspan(begin, n);
    const auto col = data_->column(best.feature);
    SplitCandidate cand;
    cand.feature = best.feature;
    cand.threshold = detail::SplitThreshold(col[ordered[best.position]], col[ordered[best.position + 1]]);
    cand.gain = best.gain;
    cand.left_count = best.position + 1;
    cand.right_count = n - cand.left_count;
    return cand;
  }

  /// Stable partition of [begin, end) in every feature order; returns the
  /// first position of the right child.
  std::size_t Partition(const Open& node) {
    const auto col = data_->column(node.best->feature);
    for (std::uint32_t i : Examples(node.begin, node.end)) {
      goes_left_[i] = col[i] <= node.best->threshold ? 1 : 0;
    }
    std::size_t mid = node.begin;
    for (auto& order : orders_) {
      std::size_t l = node.begin;
      std::size_t r = 0;
      for (std::size_t j = node.begin; j < node.end; ++j) {
        const std::uint32_t i = order[j];
        if (goes_left_[i]) {
          order[l++] = i;
        } else {
          scratch_[r++] = i;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r), order.begin() + l);
      mid = l;
    }
    if (mid - node.begin != node.best->left_count) {
      throw InternalError("tree: partition disagrees with split scan");
    }
    return mid;
  }

  const Dataset* data_;
  const SortedIndex* index_;
  TreeConfig config_;
  std::span<const double> probs_;
  const NodeObjective* objective_ = nullptr;
  std::vector<std::vector<std::uint32_t>> orders_;
  std::vector<std::uint32_t> root_examples_;
  std::vector<double> a_;
  std::vector<double> h_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::uint32_t> scratch_;
};

/// Best split of `examples` under a fixed `pair`, or nullopt when no legal
/// boundary has positive gain.
inline std::optional<SplitCandidate> FindBestSplit(const Dataset& data, const SortedIndex& index,
                                                   std::span<const double> probs,
                                                   std::span<const std::uint32_t> examples, ClassPair pair,
                                                   const TreeConfig& config = {}) {
  TreeBuilder builder(data, index, config);
  builder.SetProbabilities(probs);
  const std::size_t n = builder.LoadExamples(examples);
  if (n == 0) throw InvalidInput("find best split: no examples");
  return builder.BestSplitForRange(0, n, pair);
}

/// Leaf pair and Newton step from the leaf's own statistics.
inline LeafVector FitLeaf(const NodeStats& stats, PairRule rule, double eps = kHessianEpsilon) {
  const ClassPair pair = SelectPair(stats, rule);
  const PairSolution sol = SolvePair(ScalarGradient(stats, pair), ScalarHessian(stats, pair), eps);
  return {pair, sol.step};
}

inline GrownTree GrowTree(const Dataset& data, const SortedIndex& index, std::span<const double> probs,
                          std::span<const std::uint32_t> active, const NodeObjective& objective,
                          const TreeConfig& config) {
  TreeBuilder builder(data, index, config);
  return builder.Grow(probs, objective, active);
}

}  // namespace aoso

#endif  // AOSO_TREE_BUILDER_HPP_
