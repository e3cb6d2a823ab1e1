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

#ifndef AOSO_TREE_HPP_
#define AOSO_TREE_HPP_

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aoso/errors.hpp"
#include "aoso/pair_quadratic.hpp"

namespace aoso {

/// One node of a vector tree. Internal nodes route x[feature] <= threshold
/// to `left`. Every node carries the class pair used for it: the split-gain
/// pair for internal nodes, the update pair for leaves. A leaf's vector is
/// +value at pair.r and -value at pair.s (nothing at s when s == kNoClass).
struct TreeNode {
  bool is_leaf = true;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  ClassPair pair;
  double value = 0.0;
  /// Approximate loss reduction of the split (internal nodes only).
  double gain = 0.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary tree stored flat, root at index 0.
class VectorTree {
 public:
  VectorTree() : nodes_(1) {}
  explicit VectorTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) { Validate(); }

  std::span<const TreeNode> nodes() const { return nodes_; }
  std::vector<TreeNode>& mutable_nodes() { return nodes_; }

  std::size_t leaf_count() const {
    std::size_t n = 0;
    for (const auto& node : nodes_) n += node.is_leaf ? 1 : 0;
    return n;
  }

  /// Index of the leaf reached by an example; `x(f)` returns feature f.
  template <typename FeatureFn>
    requires std::invocable<FeatureFn&, std::uint32_t>
  std::int32_t LeafIndex(FeatureFn&& x) const {
    std::int32_t at = 0;
    while (!nodes_[at].is_leaf) {
      const TreeNode& node = nodes_[at];
      at = x(node.feature) <= node.threshold ? node.left : node.right;
    }
    return at;
  }

  std::int32_t LeafIndex(std::span<const double> x) const {
    return LeafIndex([&](std::uint32_t f) { return f < x.size() ? x[f] : 0.0; });
  }

  /// Largest feature index referenced plus one.
  std::size_t RequiredArity() const {
    std::size_t arity = 0;
    for (const auto& node : nodes_) {
      if (!node.is_leaf) arity = std::max<std::size_t>(arity, node.feature + 1);
    }
    return arity;
  }

  /// Structural checks: children in range, every node reachable once.
  void Validate() const {
    if (nodes_.empty()) throw InvalidInput("tree: no nodes");
    std::vector<int> seen(nodes_.size(), 0);
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
      const std::int32_t at = stack.back();
      stack.pop_back();
      if (at < 0 || static_cast<std::size_t>(at) >= nodes_.size()) throw InvalidInput("tree: child out of range");
      if (seen[at]++) throw InvalidInput("tree: node reachable twice");
      if (!nodes_[at].is_leaf) {
        stack.push_back(nodes_[at].left);
        stack.push_back(nodes_[at].right);
      }
    }
    for (int s : seen) {
      if (!s) throw InvalidInput("tree: unreachable node");
    }
  }

  friend bool operator==(const VectorTree&, const VectorTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// scores += scale * (leaf vector).
inline void AddLeafVector(const TreeNode& leaf, double scale, std::span<double> scores) {
  const double delta = scale * leaf.value;
  scores[leaf.pair.r] += delta;
  if (leaf.pair.s != kNoClass) scores[leaf.pair.s] -= delta;
}

struct LeafVector {
  ClassPair pair;
  double value = 0.0;
};

/// The sparse vector of the leaf `x` falls into.
inline LeafVector EvaluateTree(const VectorTree& tree, std::span<const double> x) {
  const TreeNode& leaf = tree.nodes()[tree.LeafIndex(x)];
  return {leaf.pair, leaf.value};
}

}  // namespace aoso

#endif  // AOSO_TREE_HPP_
