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

#ifndef AOSO_BOOSTER_HPP_
#define AOSO_BOOSTER_HPP_

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aoso/dataset.hpp"
#include "aoso/errors.hpp"
#include "aoso/numerics.hpp"
#include "aoso/pair_quadratic.hpp"
#include "aoso/tree.hpp"
#include "aoso/tree_builder.hpp"

namespace aoso {

enum class Algorithm { kAoso, kAbc, kLogitBoost };
enum class AbcBaseRule { kExhaustive, kWorstClass };
enum class StopReason { kNone, kMaxIterations, kConverged, kNoProgress };

inline std::string_view ToString(Algorithm a) {
  switch (a) {
    case Algorithm::kAoso: return "aoso";
    case Algorithm::kAbc: return "abc";
    case Algorithm::kLogitBoost: return "logitboost";
  }
  return "?";
}

inline Algorithm ParseAlgorithm(std::string_view s) {
  if (s == "aoso") return Algorithm::kAoso;
  if (s == "abc") return Algorithm::kAbc;
  if (s == "logitboost") return Algorithm::kLogitBoost;
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

inline std::string_view ToString(PairRule r) { return r == PairRule::kFirstOrder ? "first" : "second"; }

inline PairRule ParsePairRule(std::string_view s) {
  if (s == "first") return PairRule::kFirstOrder;
  if (s == "second") return PairRule::kSecondOrder;
  throw ConfigError("unknown pair rule '" + std::string(s) + "'");
}

inline std::string_view ToString(AbcBaseRule r) { return r == AbcBaseRule::kExhaustive ? "exhaustive" : "worst"; }

inline AbcBaseRule ParseAbcBaseRule(std::string_view s) {
  if (s == "exhaustive") return AbcBaseRule::kExhaustive;
  if (s == "worst") return AbcBaseRule::kWorstClass;
  throw ConfigError("unknown ABC base rule '" + std::string(s) + "'");
}

inline std::string_view ToString(StopReason r) {
  switch (r) {
    case StopReason::kNone: return "none";
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kConverged: return "converged";
    case StopReason::kNoProgress: return "no_progress";
  }
  return "?";
}

inline StopReason ParseStopReason(std::string_view s) {
  for (StopReason r : {StopReason::kNone, StopReason::kMaxIterations, StopReason::kConverged, StopReason::kNoProgress}) {
    if (ToString(r) == s) return r;
  }
  throw InvalidInput("unknown stop reason '" + std::string(s) + "'");
}

struct TrainConfig {
  Algorithm algorithm = Algorithm::kAoso;
  int leaves = 20;
  double shrinkage = 0.1;
  /// Boosting iterations M. One tree per iteration for AOSO, K-1 for ABC,
  /// K for LogitBoost.
  std::int64_t max_iterations = 10000;
  PairRule pair_rule = PairRule::kSecondOrder;
  AbcBaseRule abc_base_rule = AbcBaseRule::kExhaustive;
  double stop_eps = 1e-16;
  std::size_t min_node_size = 1;
  std::int64_t eval_every = 50;
  std::uint64_t seed = 0;
  /// 0 = exact split search; otherwise at most this many bins per feature.
  int bins = 0;
  int threads = 1;

  void Validate() const {
    if (leaves < 2) throw ConfigError("leaves (J) must be >= 2");
    if (!(shrinkage > 0.0 && shrinkage <= 1.0)) throw ConfigError("shrinkage must be in (0, 1]");
    if (max_iterations < 1) throw ConfigError("max iterations (M) must be >= 1");
    if (!(stop_eps >= 0.0)) throw ConfigError("stop_eps must be >= 0");
    if (min_node_size < 1) throw ConfigError("min node size must be >= 1");
    if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
    if (bins < 0 || bins == 1) throw ConfigError("bins must be 0 (exact) or >= 2");
    if (threads < 1) throw ConfigError("threads must be >= 1");
  }

  TreeConfig tree_config() const {
    TreeConfig tc;
    tc.leaves = leaves;
    tc.min_node_size = min_node_size;
    tc.pair_rule = pair_rule;
    tc.threads = threads;
    return tc;
  }
};

/// Trees added per boosting iteration.
inline std::int64_t TreesPerIteration(Algorithm a, int num_classes) {
  switch (a) {
    case Algorithm::kAoso: return 1;
    case Algorithm::kAbc: return num_classes - 1;
    case Algorithm::kLogitBoost: return num_classes;
  }
  return 1;
}

/// Iteration budget giving `a` the same maximum number of trees as ABC run
/// for `abc_iterations` iterations, i.e. (K - 1) * M_ABC trees.
inline std::int64_t TreeEqualIterations(Algorithm a, int num_classes, std::int64_t abc_iterations) {
  const std::int64_t trees = (num_classes - 1) * abc_iterations;
  return std::max<std::int64_t>(1, trees / TreesPerIteration(a, num_classes));
}

struct MetricsRow {
  std::int64_t trees = 0;
  double train_loss = 0.0;
  std::optional<std::int64_t> test_errors;
  std::optional<double> test_error_rate;
  std::int64_t wall_ms = 0;
};

struct BoostState {
  int num_classes = 0;
  /// Row-major N x K scores F and probabilities P.
  std::vector<double> scores;
  std::vector<double> probs;
  std::int64_t iterations = 0;
  std::int64_t trees_built = 0;
  double train_loss = 0.0;
  /// Training loss and tree count after every committed iteration; entry 0
  /// is the initial state.
  std::vector<double> loss_trace;
  std::vector<std::int64_t> trees_trace;
  /// Sampled every eval_every trees, plus the final state.
  std::vector<MetricsRow> loss_history;
  std::vector<double> iteration_ms;
  StopReason stop_reason = StopReason::kNone;
};

struct Model {
  Algorithm algorithm = Algorithm::kAoso;
  int num_classes = 0;
  std::size_t num_features = 0;
  LabelMap label_map;
  TrainConfig config;
  std::vector<VectorTree> trees;
  /// ABC only: 0-based base class of every iteration.
  std::vector<int> base_classes;
  std::int64_t iterations = 0;
  double train_loss = 0.0;
  StopReason stop_reason = StopReason::kNone;

  double shrinkage() const { return config.shrinkage; }
};

/// Observation points used by tests and the CLI progress output.
struct TrainHooks {
  /// Called every time the probability matrix is recomputed from the scores.
  std::function<void(const BoostState&)> on_probabilities;
  /// Called for every tree grown, including ABC candidates that are discarded.
  std::function<void(const GrownTree&)> on_tree_grown;
  /// Called after every committed iteration.
  std::function<void(const BoostState&)> on_iteration;
};

inline bool ShouldStop(const BoostState& state, const TrainConfig& config) {
  return state.train_loss <= config.stop_eps || state.iterations >= config.max_iterations;
}

/// Tree count at which the training loss first reaches `target`.
inline std::optional<std::int64_t> TreesToReachLoss(const BoostState& state, double target) {
  for (std::size_t i = 0; i < state.loss_trace.size(); ++i) {
    if (state.loss_trace[i] <= target) return state.trees_trace[i];
  }
  return std::nullopt;
}

namespace detail {

inline void ApplyGrownTree(const GrownTree& grown, double shrinkage, int num_classes, std::span<double> scores) {
  const auto k = static_cast<std::size_t>(num_classes);
  const auto nodes = grown.tree.nodes();
  for (std::size_t i = 0; i < grown.leaf_of.size(); ++i) {
    if (grown.leaf_of[i] < 0) continue;
    AddLeafVector(nodes[grown.leaf_of[i]], shrinkage, scores.subspan(i * k, k));
  }
}

inline void RefreshProbabilities(std::span<const double> scores, std::span<double> probs, int num_classes) {
  const auto k = static_cast<std::size_t>(num_classes);
  for (std::size_t i = 0; i < scores.size() / k; ++i) LinkInto(scores.subspan(i * k, k), probs.subspan(i * k, k));
}

inline int ArgmaxClass(std::span<const double> scores) {
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

/// Shared bookkeeping of the three training loops.
class BoostRun {
 public:
  BoostRun(const Dataset& train, const TrainConfig& config, const Dataset* test, const TrainHooks& hooks)
      : train_(train),
        config_(Validated(config)),
        test_(test),
        hooks_(hooks),
        index_(Presort(train, config.bins)),
        builder_(train, index_, config.tree_config()),
        start_(std::chrono::steady_clock::now()) {
    if (train.num_classes() < 2) throw InvalidInput("training data needs at least 2 classes");
    if (test && test->num_features() != train.num_features()) {
      throw InvalidInput("test set has " + std::to_string(test->num_features()) + " features, training set " +
                         std::to_string(train.num_features()));
    }
    if (test && !(test->label_map() == train.label_map())) {
      throw InvalidInput("test set must use the training set's label map");
    }
    const std::size_t nk = train.num_examples() * static_cast<std::size_t>(train.num_classes());
    state_.num_classes = train.num_classes();
    state_.scores.assign(nk, 0.0);
    state_.probs.assign(nk, 0.0);
    state_.train_loss = TotalLoss(train.labels(), state_.scores, state_.num_classes);
    state_.loss_trace.push_back(state_.train_loss);
    state_.trees_trace.push_back(0);
    if (test_) test_scores_.assign(test_->num_examples() * static_cast<std::size_t>(train.num_classes()), 0.0);
    model_.algorithm = config.algorithm;
    model_.num_classes = train.num_classes();
    model_.num_features = train.num_features();
    model_.label_map = train.label_map();
    model_.config = config;
    Record();
    last_iteration_ = std::chrono::steady_clock::now();
  }

  BoostState& state() { return state_; }
  const Dataset& train() const { return train_; }
  const TrainConfig& config() const { return config_; }
  const TrainHooks& hooks() const { return hooks_; }
  Model& model() { return model_; }
  int num_classes() const { return state_.num_classes; }

  bool Done() {
    if (state_.train_loss <= config_.stop_eps) {
      state_.stop_reason = StopReason::kConverged;
      return true;
    }
    if (state_.iterations >= config_.max_iterations) {
      state_.stop_reason = StopReason::kMaxIterations;
      return true;
    }
    return false;
  }

  void RefreshProbabilities() {
    detail::RefreshProbabilities(state_.scores, state_.probs, state_.num_classes);
    if (hooks_.on_probabilities) hooks_.on_probabilities(state_);
  }

  GrownTree Grow(const NodeObjective& objective) {
    GrownTree grown = builder_.Grow(state_.probs, objective);
    if (hooks_.on_tree_grown) hooks_.on_tree_grown(grown);
    return grown;
  }

  /// Commits the trees of one iteration; `scores` already includes them.
  void Commit(std::vector<GrownTree>&& trees, std::vector<double>&& scores, double loss) {
    for (GrownTree& g : trees) {
      if (test_) ApplyToTest(g.tree);
      model_.trees.push_back(std::move(g.tree));
    }
    state_.scores = std::move(scores);
    state_.train_loss = loss;
    state_.iterations += 1;
    state_.trees_built += static_cast<std::int64_t>(trees.size());
    state_.loss_trace.push_back(loss);
    state_.trees_trace.push_back(state_.trees_built);
    const auto now = std::chrono::steady_clock::now();
    state_.iteration_ms.push_back(std::chrono::duration<double, std::milli>(now - last_iteration_).count());
    last_iteration_ = now;
    const std::int64_t every = config_.eval_every;
    if (state_.trees_built / every != last_recorded_trees_ / every) Record();
    if (hooks_.on_iteration) hooks_.on_iteration(state_);
  }

  double LossOf(std::span<const double> scores) const {
    return TotalLoss(train_.labels(), scores, state_.num_classes);
  }

  std::pair<Model, BoostState> Finish() {
    if (state_.loss_history.back().trees != state_.trees_built) Record();
    detail::RefreshProbabilities(state_.scores, state_.probs, state_.num_classes);
    model_.iterations = state_.iterations;
    model_.train_loss = state_.train_loss;
    model_.stop_reason = state_.stop_reason;
    return {std::move(model_), std::move(state_)};
  }

 private:
  static const TrainConfig& Validated(const TrainConfig& config) {
    config.Validate();
    return config;
  }

  void ApplyToTest(const VectorTree& tree) {
    const auto k = static_cast<std::size_t>(state_.num_classes);
    for (std::size_t i = 0; i < test_->num_examples(); ++i) {
      const auto leaf = tree.LeafIndex([&](std::uint32_t f) { return test_->value(i, f); });
      AddLeafVector(tree.nodes()[leaf], config_.shrinkage, std::span<double>(test_scores_).subspan(i * k, k));
    }
  }

  void Record() {
    MetricsRow row;
    row.trees = state_.trees_built;
    row.train_loss = state_.train_loss;
    if (test_) {
      const auto k = static_cast<std::size_t>(state_.num_classes);
      std::int64_t errors = 0;
      for (std::size_t i = 0; i < test_->num_examples(); ++i) {
        if (ArgmaxClass(std::span<const double>(test_scores_).subspan(i * k, k)) != test_->labels()[i]) ++errors;
      }
      row.test_errors = errors;
      row.test_error_rate = static_cast<double>(errors) / static_cast<double>(test_->num_examples());
    }
    row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_)
                      .count();
    state_.loss_history.push_back(row);
    last_recorded_trees_ = state_.trees_built;
  }

  const Dataset& train_;
  TrainConfig config_;
  const Dataset* test_;
  const TrainHooks& hooks_;
  SortedIndex index_;
  TreeBuilder builder_;
  BoostState state_;
  Model model_;
  std::vector<double> test_scores_;
  std::int64_t last_recorded_trees_ = 0;
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point last_iteration_;
};

}  // namespace detail

/// AOSO-LogitBoost: one vector tree per iteration, class pair chosen per node.
inline std::pair<Model, BoostState> TrainAoso(const Dataset& train, TrainConfig config, const Dataset* test = nullptr,
                                              const TrainHooks& hooks = {}) {
  config.algorithm = Algorithm::kAoso;
  detail::BoostRun run(train, config, test, hooks);
  const NodeObjective objective = AdaptivePair{config.pair_rule};
  while (!run.Done()) {
    run.RefreshProbabilities();
    GrownTree grown = run.Grow(objective);
    if (!(grown.leaf_gain > 0.0)) {
      run.state().stop_reason = StopReason::kNoProgress;
      break;
    }
    std::vector<double> scores = run.state().scores;
    detail::ApplyGrownTree(grown, config.shrinkage, run.num_classes(), scores);
    const double loss = run.LossOf(scores);
    std::vector<GrownTree> trees;
    trees.push_back(std::move(grown));
    run.Commit(std::move(trees), std::move(scores), loss);
  }
  return run.Finish();
}

namespace detail {

/// Per-class share of the training loss: sum of losses of examples of class k.
inline std::vector<double> ClassLosses(const Dataset& train, std::span<const double> scores) {
  const int k = train.num_classes();
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < train.num_examples(); ++i) {
    const int y = train.labels()[i];
    acc[y].Add(SampleLoss(y, scores.subspan(i * k, k)));
  }
  std::vector<double> out;
  for (const auto& a : acc) out.push_back(static_cast<double>(a.Value()));
  return out;
}

}  // namespace detail

/// ABC-LogitBoost: K-1 scalar trees per iteration, tree k fitted with the
/// pair (k, b) at every node, all against the iteration-start probabilities.
inline std::pair<Model, BoostState> TrainAbc(const Dataset& train, TrainConfig config, const Dataset* test = nullptr,
                                             const TrainHooks& hooks = {}) {
  config.algorithm = Algorithm::kAbc;
  detail::BoostRun run(train, config, test, hooks);
  const int num_classes = run.num_classes();
  while (!run.Done()) {
    std::vector<int> bases;
    if (config.abc_base_rule == AbcBaseRule::kExhaustive) {
      for (int b = 0; b < num_classes; ++b) bases.push_back(b);
    } else {
      const auto losses = detail::ClassLosses(train, run.state().scores);
      bases.push_back(static_cast<int>(std::max_element(losses.begin(), losses.end()) - losses.begin()));
    }
    run.RefreshProbabilities();

    int best_base = -1;
    double best_loss = 0.0;
    double best_gain = 0.0;
    std::vector<GrownTree> best_trees;
    std::vector<double> best_scores;
    for (int b : bases) {
      std::vector<GrownTree> trees;
      std::vector<double> scores = run.state().scores;
      double gain = 0.0;
      for (int k = 0; k < num_classes; ++k) {
        if (k == b) continue;
        trees.push_back(run.Grow(FixedPair{{k, b}}));
        gain += trees.back().leaf_gain;
        detail::ApplyGrownTree(trees.back(), config.shrinkage, num_classes, scores);
      }
      const double loss = run.LossOf(scores);
      if (best_base < 0 || loss < best_loss) {
        best_base = b;
        best_loss = loss;
        best_gain = gain;
        best_trees = std::move(trees);
        best_scores = std::move(scores);
      }
    }
    if (!(best_gain > 0.0)) {
      run.state().stop_reason = StopReason::kNoProgress;
      break;
    }
    run.model().base_classes.push_back(best_base);
    run.Commit(std::move(best_trees), std::move(best_scores), best_loss);
  }
  return run.Finish();
}

/// Friedman's LogitBoost with the diagonal Hessian: K independent scalar
/// trees per iteration, no sum-to-zero coupling.
inline std::pair<Model, BoostState> TrainLogitBoost(const Dataset& train, TrainConfig config,
                                                    const Dataset* test = nullptr, const TrainHooks& hooks = {}) {
  config.algorithm = Algorithm::kLogitBoost;
  detail::BoostRun run(train, config, test, hooks);
  const int num_classes = run.num_classes();
  while (!run.Done()) {
    run.RefreshProbabilities();
    std::vector<GrownTree> trees;
    std::vector<double> scores = run.state().scores;
    double gain = 0.0;
    for (int k = 0; k < num_classes; ++k) {
      trees.push_back(run.Grow(SingleClass{k}));
      gain += trees.back().leaf_gain;
      detail::ApplyGrownTree(trees.back(), config.shrinkage, num_classes, scores);
    }
    if (!(gain > 0.0)) {
      run.state().stop_reason = StopReason::kNoProgress;
      break;
    }
    const double loss = run.LossOf(scores);
    run.Commit(std::move(trees), std::move(scores), loss);
  }
  return run.Finish();
}

inline std::pair<Model, BoostState> Train(const Dataset& train, const TrainConfig& config,
                                          const Dataset* test = nullptr, const TrainHooks& hooks = {}) {
  switch (config.algorithm) {
    case Algorithm::kAoso: return TrainAoso(train, config, test, hooks);
    case Algorithm::kAbc: return TrainAbc(train, config, test, hooks);
    case Algorithm::kLogitBoost: return TrainLogitBoost(train, config, test, hooks);
  }
  throw ConfigError("unknown algorithm");
}

/// Accumulated scores F(x) = v * sum of leaf vectors, replayed in tree order.
inline std::vector<double> PredictScores(const Model& model, std::span<const double> x) {
  if (x.size() != model.num_features) {
    throw InvalidInput("example has " + std::to_string(x.size()) + " features, model expects " +
                       std::to_string(model.num_features));
  }
  std::vector<double> scores(static_cast<std::size_t>(model.num_classes), 0.0);
  for (const VectorTree& tree : model.trees) {
    AddLeafVector(tree.nodes()[tree.LeafIndex(x)], model.config.shrinkage, scores);
  }
  return scores;
}

/// Row-major N x K scores for a whole dataset.
inline std::vector<double> PredictScores(const Model& model, const Dataset& data) {
  if (data.num_features() != model.num_features) {
    throw InvalidInput("dataset has " + std::to_string(data.num_features()) + " features, model expects " +
                       std::to_string(model.num_features));
  }
  const auto k = static_cast<std::size_t>(model.num_classes);
  std::vector<double> scores(data.num_examples() * k, 0.0);
  for (const VectorTree& tree : model.trees) {
    for (std::size_t i = 0; i < data.num_examples(); ++i) {
      const auto leaf = tree.LeafIndex([&](std::uint32_t f) { return data.value(i, f); });
      AddLeafVector(tree.nodes()[leaf], model.config.shrinkage, std::span<double>(scores).subspan(i * k, k));
    }
  }
  return scores;
}

/// 0-based class with the largest score, lowest index on ties.
inline int PredictClass(const Model& model, std::span<const double> x) {
  return detail::ArgmaxClass(PredictScores(model, x));
}

/// Original data-file label of the predicted class.
inline std::int64_t PredictLabel(const Model& model, std::span<const double> x) {
  return model.label_map.LabelOf(PredictClass(model, x));
}

inline std::vector<double> PredictProba(const Model& model, std::span<const double> x) {
  return Link(PredictScores(model, x));
}

/// Number of examples whose predicted class differs from their label.
inline std::int64_t CountErrors(const Model& model, const Dataset& data) {
  const auto scores = PredictScores(model, data);
  const auto k = static_cast<std::size_t>(model.num_classes);
  std::int64_t errors = 0;
  for (std::size_t i = 0; i < data.num_examples(); ++i) {
    if (detail::ArgmaxClass(std::span<const double>(scores).subspan(i * k, k)) != data.labels()[i]) ++errors;
  }
  return errors;
}

}  // namespace aoso

#endif  // AOSO_BOOSTER_HPP_
