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

#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "aoso/booster.hpp"
#include "aoso/model_io.hpp"
#include "test_util.hpp"

namespace aoso {
namespace {

Dataset TwoExampleFixture() { return Dataset(1, {1.0, 2.0}, {1, 2}); }

TrainConfig SmallConfig(Algorithm a, std::int64_t m, int leaves = 4, double v = 0.1) {
  TrainConfig c;
  c.algorithm = a;
  c.max_iterations = m;
  c.leaves = leaves;
  c.shrinkage = v;
  c.eval_every = 5;
  return c;
}

TEST(TrainAoso, TwoExampleFixtureOneTree) {
  const Dataset d = TwoExampleFixture();
  TrainConfig c = SmallConfig(Algorithm::kAoso, 1, 2, 1.0);
  auto [model, state] = TrainAoso(d, c);
  ASSERT_EQ(model.trees.size(), 1u);
  EXPECT_NEAR(state.scores[0], 1.0, 1e-12);
  EXPECT_NEAR(state.scores[1], -1.0, 1e-12);
  EXPECT_NEAR(state.scores[2], -1.0, 1e-12);
  EXPECT_NEAR(state.scores[3], 1.0, 1e-12);
  // Oracle: both examples sit at margin 2 under the two-class link.
  const double sigma2 = 1.0 / (1.0 + std::exp(-2.0));
  EXPECT_NEAR(state.loss_trace[0], 2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(state.train_loss, -2.0 * std::log(sigma2), 1e-9);
  EXPECT_EQ(state.stop_reason, StopReason::kMaxIterations);
}

TEST(TrainAoso, RejectsZeroIterations) {
  TrainConfig c = SmallConfig(Algorithm::kAoso, 0);
  EXPECT_THROW(TrainAoso(TwoExampleFixture(), c), ConfigError);
}

TEST(TrainConfig, ValidationErrors) {
  TrainConfig ok;
  EXPECT_NO_THROW(ok.Validate());
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    EXPECT_THROW(c.Validate(), ConfigError);
  };
  bad([](TrainConfig& c) { c.shrinkage = 0.0; });
  bad([](TrainConfig& c) { c.shrinkage = 1.5; });
  bad([](TrainConfig& c) { c.leaves = 1; });
  bad([](TrainConfig& c) { c.max_iterations = 0; });
  bad([](TrainConfig& c) { c.bins = 1; });
  bad([](TrainConfig& c) { c.eval_every = 0; });
  bad([](TrainConfig& c) { c.threads = 0; });
  bad([](TrainConfig& c) { c.min_node_size = 0; });
}

TEST(TrainAoso, AlreadyConvergedGivesZeroTrees) {
  TrainConfig c = SmallConfig(Algorithm::kAoso, 1);
  c.stop_eps = 10.0;
  auto [model, state] = TrainAoso(TwoExampleFixture(), c);
  EXPECT_TRUE(model.trees.empty());
  EXPECT_EQ(state.trees_built, 0);
  EXPECT_EQ(state.stop_reason, StopReason::kConverged);
}

TEST(TrainAoso, NoProgressStopsOnDegenerateData) {
  // Identical rows and balanced classes: the root gradient is zero.
  const Dataset d(1, {1.0, 1.0}, {1, 2});
  auto [model, state] = TrainAoso(d, SmallConfig(Algorithm::kAoso, 100));
  EXPECT_TRUE(model.trees.empty());
  EXPECT_EQ(state.stop_reason, StopReason::kNoProgress);
}

TEST(TrainAoso, RejectsSingleClassData) {
  const Dataset d(1, {1.0, 2.0}, {3, 3});
  EXPECT_THROW(TrainAoso(d, SmallConfig(Algorithm::kAoso, 5)), InvalidInput);
}

TEST(TrainAoso, ConvergesOnSeparableData) {
  const Dataset d = TwoExampleFixture();
  TrainConfig c = SmallConfig(Algorithm::kAoso, 100000, 2, 1.0);
  auto [model, state] = TrainAoso(d, c);
  EXPECT_NE(state.stop_reason, StopReason::kMaxIterations);
  EXPECT_LT(state.train_loss, 1e-9);
}

TEST(Training, ShouldStop) {
  TrainConfig c;
  c.max_iterations = 10;
  BoostState s;
  s.train_loss = 0.0;
  EXPECT_TRUE(ShouldStop(s, c));
  s.train_loss = 1.0;
  s.iterations = 10;
  EXPECT_TRUE(ShouldStop(s, c));
  s.iterations = 9;
  EXPECT_FALSE(ShouldStop(s, c));
}

TEST(Training, TreeEqualBudgets) {
  EXPECT_EQ(TreeEqualIterations(Algorithm::kAoso, 10, 5000), 45000);
  EXPECT_EQ(TreeEqualIterations(Algorithm::kAbc, 10, 5000), 5000);
  EXPECT_EQ(TreesPerIteration(Algorithm::kAbc, 10) * 5000, TreesPerIteration(Algorithm::kAoso, 10) * 45000);
  EXPECT_EQ(TreesPerIteration(Algorithm::kLogitBoost, 10), 10);
  EXPECT_EQ(TreeEqualIterations(Algorithm::kLogitBoost, 10, 5000), 4500);
}

TEST(Training, LossNonIncreasingForSmallShrinkage) {
  std::mt19937_64 rng(40);
  const Dataset d = testing::LearnableDataset(rng, 300, 4, 4);
  for (Algorithm a : {Algorithm::kAoso, Algorithm::kAbc, Algorithm::kLogitBoost}) {
    for (AbcBaseRule rule : {AbcBaseRule::kExhaustive, AbcBaseRule::kWorstClass}) {
      TrainConfig c = SmallConfig(a, 40, 6, 0.1);
      c.abc_base_rule = rule;
      auto [model, state] = Train(d, c);
      ASSERT_GT(state.loss_trace.size(), 10u);
      for (std::size_t i = 1; i < state.loss_trace.size(); ++i) {
        EXPECT_LE(state.loss_trace[i], state.loss_trace[i - 1]) << ToString(a) << " iteration " << i;
      }
      EXPECT_EQ(static_cast<std::int64_t>(model.trees.size()), state.trees_built);
      EXPECT_LE(state.iterations, c.max_iterations);
    }
  }
}

TEST(Training, StateInvariants) {
  std::mt19937_64 rng(41);
  const Dataset d = testing::LearnableDataset(rng, 200, 3, 5);
  for (Algorithm a : {Algorithm::kAoso, Algorithm::kAbc}) {
    auto [model, state] = Train(d, SmallConfig(a, 20, 5, 0.3));
    const std::size_t k = 5;
    for (std::size_t i = 0; i < d.num_examples(); ++i) {
      const auto row = std::span<const double>(state.scores).subspan(i * k, k);
      double sum = 0.0, top = 0.0;
      for (double f : row) {
        sum += f;
        top = std::max(top, std::abs(f));
      }
      EXPECT_LE(std::abs(sum), 1e-6 * (1.0 + top));
      const auto p = Link(row);
      for (std::size_t c = 0; c < k; ++c) EXPECT_NEAR(state.probs[i * k + c], p[c], 1e-15);
    }
  }
}

TEST(TrainAbc, TwoClassesMatchAoso) {
  std::mt19937_64 rng(42);
  const Dataset d = testing::LearnableDataset(rng, 250, 3, 2);
  auto [aoso_model, aoso] = TrainAoso(d, SmallConfig(Algorithm::kAoso, 30, 6));
  auto [abc_model, abc] = TrainAbc(d, SmallConfig(Algorithm::kAbc, 30, 6));
  ASSERT_EQ(aoso.loss_trace.size(), abc.loss_trace.size());
  for (std::size_t i = 0; i < aoso.loss_trace.size(); ++i) {
    EXPECT_NEAR(aoso.loss_trace[i], abc.loss_trace[i], 1e-9);
  }
  EXPECT_EQ(aoso.trees_built, abc.trees_built);
}

TEST(TrainAbc, ExhaustiveGrowsAllCandidates) {
  std::mt19937_64 rng(43);
  const Dataset d = testing::LearnableDataset(rng, 150, 3, 4);
  std::int64_t grown = 0;
  std::int64_t refreshes = 0;
  TrainHooks hooks;
  hooks.on_tree_grown = [&](const GrownTree&) { ++grown; };
  hooks.on_probabilities = [&](const BoostState&) { ++refreshes; };
  auto [model, state] = TrainAbc(d, SmallConfig(Algorithm::kAbc, 6), nullptr, hooks);
  ASSERT_EQ(state.iterations, 6);
  EXPECT_EQ(grown, 6 * 4 * 3);
  EXPECT_EQ(state.trees_built, 6 * 3);
  EXPECT_EQ(model.trees.size(), 18u);
  EXPECT_EQ(model.base_classes.size(), 6u);
  EXPECT_EQ(refreshes, 6);  // once per iteration, not per tree
}

TEST(TrainAbc, WorstClassGrowsOneGroup) {
  std::mt19937_64 rng(44);
  const Dataset d = testing::LearnableDataset(rng, 150, 3, 4);
  std::int64_t grown = 0;
  TrainHooks hooks;
  hooks.on_tree_grown = [&](const GrownTree&) { ++grown; };
  TrainConfig c = SmallConfig(Algorithm::kAbc, 5);
  c.abc_base_rule = AbcBaseRule::kWorstClass;
  auto [model, state] = TrainAbc(d, c, nullptr, hooks);
  EXPECT_EQ(grown, 5 * 3);
  // Base = class with the largest loss share at the iteration start.
  std::vector<double> scores(d.num_examples() * 4, 0.0);
  auto [m1, s1] = TrainAbc(d, [&] { auto one = c; one.max_iterations = 1; return one; }());
  const auto losses = detail::ClassLosses(d, scores);
  EXPECT_EQ(m1.base_classes[0], std::max_element(losses.begin(), losses.end()) - losses.begin());
}

TEST(TrainAbc, CommittedBaseMinimisesLoss) {
  std::mt19937_64 rng(45);
  const Dataset d = testing::LearnableDataset(rng, 120, 3, 3);
  const TrainConfig c = SmallConfig(Algorithm::kAbc, 5, 5, 0.5);
  std::vector<std::vector<double>> starts;
  TrainHooks hooks;
  hooks.on_probabilities = [&](const BoostState& s) { starts.push_back(s.scores); };
  auto [model, state] = TrainAbc(d, c, nullptr, hooks);
  ASSERT_EQ(starts.size(), model.base_classes.size());

  // External oracle: try every base from the recorded iteration-start scores.
  const SortedIndex idx = Presort(d);
  for (std::size_t it = 0; it < starts.size(); ++it) {
    std::vector<double> probs(starts[it].size());
    detail::RefreshProbabilities(starts[it], probs, 3);
    int best = -1;
    double best_loss = 0.0;
    for (int b = 0; b < 3; ++b) {
      auto scores = starts[it];
      for (int k = 0; k < 3; ++k) {
        if (k == b) continue;
        const GrownTree g = GrowTree(d, idx, probs, {}, FixedPair{{k, b}}, c.tree_config());
        detail::ApplyGrownTree(g, c.shrinkage, 3, scores);
      }
      const double loss = TotalLoss(d.labels(), scores, 3);
      if (best < 0 || loss < best_loss) {
        best = b;
        best_loss = loss;
      }
    }
    EXPECT_EQ(model.base_classes[it], best) << "iteration " << it;
    EXPECT_NEAR(state.loss_trace[it + 1], best_loss, 1e-12);
  }
}

TEST(TrainAoso, ProbabilitiesRefreshedPerTree) {
  std::mt19937_64 rng(46);
  const Dataset d = testing::LearnableDataset(rng, 150, 3, 4);
  std::int64_t refreshes = 0;
  TrainHooks hooks;
  hooks.on_probabilities = [&](const BoostState&) { ++refreshes; };
  auto [model, state] = TrainAoso(d, SmallConfig(Algorithm::kAoso, 12), nullptr, hooks);
  EXPECT_EQ(state.trees_built, 12);
  EXPECT_EQ(refreshes, 12);
}

TEST(TrainLogitBoost, SingleExampleLeafValue) {
  const Dataset d(1, {0.0}, {0}, LabelMap::FromValues({0, 1, 2}));
  auto [model, state] = TrainLogitBoost(d, SmallConfig(Algorithm::kLogitBoost, 1, 2, 1.0));
  ASSERT_EQ(model.trees.size(), 3u);
  EXPECT_NEAR(model.trees[0].nodes()[0].value, 3.0, 1e-12);  // -g/h with g = -2/3, h = 2/9
  EXPECT_NEAR(model.trees[1].nodes()[0].value, -1.5, 1e-12);
  EXPECT_EQ(model.trees[0].nodes()[0].pair, (ClassPair{0, kNoClass}));
}

TEST(TrainLogitBoost, MirroredTreesOnSymmetricFixture) {
  auto [model, state] = TrainLogitBoost(TwoExampleFixture(), SmallConfig(Algorithm::kLogitBoost, 1, 2, 1.0));
  ASSERT_EQ(model.trees.size(), 2u);
  const auto a = model.trees[0].nodes();
  const auto b = model.trees[1].nodes();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!a[j].is_leaf) continue;
    EXPECT_NEAR(a[j].value, -b[j].value, 1e-12);
    EXPECT_NEAR(std::abs(a[j].value), 2.0, 1e-12);
  }
}

TEST(Predict, ZeroTreeModel) {
  Model m;
  m.num_classes = 3;
  m.num_features = 2;
  m.label_map = LabelMap::FromValues({1, 2, 3});
  const std::vector<double> x{0.5, 1.0};
  EXPECT_EQ(PredictClass(m, x), 0);
  EXPECT_EQ(PredictLabel(m, x), 1);
  for (double p : PredictProba(m, x)) EXPECT_NEAR(p, 1.0 / 3, 1e-15);
  EXPECT_THROW(PredictScores(m, std::vector<double>{1.0}), InvalidInput);
}

TEST(Predict, TwoExampleFixture) {
  auto [model, state] = TrainAoso(TwoExampleFixture(), SmallConfig(Algorithm::kAoso, 1, 2, 1.0));
  EXPECT_EQ(PredictLabel(model, std::vector<double>{1.0}), 1);
  EXPECT_EQ(PredictLabel(model, std::vector<double>{2.0}), 2);
}

TEST(Predict, ReplaysTrainingScores) {
  std::mt19937_64 rng(47);
  const Dataset d = testing::LearnableDataset(rng, 200, 4, 4);
  for (Algorithm a : {Algorithm::kAoso, Algorithm::kAbc, Algorithm::kLogitBoost}) {
    auto [model, state] = Train(d, SmallConfig(a, 15, 6, 0.2));
    std::stringstream buf;
    WriteModel(model, buf);
    const Model loaded = ReadModel(buf);
    for (const Model* m : std::array<const Model*, 2>{&model, &loaded}) {
      const auto scores = PredictScores(*m, d);
      ASSERT_EQ(scores.size(), state.scores.size());
      for (std::size_t j = 0; j < scores.size(); ++j) EXPECT_NEAR(scores[j], state.scores[j], 1e-9);
    }
    for (std::size_t i = 0; i < d.num_examples(); ++i) {
      const auto f = PredictScores(model, d.Row(i));
      const auto p = Link(f);
      EXPECT_EQ(detail::ArgmaxClass(f), detail::ArgmaxClass(p));
    }
  }
}

TEST(Training, TestMetricsTracked) {
  std::mt19937_64 rng(48);
  const Dataset train = testing::LearnableDataset(rng, 200, 3, 3);
  const Dataset test = testing::LearnableDataset(rng, 100, 3, 3);
  TrainConfig c = SmallConfig(Algorithm::kAoso, 23);
  auto [model, state] = TrainAoso(train, c, &test);
  ASSERT_FALSE(state.loss_history.empty());
  EXPECT_EQ(state.loss_history.front().trees, 0);
  EXPECT_EQ(state.loss_history.back().trees, 23);
  EXPECT_EQ(state.loss_history.size(), 6u);  // 0, 5, 10, 15, 20, 23
  EXPECT_EQ(state.loss_history.back().test_errors.value(), CountErrors(model, test));
  EXPECT_EQ(state.iteration_ms.size(), 23u);
}

TEST(Training, RejectsMismatchedTestSet) {
  const Dataset train = TwoExampleFixture();
  const Dataset wide(2, {1, 2, 3, 4}, {1, 2});
  EXPECT_THROW(TrainAoso(train, SmallConfig(Algorithm::kAoso, 1), &wide), InvalidInput);
}

TEST(Training, BinnedModeTrains) {
  std::mt19937_64 rng(49);
  const Dataset d = testing::LearnableDataset(rng, 300, 3, 3);
  TrainConfig c = SmallConfig(Algorithm::kAoso, 30, 8, 0.2);
  c.bins = 4;
  auto [model, state] = TrainAoso(d, c);
  EXPECT_LT(state.train_loss, state.loss_trace.front());
}

TEST(Training, TreesToReachLoss) {
  BoostState s;
  s.loss_trace = {10.0, 5.0, 2.0, 1.0};
  s.trees_trace = {0, 9, 18, 27};
  EXPECT_EQ(TreesToReachLoss(s, 2.0), 18);
  EXPECT_EQ(TreesToReachLoss(s, 100.0), 0);
  EXPECT_FALSE(TreesToReachLoss(s, 0.5).has_value());
}

TEST(Enums, RoundTripStrings) {
  for (Algorithm a : {Algorithm::kAoso, Algorithm::kAbc, Algorithm::kLogitBoost}) {
    EXPECT_EQ(ParseAlgorithm(ToString(a)), a);
  }
  for (StopReason r :
       {StopReason::kNone, StopReason::kMaxIterations, StopReason::kConverged, StopReason::kNoProgress}) {
    EXPECT_EQ(ParseStopReason(ToString(r)), r);
  }
  EXPECT_EQ(ParsePairRule("first"), PairRule::kFirstOrder);
  EXPECT_EQ(ParseAbcBaseRule("worst"), AbcBaseRule::kWorstClass);
  EXPECT_THROW(ParseAlgorithm("mart"), ConfigError);
}

}  // namespace
}  // namespace aoso
