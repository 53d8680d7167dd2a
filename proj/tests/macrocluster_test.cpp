#include <gtest/gtest.h>

#include <random>

#include "fbpstream/errors.hpp"
#include "fbpstream/macrocluster.hpp"
#include "oracles.hpp"

using namespace fbpstream;

namespace {

struct Problem {
  std::vector<FunctionalBoxplot> inputs;
  std::vector<double> weights;
};

Problem random_problem(std::mt19937_64& rng, std::size_t n, std::size_t w) {
  Problem p;
  std::normal_distribution<double> centre(0.0, 20.0);
  const std::size_t groups = 1 + rng() % 4;
  std::vector<double> shifts(groups);
  for (double& s : shifts) s = centre(rng);
  for (std::size_t i = 0; i < n; ++i) {
    auto f = oracle::random_fbp(rng, w, 2.0, i);
    const Curve shift = Curve::constant(f.grid(), shifts[i % groups]);
    p.inputs.emplace_back(f.envelope_min() + shift, f.box_lower() + shift, f.median() + shift,
                          f.box_upper() + shift, f.envelope_max() + shift, f.window(), 5);
    p.weights.push_back(static_cast<double>(1 + rng() % 9));
  }
  return p;
}

}  // namespace

TEST(MacroCluster, OneClusterPerInput) {
  std::mt19937_64 rng(1);
  const auto p = random_problem(rng, 6, 10);
  const auto s = macro_cluster(p.inputs, p.weights, {6, 0, 100, 1e-6});
  EXPECT_EQ(s.delta, 0.0);
  std::vector<std::size_t> sorted = s.labels;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
}

TEST(MacroCluster, TwoSeparatedGroups) {
  std::vector<FunctionalBoxplot> inputs;
  std::vector<double> weights;
  for (int i = 0; i < 7; ++i) {
    inputs.push_back(oracle::constant_fbp(10, i % 2 == 0 ? 0.0 : 10.0));
    weights.push_back(1.0 + i);
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = macro_cluster(inputs, weights, {2, seed, 100, 1e-6});
    EXPECT_EQ(s.delta, 0.0);
    for (int i = 2; i < 7; ++i) EXPECT_EQ(s.labels[i], s.labels[i % 2]);
    EXPECT_NE(s.labels[0], s.labels[1]);
    EXPECT_EQ(s.macro_weights[s.labels[0]], 1.0 + 3.0 + 5.0 + 7.0);
  }
  EXPECT_NEAR(oracle::best_partition_delta(inputs, weights, 2), 0.0, 1e-12);
}

TEST(MacroCluster, SingleClusterIsTheWeightedMean) {
  const std::vector<FunctionalBoxplot> inputs = {oracle::constant_fbp(10, 0.0),
                                                 oracle::constant_fbp(10, 4.0)};
  const std::vector<double> weights = {3.0, 1.0};
  const auto s = macro_cluster(inputs, weights, {1, 0, 100, 1e-6});
  ASSERT_EQ(s.centroids.size(), 1u);
  for (Component c : kComponents) {
    for (double v : s.centroids[0].component(c).values()) EXPECT_EQ(v, 1.0);
  }
  EXPECT_EQ(s.macro_weights[0], 4.0);
}

TEST(MacroCluster, CriterionNeverIncreases) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 40; ++rep) {
    const auto p = random_problem(rng, 5 + rng() % 30, 12);
    const auto s = macro_cluster(p.inputs, p.weights, {1 + rng() % 4, rng(), 100, 0.0});
    for (std::size_t i = 1; i < s.delta_history.size(); ++i) {
      EXPECT_LE(s.delta_history[i], s.delta_history[i - 1]);
    }
    EXPECT_EQ(s.delta, s.delta_history.back());
    EXPECT_NEAR(heterogeneity(p.inputs, p.weights, s.labels, s.centroids), s.delta, 1e-9);
  }
}

TEST(MacroCluster, CentroidsAreWeightedMeansOfMembers) {
  std::mt19937_64 rng(3);
  const auto p = random_problem(rng, 20, 8);
  const auto s = macro_cluster(p.inputs, p.weights, {3, 5, 100, 1e-6});
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<FunctionalBoxplot> members;
    std::vector<double> w;
    for (std::size_t i = 0; i < p.inputs.size(); ++i) {
      if (s.labels[i] == c) {
        members.push_back(p.inputs[i]);
        w.push_back(p.weights[i]);
      }
    }
    ASSERT_FALSE(members.empty());
    const auto mean = oracle::weighted_mean(members, w);
    for (Component k : kComponents) {
      for (std::size_t t = 0; t < 8; ++t) {
        EXPECT_NEAR(s.centroids[c].component(k)[t], mean.component(k)[t], 1e-9);
      }
    }
  }
}

TEST(MacroCluster, DeterministicForASeed) {
  std::mt19937_64 rng(4);
  const auto p = random_problem(rng, 25, 10);
  const auto a = macro_cluster(p.inputs, p.weights, {4, 9, 100, 1e-6});
  const auto b = macro_cluster(p.inputs, p.weights, {4, 9, 100, 1e-6});
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.delta, b.delta);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_TRUE(a.centroids[c].same_values(b.centroids[c]));
}

TEST(MacroCluster, IntegerWeightScalingKeepsTheSolution) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    auto p = random_problem(rng, 15, 10);
    const auto a = macro_cluster(p.inputs, p.weights, {3, 1, 100, 1e-6});
    for (double& w : p.weights) w *= 4.0;
    const auto b = macro_cluster(p.inputs, p.weights, {3, 1, 100, 1e-6});
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_NEAR(b.delta, 4.0 * a.delta, 1e-9 * (1.0 + b.delta));
  }
}

TEST(MacroCluster, CloseToTheBruteForceOptimum) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 15; ++rep) {
    const std::size_t n = 3 + rng() % 5;
    const std::size_t clusters = 1 + rng() % 3;
    const auto p = random_problem(rng, n, 6);
    const double best = oracle::best_partition_delta(p.inputs, p.weights, clusters);
    const auto s = macro_cluster_restarts(p.inputs, p.weights, {clusters, 0, 100, 1e-6}, 10);
    EXPECT_LE(s.delta, best * 1.05 + 1e-9) << "rep " << rep;
  }
}

TEST(MacroCluster, Errors) {
  const std::vector<FunctionalBoxplot> inputs = {oracle::constant_fbp(10, 0.0),
                                                 oracle::constant_fbp(10, 4.0)};
  const std::vector<double> weights = {1.0, 1.0};
  EXPECT_THROW(macro_cluster(inputs, weights, {3, 0, 100, 1e-6}), ArgumentError);
  EXPECT_THROW(macro_cluster(inputs, weights, {0, 0, 100, 1e-6}), ArgumentError);
  EXPECT_THROW(macro_cluster(inputs, std::vector<double>{1.0, -1.0}, {1, 0, 100, 1e-6}),
               ArgumentError);
  EXPECT_THROW(macro_cluster_restarts(inputs, weights, {1, 0, 100, 1e-6}, 0), ArgumentError);
}

TEST(SummarizeSlot, NoActivityGivesAnEmptySummary) {
  SnapshotCatalog catalog;
  Snapshot s{0, 10, kSnapshotFormatVersion, {SnapshotRecord{1, 3, 0, oracle::constant_fbp(10, 1.0)}}};
  catalog.add(s);
  s.taken_at = 10;
  catalog.add(s);
  const auto summary = summarize_slot(catalog, 0, 10, {});
  EXPECT_TRUE(summary.centroids.empty());
  EXPECT_TRUE(summary.labels.empty());
}

TEST(SummarizeSlot, RecoversPlantedLevels) {
  MicroClusterStore store({20, 1000, 0});
  SnapshotCatalog catalog;
  catalog.add(take_snapshot(store, 0));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> jitter(0.0, 0.05);
  const double levels[] = {0.0, 50.0, 100.0};
  for (std::size_t t = 0; t < 90; ++t) {
    store.allocate(oracle::constant_fbp(10, levels[t % 3] + jitter(rng), t), t);
  }
  catalog.add(take_snapshot(store, 90));
  const auto s = summarize_slot(catalog, 0, 90, {3, 0, 100, 1e-6});
  ASSERT_EQ(s.centroids.size(), 3u);
  std::vector<double> medians;
  for (const auto& c : s.centroids) medians.push_back(c.median()[0]);
  std::sort(medians.begin(), medians.end());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(medians[i], levels[i], 0.5);
  double total = 0.0;
  for (double w : s.macro_weights) total += w;
  EXPECT_EQ(total, 90.0 - store.discarded_weight());
}
