#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fbpstream/errors.hpp"
#include "fbpstream/stream.hpp"
#include "oracles.hpp"

using namespace fbpstream;

namespace {

FbpMicroCluster cluster_at(ClusterId id, const FunctionalBoxplot& f) { return {id, f, 1, 0}; }

StreamBatch constant_batch(std::size_t index, std::size_t w, std::initializer_list<double> levels) {
  StreamBatch b{Window::at(index, w), {}};
  for (double v : levels) b.raw.emplace_back(w, v);
  return b;
}

}  // namespace

TEST(Distance, IdentityAndClosedForm) {
  std::mt19937_64 rng(1);
  const auto a = oracle::random_fbp(rng, 30);
  EXPECT_EQ(fbp_distance(a, a), 0.0);
  for (double c : {0.5, 1.0, 2.0}) {
    const auto x = oracle::constant_fbp(30, 0.0);
    const auto y = oracle::constant_fbp(30, c);
    EXPECT_NEAR(fbp_distance(x, y), 5.0 * c * std::sqrt(29.0), 1e-9);
  }
}

TEST(Distance, ShiftedRandomBoxplot) {
  std::mt19937_64 rng(6);
  const auto a = oracle::random_fbp(rng, 30);
  const Curve shift = Curve::constant(a.grid(), 2.0);
  const FunctionalBoxplot b(a.envelope_min() + shift, a.box_lower() + shift, a.median() + shift,
                            a.box_upper() + shift, a.envelope_max() + shift, a.window(), 5);
  EXPECT_NEAR(fbp_distance(a, b), 10.0 * std::sqrt(29.0), 1e-9);
}

TEST(Distance, MatchesFineQuadratureOracle) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t w = 2 + rng() % 40;
    const auto a = oracle::random_fbp(rng, w);
    const auto b = oracle::random_fbp(rng, w);
    const double want = oracle::fbp_distance(a, b);
    EXPECT_NEAR(fbp_distance(a, b), want, 1e-6 * want);
  }
}

TEST(Distance, ComparesWindowsByPosition) {
  const auto a = oracle::constant_fbp(30, 1.0, 0);
  const auto b = oracle::constant_fbp(30, 1.0, 17);
  EXPECT_EQ(fbp_distance(a, b), 0.0);
  EXPECT_THROW(fbp_distance(a, oracle::constant_fbp(31, 1.0)), DataError);
}

TEST(Threshold, Examples) {
  EXPECT_FALSE(compute_threshold(std::vector<FbpMicroCluster>{}).has_value());
  const std::vector<FbpMicroCluster> one = {cluster_at(1, oracle::constant_fbp(30, 0.0))};
  EXPECT_FALSE(compute_threshold(one).has_value());

  const std::vector<FbpMicroCluster> two = {cluster_at(1, oracle::constant_fbp(30, 0.0)),
                                            cluster_at(2, oracle::constant_fbp(30, 1.0))};
  EXPECT_NEAR(*compute_threshold(two), 5.0 * std::sqrt(29.0), 1e-9);

  // Constants on a two-point grid: distance = 5 |a - b|, so levels 0, 1, 2.4
  // give pairwise distances 5, 7 and 12.
  const std::vector<FbpMicroCluster> three = {cluster_at(1, oracle::constant_fbp(2, 0.0)),
                                              cluster_at(2, oracle::constant_fbp(2, 1.0)),
                                              cluster_at(3, oracle::constant_fbp(2, 2.4))};
  EXPECT_NEAR(*compute_threshold(three), 5.0 * 1.0, 1e-12);

  const std::vector<FbpMicroCluster> same = {cluster_at(1, oracle::constant_fbp(30, 3.0)),
                                             cluster_at(2, oracle::constant_fbp(30, 3.0))};
  EXPECT_EQ(*compute_threshold(same), 0.0);
}

TEST(Store, BootstrapCreatesTwoClusters) {
  MicroClusterStore store;
  EXPECT_FALSE(store.threshold().has_value());
  const auto first = store.allocate(oracle::constant_fbp(30, 0.0), 0);
  EXPECT_EQ(first.kind, AllocationOutcome::Kind::created);
  EXPECT_EQ(first.id, 1u);
  EXPECT_EQ(store.clusters()[0].n_allocated, 1u);
  // Identical input still seeds a cluster: no threshold exists yet.
  const auto second = store.allocate(oracle::constant_fbp(30, 0.0), 1);
  EXPECT_EQ(second.kind, AllocationOutcome::Kind::created);
  EXPECT_EQ(second.id, 2u);
  EXPECT_EQ(store.clusters().size(), 2u);
  ASSERT_TRUE(store.threshold().has_value());
  EXPECT_EQ(*store.threshold(), 0.0);
}

TEST(Store, IdenticalInputJoinsItsCentroid) {
  MicroClusterStore store;
  const auto a = oracle::constant_fbp(30, 0.0);
  const auto b = oracle::constant_fbp(30, 10.0);
  store.allocate(a, 0);
  store.allocate(b, 1);
  const auto out = store.allocate(a, 2);
  EXPECT_EQ(out.kind, AllocationOutcome::Kind::assigned);
  EXPECT_EQ(out.id, 1u);
  const auto* c = store.find(1);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->n_allocated, 2u);
  EXPECT_EQ(c->last_update, 2u);
  EXPECT_TRUE(c->centroid.same_values(a));
  // Threshold only moves on structural change.
  EXPECT_NEAR(*store.threshold(), 50.0 * std::sqrt(29.0), 1e-9);
}

TEST(Store, FarInputCreatesACluster) {
  MicroClusterStore store;
  store.allocate(oracle::constant_fbp(30, 0.0), 0);
  store.allocate(oracle::constant_fbp(30, 1.0), 1);
  const auto out = store.allocate(oracle::constant_fbp(30, 50.0), 2);
  EXPECT_EQ(out.kind, AllocationOutcome::Kind::created);
  EXPECT_EQ(out.id, 3u);
}

TEST(Store, ThresholdIsStrict) {
  MicroClusterStore store;
  store.allocate(oracle::constant_fbp(30, 0.0), 0);
  store.allocate(oracle::constant_fbp(30, 2.0), 1);
  // Exactly th away from cluster 2 (and farther from cluster 1).
  const auto out = store.allocate(oracle::constant_fbp(30, 4.0), 2);
  EXPECT_EQ(out.kind, AllocationOutcome::Kind::created);
}

TEST(Store, NearestTieGoesToLowestId) {
  MicroClusterStore store;
  store.allocate(oracle::constant_fbp(30, 0.0), 0);
  store.allocate(oracle::constant_fbp(30, 100.0), 1);
  const auto out = store.allocate(oracle::constant_fbp(30, 50.0), 2);
  EXPECT_EQ(out.kind, AllocationOutcome::Kind::assigned);
  EXPECT_EQ(out.id, 1u);
}

TEST(Store, StaleClusterIsDiscarded) {
  MicroClusterStore store({10, 5, 0});
  store.allocate(oracle::constant_fbp(10, 0.0), 0);
  store.allocate(oracle::constant_fbp(10, 100.0), 5);
  const auto ev = store.evict_or_merge(6);
  EXPECT_EQ(ev.kind, EventKind::discard);
  EXPECT_EQ(ev.cluster_id, 1u);
  EXPECT_EQ(ev.weight, 1u);
  EXPECT_EQ(store.clusters().size(), 1u);
  EXPECT_FALSE(store.threshold().has_value());
  EXPECT_EQ(store.discarded_weight(), 1u);
}

TEST(Store, AgeEqualToTStarIsNotStale) {
  MicroClusterStore store({10, 5, 0});
  store.allocate(oracle::constant_fbp(10, 0.0), 0);
  store.allocate(oracle::constant_fbp(10, 100.0), 1);
  EXPECT_EQ(store.evict_or_merge(5).kind, EventKind::merge);
}

TEST(Store, StalestClusterGoesFirst) {
  MicroClusterStore store({10, 5, 0});
  store.allocate(oracle::constant_fbp(10, 0.0), 0);
  store.allocate(oracle::constant_fbp(10, 100.0), 1);
  store.allocate(oracle::constant_fbp(10, 300.0), 2);
  store.assign(2, oracle::constant_fbp(10, 100.0), 3);
  store.assign(1, oracle::constant_fbp(10, 0.0), 4);
  store.assign(3, oracle::constant_fbp(10, 300.0), 10);
  // Ages at t=20: 16, 17, 10.
  const auto ev = store.evict_or_merge(20);
  EXPECT_EQ(ev.kind, EventKind::discard);
  EXPECT_EQ(ev.cluster_id, 2u);
  EXPECT_EQ(ev.weight, 2u);
}

TEST(Store, MergeTakesTheWeightedMean) {
  MicroClusterStore store({10, 50, 0});
  store.allocate(oracle::constant_fbp(10, 0.0), 0);
  store.allocate(oracle::constant_fbp(10, 4.0), 1);
  store.assign(1, oracle::constant_fbp(10, 0.0), 2);
  store.assign(1, oracle::constant_fbp(10, 0.0), 3);
  store.allocate(oracle::constant_fbp(10, 100.0), 4);
  // Clusters: 1 = const 0 (n=3), 2 = const 4 (n=1), 3 = const 100 (n=1).
  const auto ev = store.evict_or_merge(5);
  EXPECT_EQ(ev.kind, EventKind::merge);
  EXPECT_EQ(ev.cluster_id, 1u);
  EXPECT_EQ(ev.other_id, 2u);
  EXPECT_EQ(ev.weight, 1u);
  const auto* merged = store.find(1);
  ASSERT_NE(merged, nullptr);
  EXPECT_EQ(merged->n_allocated, 4u);
  EXPECT_EQ(merged->last_update, 3u);
  for (Component c : kComponents) {
    for (double v : merged->centroid.component(c).values()) EXPECT_EQ(v, 1.0);
  }
  EXPECT_EQ(store.find(2), nullptr);
  EXPECT_NEAR(*store.threshold(), 5.0 * 99.0 * 3.0, 1e-9);
}

TEST(Store, OverflowFreesASlotFirst) {
  MicroClusterStore store({2, 50, 0});
  store.allocate(oracle::constant_fbp(10, 0.0), 0);
  store.allocate(oracle::constant_fbp(10, 1.0), 1);
  const auto out = store.allocate(oracle::constant_fbp(10, 50.0), 2);
  EXPECT_EQ(out.kind, AllocationOutcome::Kind::created_after_evict);
  ASSERT_TRUE(out.evicted.has_value());
  EXPECT_EQ(out.evicted->kind, EventKind::merge);
  EXPECT_EQ(store.clusters().size(), 2u);
  EXPECT_EQ(store.total_allocated(), 3u);
}

TEST(Store, Errors) {
  const StoreConfig tiny{1, 5, 0};
  const StoreConfig ageless{5, 0, 0};
  EXPECT_THROW(MicroClusterStore{tiny}, ConfigError);
  EXPECT_THROW(MicroClusterStore{ageless}, ConfigError);
  MicroClusterStore store({5, 5, 10});
  EXPECT_THROW(store.allocate(oracle::constant_fbp(11, 0.0), 0), DataError);
  store.allocate(oracle::constant_fbp(10, 0.0), 3);
  EXPECT_THROW(store.allocate(oracle::constant_fbp(10, 0.0), 3), ArgumentError);
  EXPECT_THROW(store.assign(9, oracle::constant_fbp(10, 0.0), 4), ArgumentError);
  EXPECT_THROW(store.evict_or_merge(5), ArgumentError);
}

TEST(Store, ConservationAndCapacity) {
  std::mt19937_64 rng(12);
  for (std::size_t k_max : {2u, 3u, 7u}) {
    MicroClusterStore store({k_max, 6, 0});
    for (std::size_t t = 0; t < 300; ++t) {
      const double scale = 1.0 + static_cast<double>(rng() % 4);
      store.allocate(oracle::random_fbp(rng, 12, scale, t), t);
      EXPECT_LE(store.clusters().size(), k_max);
      EXPECT_EQ(store.total_allocated() + store.discarded_weight(), t + 1);
    }
  }
}

TEST(Store, EventLogCsv) {
  MicroClusterStore store({2, 50, 0});
  store.allocate(oracle::constant_fbp(10, 0.0), 0);
  store.allocate(oracle::constant_fbp(10, 1.0), 1);
  store.allocate(oracle::constant_fbp(10, 50.0), 2);
  std::ostringstream csv;
  store.write_event_log(csv);
  EXPECT_EQ(csv.str(),
            "timestamp,event,cluster_id,other_id,weight\n"
            "0,create,1,0,1\n"
            "1,create,2,0,1\n"
            "2,merge,1,2,1\n"
            "2,create,3,0,1\n");
}

TEST(ProcessWindow, ThreeConstantStreams) {
  MicroClusterStore store;
  const PipelineConfig cfg;
  const auto out = process_window(store, constant_batch(0, 30, {0.0, 1.0, 2.0}), cfg);
  EXPECT_EQ(out.kind, AllocationOutcome::Kind::created);
  for (double v : store.clusters()[0].centroid.median().values()) EXPECT_NEAR(v, 1.0, 1e-12);

  const auto again = process_window(store, constant_batch(1, 30, {0.0, 1.0, 2.0}), cfg);
  EXPECT_EQ(again.kind, AllocationOutcome::Kind::created);
  EXPECT_EQ(store.clusters().size(), 2u);
  EXPECT_NEAR(*store.threshold(), 0.0, 1e-9);
}

TEST(ProcessWindow, ConservationWithoutDiscards) {
  MicroClusterStore store({50, 1000, 0});
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t windows = 60;
  for (std::size_t j = 0; j < windows; ++j) {
    StreamBatch b{Window::at(j, 20), {}};
    for (int i = 0; i < 9; ++i) {
      std::vector<double> row(20);
      for (double& v : row) v = g(rng) + (j % 3) * 10.0;
      b.raw.push_back(row);
    }
    process_window(store, b, {});
  }
  EXPECT_EQ(store.discarded_weight(), 0u);
  EXPECT_EQ(store.total_allocated(), windows);
}

TEST(ProcessWindow, ErrorsAreReported) {
  MicroClusterStore store;
  StreamBatch bad = constant_batch(0, 10, {0.0, 1.0});
  bad.raw[1][3] = NAN;
  EXPECT_THROW(process_window(store, bad, {}), DataError);
  EXPECT_THROW(process_window(store, constant_batch(0, 1, {0.0}), {}), ConfigError);
}
