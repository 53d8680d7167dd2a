#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fbpstream/core.hpp"
#include "fbpstream/depth.hpp"
#include "fbpstream/fboxplot.hpp"
#include "fbpstream/smoothing.hpp"

namespace fbpstream {

using ClusterId = std::uint64_t;

// sqrt of the trapezoidal integral of (a - b)^2 over the canonical grid.
double l2_distance(const Curve& a, const Curve& b);

// Sum of the five component-wise L2 distances. Both boxplots are compared on
// the canonical grid (alignment by re-indexing), so grid sizes must match.
double fbp_distance(const FunctionalBoxplot& a, const FunctionalBoxplot& b);

struct FbpMicroCluster {
  ClusterId id = 0;
  FunctionalBoxplot centroid;
  std::size_t n_allocated = 0;
  std::size_t last_update = 0;
};

// Minimum centroid distance over unordered pairs; nullopt below two clusters.
std::optional<double> compute_threshold(std::span<const FbpMicroCluster> clusters);

enum class EventKind { create, merge, discard };

const char* event_kind_name(EventKind kind) noexcept;

struct StoreEvent {
  std::size_t timestamp = 0;
  EventKind kind = EventKind::create;
  // create/discard: the cluster concerned. merge: the surviving cluster.
  ClusterId cluster_id = 0;
  // merge: the absorbed cluster; 0 otherwise.
  ClusterId other_id = 0;
  // create: 1. discard: allocations dropped. merge: allocations absorbed.
  std::size_t weight = 0;

  friend bool operator==(const StoreEvent&, const StoreEvent&) = default;
};

struct AllocationOutcome {
  enum class Kind { assigned, created, created_after_evict };

  Kind kind = Kind::created;
  ClusterId id = 0;
  // Set for created_after_evict.
  std::optional<StoreEvent> evicted;
};

struct StoreConfig {
  std::size_t k_max = 50;
  // Staleness age, in windows.
  std::size_t t_star = 50;
  // Expected grid size; 0 adopts the size of the first boxplot.
  std::size_t window_size = 0;
};

// The on-line micro-cluster synopsis. Single writer: allocate() and assign()
// must be called in stream order from one thread.
//
// An incoming boxplot joins its nearest centroid (ties: lowest id) when that
// distance is strictly below the threshold th, otherwise it seeds a new
// cluster. th is the minimum pairwise centroid distance and is recomputed
// after structural changes only (create, merge, discard); until two clusters
// exist it is undefined and every boxplot seeds a cluster. When a creation
// would exceed k_max, evict_or_merge() runs first.
class MicroClusterStore {
 public:
  explicit MicroClusterStore(StoreConfig cfg = {});

  AllocationOutcome allocate(const FunctionalBoxplot& fbp, std::size_t t_now);

  // Adds fbp to cluster `id` unconditionally: running-mean centroid update,
  // n + 1, last_update = t_now.
  void assign(ClusterId id, const FunctionalBoxplot& fbp, std::size_t t_now);

  // Frees one slot: discards the stalest cluster older than t_star if any
  // (ties: lowest id), else merges the closest centroid pair into the lower id.
  StoreEvent evict_or_merge(std::size_t t_now);

  // Sorted by id.
  const std::vector<FbpMicroCluster>& clusters() const noexcept { return clusters_; }
  const FbpMicroCluster* find(ClusterId id) const noexcept;
  std::optional<double> threshold() const noexcept { return threshold_; }
  const std::vector<StoreEvent>& event_log() const noexcept { return events_; }
  const StoreConfig& config() const noexcept { return cfg_; }
  std::size_t window_size() const noexcept { return cfg_.window_size; }
  std::size_t total_allocated() const noexcept;
  std::size_t discarded_weight() const noexcept;

  // CSV: timestamp,event,cluster_id,other_id,weight
  void write_event_log(std::ostream& out) const;

 private:
  void check_time(std::size_t t_now);
  void check_grid(const FunctionalBoxplot& fbp);
  std::size_t index_of(ClusterId id) const;
  void absorb(std::size_t index, const FunctionalBoxplot& fbp, std::size_t t_now);
  void refresh_distances(std::size_t index);
  void erase_at(std::size_t index);
  void recompute_threshold();

  StoreConfig cfg_;
  std::vector<FbpMicroCluster> clusters_;
  // Symmetric centroid distance matrix, parallel to clusters_.
  std::vector<std::vector<double>> distances_;
  std::optional<double> threshold_;
  std::vector<StoreEvent> events_;
  ClusterId next_id_ = 1;
  std::optional<std::size_t> last_time_;
};

struct PipelineConfig {
  SmoothingConfig smoothing;
  DepthKind depth = DepthKind::modified_band;
  FenceConfig fence;
};

// smooth_batch -> build_fbp -> allocate, at t_now = batch.window.index.
AllocationOutcome process_window(MicroClusterStore& store, const StreamBatch& batch,
                                 const PipelineConfig& cfg);

// Same as above, reusing a smoother built for the batch grid.
AllocationOutcome process_window(MicroClusterStore& store, const StreamBatch& batch,
                                 const PipelineConfig& cfg, const SplineSmoother& smoother);

}  // namespace fbpstream
