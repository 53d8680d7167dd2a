#include "fbpstream/stream.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "fbpstream/errors.hpp"

namespace fbpstream {

double l2_distance(const Curve& a, const Curve& b) {
  if (a.size() != b.size()) {
    throw DataError("cannot compare curves of " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()) + " points");
  }
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  // Unit step trapezoid: half weight on both end points.
  double sum = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double d = a[t] - b[t];
    const double w = (t == 0 || t + 1 == n) ? 0.5 : 1.0;
    sum += w * d * d;
  }
  return std::sqrt(sum);
}

double fbp_distance(const FunctionalBoxplot& a, const FunctionalBoxplot& b) {
  double total = 0.0;
  for (Component c : kComponents) total += l2_distance(a.component(c), b.component(c));
  return total;
}

std::optional<double> compute_threshold(std::span<const FbpMicroCluster> clusters) {
  if (clusters.size() < 2) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    for (std::size_t k = j + 1; k < clusters.size(); ++k) {
      best = std::min(best, fbp_distance(clusters[j].centroid, clusters[k].centroid));
    }
  }
  return best;
}

const char* event_kind_name(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::create:
      return "create";
    case EventKind::merge:
      return "merge";
    case EventKind::discard:
      return "discard";
  }
  return "?";
}

MicroClusterStore::MicroClusterStore(StoreConfig cfg) : cfg_(cfg) {
  if (cfg_.k_max < 2) {
    throw ConfigError("k_max must be at least 2, got " + std::to_string(cfg_.k_max));
  }
  if (cfg_.t_star == 0) {
    throw ConfigError("staleness age t_star must be positive");
  }
}

const FbpMicroCluster* MicroClusterStore::find(ClusterId id) const noexcept {
  for (const auto& c : clusters_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::size_t MicroClusterStore::total_allocated() const noexcept {
  std::size_t total = 0;
  for (const auto& c : clusters_) total += c.n_allocated;
  return total;
}

std::size_t MicroClusterStore::discarded_weight() const noexcept {
  std::size_t total = 0;
  for (const auto& e : events_) {
    if (e.kind == EventKind::discard) total += e.weight;
  }
  return total;
}

void MicroClusterStore::check_time(std::size_t t_now) {
  if (last_time_ && t_now <= *last_time_) {
    throw ArgumentError("window timestamps must be strictly increasing (got " +
                        std::to_string(t_now) + " after " + std::to_string(*last_time_) + ")");
  }
  last_time_ = t_now;
}

void MicroClusterStore::check_grid(const FunctionalBoxplot& fbp) {
  if (cfg_.window_size == 0) cfg_.window_size = fbp.grid().size();
  if (fbp.grid().size() != cfg_.window_size) {
    throw DataError("boxplot has " + std::to_string(fbp.grid().size()) +
                    " grid points, store expects " + std::to_string(cfg_.window_size));
  }
}

std::size_t MicroClusterStore::index_of(ClusterId id) const {
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    if (clusters_[i].id == id) return i;
  }
  throw ArgumentError("no micro-cluster with id " + std::to_string(id));
}

void MicroClusterStore::refresh_distances(std::size_t index) {
  for (std::size_t k = 0; k < clusters_.size(); ++k) {
    const double d =
        k == index ? 0.0 : fbp_distance(clusters_[index].centroid, clusters_[k].centroid);
    distances_[index][k] = d;
    distances_[k][index] = d;
  }
}

void MicroClusterStore::erase_at(std::size_t index) {
  clusters_.erase(clusters_.begin() + static_cast<std::ptrdiff_t>(index));
  distances_.erase(distances_.begin() + static_cast<std::ptrdiff_t>(index));
  for (auto& row : distances_) row.erase(row.begin() + static_cast<std::ptrdiff_t>(index));
}

void MicroClusterStore::recompute_threshold() {
  if (clusters_.size() < 2) {
    threshold_.reset();
    return;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < clusters_.size(); ++j) {
    for (std::size_t k = j + 1; k < clusters_.size(); ++k) best = std::min(best, distances_[j][k]);
  }
  threshold_ = best;
}

void MicroClusterStore::assign(ClusterId id, const FunctionalBoxplot& fbp, std::size_t t_now) {
  check_grid(fbp);
  const std::size_t index = index_of(id);
  check_time(t_now);
  absorb(index, fbp, t_now);
}

void MicroClusterStore::absorb(std::size_t index, const FunctionalBoxplot& fbp, std::size_t t_now) {
  // Running mean c + (f - c) / (n + 1).
  auto& cluster = clusters_[index];
  const FunctionalBoxplot pair[] = {cluster.centroid, fbp};
  const double weights[] = {static_cast<double>(cluster.n_allocated), 1.0};
  cluster.centroid = mean_fbp(pair, weights);
  cluster.n_allocated += 1;
  cluster.last_update = t_now;
  refresh_distances(index);
}

StoreEvent MicroClusterStore::evict_or_merge(std::size_t t_now) {
  if (clusters_.size() < 2) {
    throw ArgumentError("evict_or_merge needs at least two micro-clusters");
  }

  std::optional<std::size_t> stalest;
  std::size_t stalest_age = 0;
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    const std::size_t last = clusters_[i].last_update;
    const std::size_t age = t_now > last ? t_now - last : 0;
    if (age > cfg_.t_star && (!stalest || age > stalest_age)) {
      stalest = i;
      stalest_age = age;
    }
  }

  StoreEvent event;
  event.timestamp = t_now;
  if (stalest) {
    event.kind = EventKind::discard;
    event.cluster_id = clusters_[*stalest].id;
    event.weight = clusters_[*stalest].n_allocated;
    erase_at(*stalest);
  } else {
    std::size_t best_j = 0, best_k = 1;
    for (std::size_t j = 0; j < clusters_.size(); ++j) {
      for (std::size_t k = j + 1; k < clusters_.size(); ++k) {
        if (distances_[j][k] < distances_[best_j][best_k]) {
          best_j = j;
          best_k = k;
        }
      }
    }
    auto& keep = clusters_[best_j];
    const auto& gone = clusters_[best_k];
    const FunctionalBoxplot pair[] = {keep.centroid, gone.centroid};
    const double weights[] = {static_cast<double>(keep.n_allocated),
                              static_cast<double>(gone.n_allocated)};
    event.kind = EventKind::merge;
    event.cluster_id = keep.id;
    event.other_id = gone.id;
    event.weight = gone.n_allocated;
    keep.centroid = mean_fbp(pair, weights);
    keep.n_allocated += gone.n_allocated;
    keep.last_update = std::max(keep.last_update, gone.last_update);
    erase_at(best_k);
    refresh_distances(best_j);
  }
  events_.push_back(event);
  recompute_threshold();
  return event;
}

AllocationOutcome MicroClusterStore::allocate(const FunctionalBoxplot& fbp, std::size_t t_now) {
  check_grid(fbp);
  check_time(t_now);

  if (threshold_) {
    std::size_t nearest = 0;
    double nearest_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
      const double d = fbp_distance(fbp, clusters_[i].centroid);
      if (d < nearest_distance) {
        nearest_distance = d;
        nearest = i;
      }
    }
    if (nearest_distance < *threshold_) {
      absorb(nearest, fbp, t_now);
      return {AllocationOutcome::Kind::assigned, clusters_[nearest].id, std::nullopt};
    }
  }

  AllocationOutcome outcome;
  outcome.kind = AllocationOutcome::Kind::created;
  if (clusters_.size() >= cfg_.k_max) {
    outcome.kind = AllocationOutcome::Kind::created_after_evict;
    outcome.evicted = evict_or_merge(t_now);
  }

  outcome.id = next_id_++;
  clusters_.push_back(FbpMicroCluster{outcome.id, fbp, 1, t_now});
  for (auto& row : distances_) row.push_back(0.0);
  distances_.emplace_back(clusters_.size(), 0.0);
  refresh_distances(clusters_.size() - 1);
  events_.push_back(StoreEvent{t_now, EventKind::create, outcome.id, 0, 1});
  recompute_threshold();
  return outcome;
}

void MicroClusterStore::write_event_log(std::ostream& out) const {
  out << "timestamp,event,cluster_id,other_id,weight\n";
  for (const auto& e : events_) {
    out << e.timestamp << ',' << event_kind_name(e.kind) << ',' << e.cluster_id << ','
        << e.other_id << ',' << e.weight << '\n';
  }
}

AllocationOutcome process_window(MicroClusterStore& store, const StreamBatch& batch,
                                 const PipelineConfig& cfg, const SplineSmoother& smoother) {
  batch.validate();
  const TimeGrid grid = canonicalize(batch.window);
  if (smoother.grid() != grid) {
    throw ConfigError("smoother grid does not match the window size");
  }
  std::vector<Curve> curves;
  curves.reserve(batch.n_streams());
  for (std::size_t i = 0; i < batch.n_streams(); ++i) {
    try {
      curves.push_back(smoother.fit(batch.raw[i]));
    } catch (const DataError& e) {
      throw DataError("stream " + std::to_string(i) + ": " + e.what());
    }
  }
  const FunctionalBoxplot fbp = build_fbp(curves, batch.window, cfg.depth, cfg.fence);
  return store.allocate(fbp, batch.window.index);
}

AllocationOutcome process_window(MicroClusterStore& store, const StreamBatch& batch,
                                 const PipelineConfig& cfg) {
  const SplineSmoother smoother(canonicalize(batch.window), cfg.smoothing);
  return process_window(store, batch, cfg, smoother);
}

}  // namespace fbpstream
