#include "fbpstream/macrocluster.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "fbpstream/errors.hpp"
#include "fbpstream/stream.hpp"

namespace fbpstream {

namespace {

void validate(std::span<const FunctionalBoxplot> inputs, std::span<const double> weights,
              const MacroConfig& cfg) {
  if (cfg.clusters == 0) throw ArgumentError("number of macro-clusters must be positive");
  if (inputs.size() != weights.size()) {
    throw ArgumentError("one weight per macro-clustering input is required");
  }
  if (cfg.clusters > inputs.size()) {
    throw ArgumentError("cannot form " + std::to_string(cfg.clusters) + " macro-clusters from " +
                        std::to_string(inputs.size()) + " inputs");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("input weights must be positive");
  }
  for (const auto& f : inputs) {
    if (f.grid() != inputs.front().grid()) {
      throw DataError("macro-clustering inputs live on grids of different size");
    }
  }
}

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> farthest_first(std::span<const FunctionalBoxplot> inputs,
                                        std::span<const double> weights, std::size_t k,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = unit_draw(rng) * total;
  std::size_t first = inputs.size() - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    acc += weights[i];
    if (target < acc) {
      first = i;
      break;
    }
  }

  std::vector<std::size_t> chosen = {first};
  std::vector<bool> taken(inputs.size(), false);
  taken[first] = true;
  std::vector<double> nearest(inputs.size(), std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    const auto& last = inputs[chosen.back()];
    std::size_t best = inputs.size();
    double best_score = -1.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      nearest[i] = std::min(nearest[i], fbp_distance(inputs[i], last));
      if (taken[i]) continue;
      const double score = weights[i] * nearest[i];
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    chosen.push_back(best);
    taken[best] = true;
  }
  return chosen;
}

// Nearest-centroid labels, then refills clusters left empty.
std::vector<std::size_t> assign_labels(std::span<const FunctionalBoxplot> inputs,
                                       std::span<const double> weights,
                                       std::span<const FunctionalBoxplot> centroids) {
  const std::size_t n = inputs.size();
  const std::size_t k = centroids.size();
  std::vector<std::size_t> labels(n, 0);
  std::vector<double> cost(n, 0.0);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = fbp_distance(inputs[i], centroids[c]);
      if (d < best) {
        best = d;
        labels[i] = c;
      }
    }
    cost[i] = weights[i] * best;
    ++sizes[labels[i]];
  }

  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] > 0) continue;
    std::size_t donor = n;
    double worst = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sizes[labels[i]] > 1 && cost[i] > worst) {
        worst = cost[i];
        donor = i;
      }
    }
    --sizes[labels[donor]];
    labels[donor] = c;
    ++sizes[c];
    cost[donor] = 0.0;
  }
  return labels;
}

FunctionalBoxplot centroid_of(std::span<const FunctionalBoxplot> inputs, std::span<const double> weights,
                              std::span<const std::size_t> labels, std::size_t c) {
  std::vector<FunctionalBoxplot> members;
  std::vector<double> member_weights;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (labels[i] == c) {
      members.push_back(inputs[i]);
      member_weights.push_back(weights[i]);
    }
  }
  return mean_fbp(members, member_weights);
}

std::vector<FunctionalBoxplot> weighted_centroids(std::span<const FunctionalBoxplot> inputs,
                                                  std::span<const double> weights,
                                                  std::span<const std::size_t> labels,
                                                  std::size_t k) {
  std::vector<FunctionalBoxplot> out;
  out.reserve(k);
  for (std::size_t c = 0; c < k; ++c) out.push_back(centroid_of(inputs, weights, labels, c));
  return out;
}

double cluster_cost(std::span<const FunctionalBoxplot> inputs, std::span<const double> weights,
                    std::span<const std::size_t> labels, std::size_t c,
                    const FunctionalBoxplot& centroid) {
  double cost = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (labels[i] == c) cost += weights[i] * fbp_distance(inputs[i], centroid);
  }
  return cost;
}

// One sweep of single-input moves. Each input goes to the cluster whose
// recomputed means give the largest drop of the criterion, if any.
bool refine_sweep(std::span<const FunctionalBoxplot> inputs, std::span<const double> weights,
                  std::vector<std::size_t>& labels, std::vector<FunctionalBoxplot>& centroids,
                  std::vector<double>& costs) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t l : labels) ++sizes[l];
  bool moved = false;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::size_t from = labels[i];
    if (sizes[from] == 1) continue;
    labels[i] = k;
    const FunctionalBoxplot from_centroid = centroid_of(inputs, weights, labels, from);
    const double from_cost = cluster_cost(inputs, weights, labels, from, from_centroid);
    double best_gain = 0.0;
    std::size_t best_to = k;
    std::optional<FunctionalBoxplot> best_centroid;
    double best_cost = 0.0;
    for (std::size_t to = 0; to < k; ++to) {
      if (to == from) continue;
      labels[i] = to;
      FunctionalBoxplot to_centroid = centroid_of(inputs, weights, labels, to);
      const double to_cost = cluster_cost(inputs, weights, labels, to, to_centroid);
      labels[i] = k;
      const double gain = costs[from] + costs[to] - from_cost - to_cost;
      // Relative margin keeps rounding noise from cycling moves.
      if (gain > best_gain && gain > 1e-12 * (costs[from] + costs[to])) {
        best_gain = gain;
        best_to = to;
        best_centroid = std::move(to_centroid);
        best_cost = to_cost;
      }
    }
    if (best_to == k) {
      labels[i] = from;
      continue;
    }
    labels[i] = best_to;
    centroids[from] = from_centroid;
    costs[from] = from_cost;
    centroids[best_to] = std::move(*best_centroid);
    costs[best_to] = best_cost;
    --sizes[from];
    ++sizes[best_to];
    moved = true;
  }
  return moved;
}

}  // namespace

double heterogeneity(std::span<const FunctionalBoxplot> inputs, std::span<const double> weights,
                     std::span<const std::size_t> labels,
                     std::span<const FunctionalBoxplot> centroids) {
  double delta = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    delta += weights[i] * fbp_distance(inputs[i], centroids[labels[i]]);
  }
  return delta;
}

namespace {

// Allocation / centroid passes from the given starting centroids, then
// single-input moves: Lloyd passes with mean centroids need not reach a local
// minimum of the unsquared criterion.
MacroSummary descend(std::span<const FunctionalBoxplot> inputs, std::span<const double> weights,
                     std::span<const FunctionalBoxplot> start, const MacroConfig& cfg) {
  const std::size_t k = start.size();
  MacroSummary out;
  out.labels = assign_labels(inputs, weights, start);
  out.centroids = weighted_centroids(inputs, weights, out.labels, k);
  out.delta = heterogeneity(inputs, weights, out.labels, out.centroids);
  out.delta_history.push_back(out.delta);
  out.iterations = 1;

  while (out.iterations < cfg.max_iter && out.delta > 0.0) {
    auto labels = assign_labels(inputs, weights, out.centroids);
    if (labels == out.labels) break;
    auto centroids = weighted_centroids(inputs, weights, labels, k);
    const double delta = heterogeneity(inputs, weights, labels, centroids);
    if (delta > out.delta) break;
    const double decrease = out.delta - delta;
    out.labels = std::move(labels);
    out.centroids = std::move(centroids);
    out.delta = delta;
    out.delta_history.push_back(delta);
    ++out.iterations;
    if (decrease <= cfg.tol * out.delta_history[out.delta_history.size() - 2]) break;
  }

  std::vector<double> costs(k);
  for (std::size_t c = 0; c < k; ++c) {
    costs[c] = cluster_cost(inputs, weights, out.labels, c, out.centroids[c]);
  }
  while (out.iterations < cfg.max_iter && out.delta > 0.0 &&
         refine_sweep(inputs, weights, out.labels, out.centroids, costs)) {
    out.delta = heterogeneity(inputs, weights, out.labels, out.centroids);
    out.delta_history.push_back(out.delta);
    ++out.iterations;
  }
  return out;
}

}  // namespace

MacroSummary macro_cluster(std::span<const FunctionalBoxplot> inputs, std::span<const double> weights,
                           const MacroConfig& cfg) {
  validate(inputs, weights, cfg);
  const std::size_t k = cfg.clusters;

  std::vector<FunctionalBoxplot> seeds;
  for (std::size_t i : farthest_first(inputs, weights, k, cfg.seed)) seeds.push_back(inputs[i]);
  MacroSummary out = descend(inputs, weights, seeds, cfg);

  // Swap search: restart from the current centroids with one of them moved
  // onto an input; keep the first candidate that lowers the criterion.
  bool improved = true;
  while (improved && out.iterations < cfg.max_iter && out.delta > 0.0 && k < inputs.size()) {
    improved = false;
    for (std::size_t c = 0; c < k && !improved; ++c) {
      for (std::size_t j = 0; j < inputs.size() && !improved; ++j) {
        if (out.labels[j] == c) continue;
        std::vector<FunctionalBoxplot> start = out.centroids;
        start[c] = inputs[j];
        MacroSummary candidate = descend(inputs, weights, start, cfg);
        if (candidate.delta < out.delta - 1e-12 * out.delta) {
          out.labels = std::move(candidate.labels);
          out.centroids = std::move(candidate.centroids);
          out.delta = candidate.delta;
          out.delta_history.push_back(out.delta);
          ++out.iterations;
          improved = true;
        }
      }
    }
  }

  out.macro_weights.assign(k, 0.0);
  for (std::size_t i = 0; i < inputs.size(); ++i) out.macro_weights[out.labels[i]] += weights[i];
  return out;
}

MacroSummary macro_cluster(const SlotSummary& slot, const MacroConfig& cfg) {
  std::vector<FunctionalBoxplot> inputs;
  std::vector<double> weights;
  std::vector<ClusterId> ids;
  for (const auto& e : slot.entries) {
    inputs.push_back(e.centroid);
    weights.push_back(static_cast<double>(e.weight));
    ids.push_back(e.cluster_id);
  }
  MacroSummary out = macro_cluster(inputs, weights, cfg);
  out.input_ids = std::move(ids);
  return out;
}

MacroSummary macro_cluster_restarts(std::span<const FunctionalBoxplot> inputs,
                                    std::span<const double> weights, const MacroConfig& cfg,
                                    std::size_t restarts) {
  if (restarts == 0) throw ArgumentError("at least one restart is required");
  MacroConfig run = cfg;
  MacroSummary best = macro_cluster(inputs, weights, run);
  for (std::size_t r = 1; r < restarts; ++r) {
    run.seed = cfg.seed + r;
    MacroSummary candidate = macro_cluster(inputs, weights, run);
    if (candidate.delta < best.delta) best = std::move(candidate);
  }
  return best;
}

MacroSummary summarize_slot(const SnapshotCatalog& catalog, std::size_t t_lo, std::size_t t_hi,
                            const MacroConfig& cfg, std::size_t restarts) {
  const auto [lower, upper] = select_snapshots(catalog, t_lo, t_hi);
  const SlotSummary slot = recover_slot(lower, upper);
  if (slot.entries.empty()) return {};

  std::vector<FunctionalBoxplot> inputs;
  std::vector<double> weights;
  std::vector<ClusterId> ids;
  for (const auto& e : slot.entries) {
    inputs.push_back(e.centroid);
    weights.push_back(static_cast<double>(e.weight));
    ids.push_back(e.cluster_id);
  }
  MacroSummary out = macro_cluster_restarts(inputs, weights, cfg, restarts);
  out.input_ids = std::move(ids);
  return out;
}

}  // namespace fbpstream
