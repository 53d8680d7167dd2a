#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fbpstream/fboxplot.hpp"
#include "fbpstream/snapshot.hpp"

namespace fbpstream {

struct MacroConfig {
  std::size_t clusters = 4;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  double tol = 1e-6;
};

struct MacroSummary {
  std::vector<FunctionalBoxplot> centroids;
  // Total input weight per macro-cluster.
  std::vector<double> macro_weights;
  // labels[k] is the macro-cluster of input k.
  std::vector<std::size_t> labels;
  // Micro-cluster id of each input when clustering a SlotSummary.
  std::vector<ClusterId> input_ids;
  double delta = 0.0;
  // Number of accepted allocation + centroid passes, the initial one included.
  std::size_t iterations = 0;
  // Criterion after every accepted pass; nonincreasing.
  std::vector<double> delta_history;
};

// Sum over inputs of weight * fbp_distance(input, centroid of its label).
double heterogeneity(std::span<const FunctionalBoxplot> inputs, std::span<const double> weights,
                     std::span<const std::size_t> labels,
                     std::span<const FunctionalBoxplot> centroids);

// Weighted k-means-like clustering of functional boxplots under fbp_distance.
//
// Initialization is a weighted farthest-first traversal: the first seed is
// drawn with probability proportional to weight from `seed`, each next seed
// maximizes weight * distance to the seeds chosen so far. Each pass assigns
// every input to its nearest centroid (ties: lowest index), refills empty
// clusters with the input of largest weighted distance to its centroid, and
// recomputes centroids as weighted component-wise means. The loop stops when
// labels settle, when the relative decrease of the criterion drops below
// tol, or after max_iter passes. A pass that would raise the criterion is
// rejected and ends the loop, so the returned state is the best one seen.
//
// Two local searches follow, each accepting only strict decreases: moves of
// single inputs between clusters, then swaps that restart the descent with
// one centroid placed on an input outside its cluster.
MacroSummary macro_cluster(std::span<const FunctionalBoxplot> inputs, std::span<const double> weights,
                           const MacroConfig& cfg);

MacroSummary macro_cluster(const SlotSummary& slot, const MacroConfig& cfg);

// Best criterion over seeds cfg.seed, cfg.seed + 1, ..., cfg.seed + restarts - 1.
MacroSummary macro_cluster_restarts(std::span<const FunctionalBoxplot> inputs,
                                    std::span<const double> weights, const MacroConfig& cfg,
                                    std::size_t restarts);

// select_snapshots -> recover_slot -> macro_cluster. A slot without activity
// yields an empty summary.
MacroSummary summarize_slot(const SnapshotCatalog& catalog, std::size_t t_lo, std::size_t t_hi,
                            const MacroConfig& cfg, std::size_t restarts = 1);

}  // namespace fbpstream
