#include "fbpstream/depth.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>

#include "fbpstream/errors.hpp"

namespace fbpstream {

namespace {

void validate(std::span<const Curve> curves, std::size_t min_curves) {
  if (curves.size() < min_curves) {
    throw ArgumentError("depth needs at least " + std::to_string(min_curves) + " curves, got " +
                        std::to_string(curves.size()));
  }
  for (const auto& c : curves) {
    if (c.grid() != curves.front().grid()) {
      throw DataError("depth input curves live on different grids");
    }
  }
}

std::uint64_t pairs(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace

std::vector<std::size_t> rank_by_depth(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

DepthResult modified_band_depth(std::span<const Curve> curves) {
  validate(curves, 1);
  const std::size_t n = curves.size();
  const std::size_t w = curves.front().size();
  DepthResult result;
  if (n == 1) {
    result.scores = {1.0};
    result.ranking = {0};
    return result;
  }

  // At each t, the pairs whose band misses curve i are exactly the pairs
  // lying strictly below it or strictly above it.
  std::vector<std::uint64_t> hits(n, 0);
  std::vector<double> column(n);
  for (std::size_t t = 0; t < w; ++t) {
    for (std::size_t i = 0; i < n; ++i) column[i] = curves[i][t];
    std::vector<double> sorted(column);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      const auto below = static_cast<std::uint64_t>(
          std::lower_bound(sorted.begin(), sorted.end(), column[i]) - sorted.begin());
      const auto above = static_cast<std::uint64_t>(
          sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), column[i]));
      hits[i] += pairs(n) - pairs(below) - pairs(above);
    }
  }

  const double denom = static_cast<double>(pairs(n)) * static_cast<double>(w);
  result.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.scores[i] = static_cast<double>(hits[i]) / denom;
  }
  result.ranking = rank_by_depth(result.scores);
  return result;
}

DepthResult band_depth(std::span<const Curve> curves) {
  validate(curves, 2);
  const std::size_t n = curves.size();
  const std::size_t w = curves.front().size();

  std::vector<std::uint64_t> contained(n, 0);
  std::vector<double> lo(w), hi(w);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      for (std::size_t t = 0; t < w; ++t) {
        lo[t] = std::min(curves[p][t], curves[q][t]);
        hi[t] = std::max(curves[p][t], curves[q][t]);
      }
      for (std::size_t i = 0; i < n; ++i) {
        bool inside = true;
        for (std::size_t t = 0; t < w && inside; ++t) {
          inside = lo[t] <= curves[i][t] && curves[i][t] <= hi[t];
        }
        if (inside) ++contained[i];
      }
    }
  }

  DepthResult result;
  result.scores.resize(n);
  const double denom = static_cast<double>(pairs(n));
  for (std::size_t i = 0; i < n; ++i) {
    result.scores[i] = static_cast<double>(contained[i]) / denom;
  }
  result.ranking = rank_by_depth(result.scores);
  return result;
}

DepthResult compute_depth(std::span<const Curve> curves, DepthKind kind) {
  return kind == DepthKind::band ? band_depth(curves) : modified_band_depth(curves);
}

}  // namespace fbpstream
