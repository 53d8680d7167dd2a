#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fbpstream/core.hpp"

namespace fbpstream {

enum class DepthKind { modified_band, band };

struct DepthResult {
  std::vector<double> scores;
  // ranking[0] is the index of the deepest curve; ties go to the lower index.
  std::vector<std::size_t> ranking;
};

// Bands are formed by pairs of curves, including pairs that contain the
// candidate itself. Containment is exact: min <= c(t) <= max.
//
// Modified band depth: mean over pairs of the fraction of grid points where
// the candidate lies inside the band. Defined as 1 for a single curve.
DepthResult modified_band_depth(std::span<const Curve> curves);

// Band depth: fraction of pairs whose band contains the candidate at every
// grid point. Needs at least two curves.
DepthResult band_depth(std::span<const Curve> curves);

DepthResult compute_depth(std::span<const Curve> curves, DepthKind kind);

// Sorts indices by descending score, ascending index on ties.
std::vector<std::size_t> rank_by_depth(std::span<const double> scores);

}  // namespace fbpstream
