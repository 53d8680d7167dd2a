#include "fbpstream/fboxplot.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbpstream/errors.hpp"

namespace fbpstream {

const char* component_name(Component c) noexcept {
  switch (c) {
    case Component::envelope_min:
      return "envelope_min";
    case Component::box_lower:
      return "box_lower";
    case Component::median:
      return "median";
    case Component::box_upper:
      return "box_upper";
    case Component::envelope_max:
      return "envelope_max";
  }
  return "?";
}

FunctionalBoxplot::FunctionalBoxplot(Curve envelope_min, Curve box_lower, Curve median,
                                     Curve box_upper, Curve envelope_max, Window window,
                                     std::size_t n_source_curves)
    : components_{std::move(envelope_min), std::move(box_lower), std::move(median),
                  std::move(box_upper), std::move(envelope_max)},
      window_(window),
      n_source_curves_(n_source_curves) {
  for (const auto& c : components_) {
    if (c.grid() != components_[0].grid()) {
      throw DataError("functional boxplot components live on different grids");
    }
  }
}

bool FunctionalBoxplot::is_ordered(double slack) const noexcept {
  for (std::size_t t = 0; t < grid().size(); ++t) {
    for (std::size_t k = 0; k + 1 < kComponentCount; ++k) {
      if (components_[k][t] > components_[k + 1][t] + slack) return false;
    }
  }
  return true;
}

bool FunctionalBoxplot::same_values(const FunctionalBoxplot& other) const noexcept {
  return components_ == other.components_;
}

namespace {

void require_shared_grid(std::span<const Curve> curves) {
  if (curves.empty()) {
    throw ArgumentError("functional boxplot needs at least one curve");
  }
  for (const auto& c : curves) {
    if (c.grid() != curves.front().grid()) {
      throw DataError("boxplot input curves live on different grids");
    }
  }
}

// Pointwise min and max over the selected curves.
std::pair<Curve, Curve> pointwise_hull(std::span<const Curve> curves,
                                       const std::vector<std::size_t>& members) {
  const TimeGrid grid = curves.front().grid();
  std::vector<double> lo(grid.size()), hi(grid.size());
  for (std::size_t t = 0; t < grid.size(); ++t) {
    lo[t] = hi[t] = curves[members.front()][t];
    for (std::size_t m : members) {
      lo[t] = std::min(lo[t], curves[m][t]);
      hi[t] = std::max(hi[t], curves[m][t]);
    }
  }
  return {Curve(grid, std::move(lo)), Curve(grid, std::move(hi))};
}

}  // namespace

std::pair<Curve, Curve> central_region(std::span<const Curve> curves, const DepthResult& depth) {
  require_shared_grid(curves);
  if (depth.ranking.size() != curves.size()) {
    throw ArgumentError("depth ranking does not match the curve set");
  }
  const std::size_t deepest = (curves.size() + 1) / 2;
  const std::vector<std::size_t> members(depth.ranking.begin(),
                                         depth.ranking.begin() + static_cast<std::ptrdiff_t>(deepest));
  return pointwise_hull(curves, members);
}

std::vector<bool> flag_outliers(std::span<const Curve> curves, const Curve& box_lower,
                                const Curve& box_upper, double fence_factor) {
  std::vector<bool> flags(curves.size(), false);
  if (std::isinf(fence_factor)) return flags;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t t = 0; t < box_lower.size(); ++t) {
      const double height = box_upper[t] - box_lower[t];
      const double lower_fence = box_lower[t] - fence_factor * height;
      const double upper_fence = box_upper[t] + fence_factor * height;
      if (curves[i][t] < lower_fence || curves[i][t] > upper_fence) {
        flags[i] = true;
        break;
      }
    }
  }
  return flags;
}

FunctionalBoxplot build_fbp(std::span<const Curve> curves, const Window& window,
                            DepthKind depth_kind, const FenceConfig& fence) {
  require_shared_grid(curves);
  if (!(fence.fence_factor >= 0.0)) {
    throw ConfigError("fence factor must be nonnegative");
  }
  if (curves.size() == 1) {
    const Curve& c = curves.front();
    return FunctionalBoxplot(c, c, c, c, c, window, 1);
  }

  const DepthResult depth = compute_depth(curves, depth_kind);
  auto [box_lower, box_upper] = central_region(curves, depth);
  const Curve& median = curves[depth.ranking.front()];

  std::vector<std::size_t> kept;
  if (fence.outlier_removal) {
    const auto flags = flag_outliers(curves, box_lower, box_upper, fence.fence_factor);
    for (std::size_t i = 0; i < curves.size(); ++i) {
      if (!flags[i]) kept.push_back(i);
    }
  } else {
    for (std::size_t i = 0; i < curves.size(); ++i) kept.push_back(i);
  }

  if (kept.empty()) {
    return FunctionalBoxplot(box_lower, box_lower, median, box_upper, box_upper, window,
                             curves.size());
  }
  // The box curves are hulls of a subset of non-outliers (every deepest curve
  // lies inside its own box), so the envelope already brackets the box.
  auto [envelope_min, envelope_max] = pointwise_hull(curves, kept);
  return FunctionalBoxplot(std::move(envelope_min), std::move(box_lower), median,
                           std::move(box_upper), std::move(envelope_max), window, curves.size());
}

FunctionalBoxplot mean_fbp(std::span<const FunctionalBoxplot> fbps, std::span<const double> weights) {
  if (fbps.empty()) {
    throw ArgumentError("mean of an empty set of functional boxplots");
  }
  if (weights.size() != fbps.size()) {
    throw ArgumentError("one weight per functional boxplot is required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ArgumentError("functional boxplot weights must be positive");
    }
    total += w;
  }
  const TimeGrid grid = fbps.front().grid();
  for (const auto& f : fbps) {
    if (f.grid() != grid) {
      throw DataError("cannot average functional boxplots on grids of different size");
    }
  }

  // Incremental form mean += (w_k / W_k) (x_k - mean): exact when all inputs
  // coincide and unchanged when every weight is scaled by the same integer.
  std::array<std::vector<double>, kComponentCount> acc;
  for (std::size_t c = 0; c < kComponentCount; ++c) {
    const auto first = fbps.front().component(kComponents[c]).values();
    acc[c].assign(first.begin(), first.end());
  }
  double seen = weights[0];
  for (std::size_t k = 1; k < fbps.size(); ++k) {
    seen += weights[k];
    const double ratio = weights[k] / seen;
    for (std::size_t c = 0; c < kComponentCount; ++c) {
      const Curve& curve = fbps[k].component(kComponents[c]);
      for (std::size_t t = 0; t < grid.size(); ++t) acc[c][t] += ratio * (curve[t] - acc[c][t]);
    }
  }
  double source = 0.0;
  for (std::size_t k = 0; k < fbps.size(); ++k) {
    source += weights[k] * static_cast<double>(fbps[k].n_source_curves());
  }
  return FunctionalBoxplot(Curve(grid, std::move(acc[0])), Curve(grid, std::move(acc[1])),
                           Curve(grid, std::move(acc[2])), Curve(grid, std::move(acc[3])),
                           Curve(grid, std::move(acc[4])), fbps.back().window(),
                           static_cast<std::size_t>(std::llround(source / total)));
}

}  // namespace fbpstream
