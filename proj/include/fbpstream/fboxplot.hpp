#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fbpstream/core.hpp"
#include "fbpstream/depth.hpp"

namespace fbpstream {

// Component order is also the serialization order.
enum class Component : std::size_t {
  envelope_min = 0,
  box_lower = 1,
  median = 2,
  box_upper = 3,
  envelope_max = 4,
};

inline constexpr std::size_t kComponentCount = 5;
inline constexpr std::array<Component, kComponentCount> kComponents = {
    Component::envelope_min, Component::box_lower, Component::median, Component::box_upper,
    Component::envelope_max};

const char* component_name(Component c) noexcept;

// Five-curve summary of the curves of one window: the whisker envelopes,
// the bounds of the 50% central region, and the deepest (median) curve.
class FunctionalBoxplot {
 public:
  // All five curves must share one grid (DataError otherwise). The ordering
  // envelope_min <= box_lower <= median <= box_upper <= envelope_max is not
  // enforced here; use is_ordered().
  FunctionalBoxplot(Curve envelope_min, Curve box_lower, Curve median, Curve box_upper,
                    Curve envelope_max, Window window, std::size_t n_source_curves);

  const Curve& component(Component c) const noexcept {
    return components_[static_cast<std::size_t>(c)];
  }
  const Curve& envelope_min() const noexcept { return component(Component::envelope_min); }
  const Curve& box_lower() const noexcept { return component(Component::box_lower); }
  const Curve& median() const noexcept { return component(Component::median); }
  const Curve& box_upper() const noexcept { return component(Component::box_upper); }
  const Curve& envelope_max() const noexcept { return component(Component::envelope_max); }

  const TimeGrid& grid() const noexcept { return components_[0].grid(); }
  const Window& window() const noexcept { return window_; }
  // Number of curves summarized; 0 when unknown (e.g. loaded from a snapshot).
  std::size_t n_source_curves() const noexcept { return n_source_curves_; }

  // Pointwise ordering check with an absolute slack.
  bool is_ordered(double slack = 0.0) const noexcept;

  // Compares the sampled values only, bit for bit.
  bool same_values(const FunctionalBoxplot& other) const noexcept;

 private:
  std::array<Curve, kComponentCount> components_;
  Window window_;
  std::size_t n_source_curves_;
};

struct FenceConfig {
  double fence_factor = 1.5;
  bool outlier_removal = true;
};

// Pointwise min/max over the ceil(n/2) deepest curves.
std::pair<Curve, Curve> central_region(std::span<const Curve> curves, const DepthResult& depth);

// A curve is an outlier when at any grid point it leaves
// [box_lower - f * height, box_upper + f * height], height = box_upper - box_lower.
std::vector<bool> flag_outliers(std::span<const Curve> curves, const Curve& box_lower,
                                const Curve& box_upper, double fence_factor);

FunctionalBoxplot build_fbp(std::span<const Curve> curves, const Window& window,
                            DepthKind depth_kind = DepthKind::modified_band,
                            const FenceConfig& fence = {});

// Weighted pointwise mean of each component. Takes the window of the last
// input; n_source_curves becomes the rounded weighted mean of the inputs.
FunctionalBoxplot mean_fbp(std::span<const FunctionalBoxplot> fbps, std::span<const double> weights);

}  // namespace fbpstream
