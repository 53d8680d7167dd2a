#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fbpstream/core.hpp"

namespace fbpstream {

struct SmoothingConfig {
  // Number of B-spline basis functions; 0 selects default_basis_size(w).
  std::size_t basis_size = 0;
  // Weight of the squared second differences of the spline coefficients.
  double penalty_lambda = 0.0;
  bool enabled = true;
};

// min(10, w - 2), never below 1.
std::size_t default_basis_size(std::size_t window_size);

// Penalized least-squares fit of raw samples with a clamped B-spline basis
// on equally spaced knots over [0, w-1]. The degree is cubic when the basis
// has at least four functions and min(3, basis_size - 1) otherwise, so a
// basis of size 1 is the constant fit and size 2 the straight-line fit.
//
// The fit is linear in the data: construction precomputes the w x w
// smoother matrix once and fit() is a matrix-vector product, which makes
// one smoother reusable for every stream of every window.
class SplineSmoother {
 public:
  SplineSmoother(const TimeGrid& grid, const SmoothingConfig& cfg);

  Curve fit(std::span<const double> raw) const;

  std::size_t basis_size() const noexcept { return basis_size_; }
  int degree() const noexcept { return degree_; }
  const TimeGrid& grid() const noexcept { return grid_; }

 private:
  TimeGrid grid_;
  bool enabled_;
  std::size_t basis_size_ = 0;
  int degree_ = 0;
  std::vector<double> smoother_;  // row-major w x w
};

Curve smooth_subsequence(std::span<const double> raw, const TimeGrid& grid,
                         const SmoothingConfig& cfg);

std::vector<Curve> smooth_batch(const StreamBatch& batch, const SmoothingConfig& cfg);

}  // namespace fbpstream
