#include "fbpstream/smoothing.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "fbpstream/errors.hpp"

namespace fbpstream {

namespace {

// Clamped knot vector: degree+1 copies of each end, interior knots uniform.
std::vector<double> clamped_knots(double lo, double hi, std::size_t n_basis, int degree) {
  const auto p = static_cast<std::size_t>(degree);
  const std::size_t interior = n_basis - p - 1;
  std::vector<double> knots;
  knots.reserve(n_basis + p + 1);
  for (std::size_t i = 0; i <= p; ++i) knots.push_back(lo);
  const double step = (hi - lo) / static_cast<double>(interior + 1);
  for (std::size_t k = 1; k <= interior; ++k) knots.push_back(lo + step * static_cast<double>(k));
  for (std::size_t i = 0; i <= p; ++i) knots.push_back(hi);
  return knots;
}

std::size_t find_span(const std::vector<double>& knots, std::size_t n_basis, int degree, double x) {
  if (x >= knots[n_basis]) return n_basis - 1;
  std::size_t lo = static_cast<std::size_t>(degree);
  std::size_t hi = n_basis;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (x < knots[mid]) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

// Cox-de Boor triangle; returns the degree+1 nonzero basis values on `span`.
std::vector<double> basis_funs(const std::vector<double>& knots, std::size_t span, int degree,
                               double x) {
  const auto p = static_cast<std::size_t>(degree);
  std::vector<double> n(p + 1, 0.0), left(p + 1, 0.0), right(p + 1, 0.0);
  n[0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    left[j] = x - knots[span + 1 - j];
    right[j] = knots[span + j] - x;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  return n;
}

}  // namespace

std::size_t default_basis_size(std::size_t window_size) {
  if (window_size <= 3) return 1;
  return std::min<std::size_t>(10, window_size - 2);
}

SplineSmoother::SplineSmoother(const TimeGrid& grid, const SmoothingConfig& cfg)
    : grid_(grid), enabled_(cfg.enabled) {
  if (!(cfg.penalty_lambda >= 0.0) || !std::isfinite(cfg.penalty_lambda)) {
    throw ConfigError("smoothing penalty must be a finite nonnegative number");
  }
  if (!enabled_) return;

  const std::size_t w = grid.size();
  basis_size_ = cfg.basis_size == 0 ? default_basis_size(w) : cfg.basis_size;
  if (basis_size_ > w) {
    throw ConfigError("basis size " + std::to_string(basis_size_) + " exceeds window size " +
                      std::to_string(w));
  }
  degree_ = static_cast<int>(std::min<std::size_t>(3, basis_size_ - 1));

  const auto knots = clamped_knots(0.0, grid.length(), basis_size_, degree_);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(w),
                                                static_cast<Eigen::Index>(basis_size_));
  for (std::size_t i = 0; i < w; ++i) {
    const double x = grid.point(i);
    const std::size_t span = find_span(knots, basis_size_, degree_, x);
    const auto values = basis_funs(knots, span, degree_, x);
    for (std::size_t r = 0; r < values.size(); ++r) {
      basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(span - degree_ + r)) = values[r];
    }
  }

  // Augmented system [B; sqrt(lambda) D2] c = [y; 0].
  const std::size_t n_penalty =
      (cfg.penalty_lambda > 0.0 && basis_size_ >= 3) ? basis_size_ - 2 : 0;
  const auto rows = static_cast<Eigen::Index>(w + n_penalty);
  const auto cols = static_cast<Eigen::Index>(basis_size_);
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(rows, cols);
  system.topRows(static_cast<Eigen::Index>(w)) = basis;
  const double root = std::sqrt(cfg.penalty_lambda);
  for (std::size_t k = 0; k < n_penalty; ++k) {
    const auto row = static_cast<Eigen::Index>(w + k);
    system(row, static_cast<Eigen::Index>(k)) = root;
    system(row, static_cast<Eigen::Index>(k + 1)) = -2.0 * root;
    system(row, static_cast<Eigen::Index>(k + 2)) = root;
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(w));
  rhs.topRows(static_cast<Eigen::Index>(w)).setIdentity();
  const Eigen::MatrixXd coefficients = qr.solve(rhs);
  const Eigen::MatrixXd smoother = basis * coefficients;

  smoother_.resize(w * w);
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      smoother_[i * w + j] = smoother(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
}

Curve SplineSmoother::fit(std::span<const double> raw) const {
  const std::size_t w = grid_.size();
  if (raw.size() != w) {
    throw DataError("subsequence has " + std::to_string(raw.size()) + " samples, expected " +
                    std::to_string(w));
  }
  for (std::size_t i = 0; i < w; ++i) {
    if (!std::isfinite(raw[i])) {
      throw DataError("non-finite sample at offset " + std::to_string(i));
    }
  }
  std::vector<double> fitted(raw.begin(), raw.end());
  if (enabled_) {
    for (std::size_t i = 0; i < w; ++i) {
      const double* row = smoother_.data() + i * w;
      double acc = 0.0;
      for (std::size_t j = 0; j < w; ++j) acc += row[j] * raw[j];
      fitted[i] = acc;
    }
  }
  return Curve(grid_, std::move(fitted));
}

Curve smooth_subsequence(std::span<const double> raw, const TimeGrid& grid,
                         const SmoothingConfig& cfg) {
  return SplineSmoother(grid, cfg).fit(raw);
}

std::vector<Curve> smooth_batch(const StreamBatch& batch, const SmoothingConfig& cfg) {
  const SplineSmoother smoother(canonicalize(batch.window), cfg);
  std::vector<Curve> out;
  out.reserve(batch.n_streams());
  for (std::size_t i = 0; i < batch.n_streams(); ++i) {
    try {
      out.push_back(smoother.fit(batch.raw[i]));
    } catch (const DataError& e) {
      throw DataError("stream " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace fbpstream
