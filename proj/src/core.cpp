#include "fbpstream/core.hpp"

#include <cmath>
#include <string>

#include "fbpstream/errors.hpp"

namespace fbpstream {

TimeGrid::TimeGrid(std::size_t window_size) : size_(window_size) {
  if (window_size == 0) {
    throw ConfigError("time grid needs at least one point");
  }
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    out[i] = point(i);
  }
  return out;
}

Curve::Curve(TimeGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DataError("curve has " + std::to_string(values_.size()) + " values for a grid of " +
                    std::to_string(grid_.size()) + " points");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("non-finite curve value at grid point " + std::to_string(i));
    }
  }
}

Curve Curve::constant(TimeGrid grid, double value) {
  return Curve(grid, std::vector<double>(grid.size(), value));
}

namespace {

void require_same_grid(const Curve& a, const Curve& b) {
  if (a.grid() != b.grid()) {
    throw DataError("curves live on different grids (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + " points)");
  }
}

}  // namespace

Curve Curve::operator+(const Curve& other) const {
  require_same_grid(*this, other);
  std::vector<double> out(values_);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += other.values_[i];
  }
  return Curve(grid_, std::move(out));
}

Curve Curve::operator-(const Curve& other) const {
  require_same_grid(*this, other);
  std::vector<double> out(values_);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] -= other.values_[i];
  }
  return Curve(grid_, std::move(out));
}

Curve Curve::scaled(double factor) const {
  std::vector<double> out(values_);
  for (double& v : out) {
    v *= factor;
  }
  return Curve(grid_, std::move(out));
}

void StreamBatch::validate() const {
  if (raw.empty()) {
    throw DataError("window " + std::to_string(window.index) + " has no streams");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].size() != window.size) {
      throw DataError("stream " + std::to_string(i) + " has " + std::to_string(raw[i].size()) +
                      " samples in window " + std::to_string(window.index) + ", expected " +
                      std::to_string(window.size));
    }
    for (double v : raw[i]) {
      if (!std::isfinite(v)) {
        throw DataError("stream " + std::to_string(i) + " has a non-finite sample in window " +
                        std::to_string(window.index));
      }
    }
  }
}

TimeGrid canonicalize(const Window& window) {
  if (window.size <= 1) {
    throw ConfigError("window size must be greater than 1, got " + std::to_string(window.size));
  }
  return TimeGrid(window.size);
}

}  // namespace fbpstream
