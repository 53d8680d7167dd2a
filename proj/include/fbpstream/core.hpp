#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbpstream {

// Canonical window domain {0, 1, ..., w-1}. Every window of size w maps onto
// the same grid, so comparing two windows is a pointwise operation.
class TimeGrid {
 public:
  explicit TimeGrid(std::size_t window_size);

  std::size_t size() const noexcept { return size_; }
  double point(std::size_t i) const noexcept { return static_cast<double>(i); }
  std::vector<double> points() const;
  // Length of the domain [0, w-1].
  double length() const noexcept { return static_cast<double>(size_ - 1); }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  std::size_t size_;
};

// A real function sampled on a TimeGrid. Values are always finite.
class Curve {
 public:
  Curve(TimeGrid grid, std::vector<double> values);

  static Curve constant(TimeGrid grid, double value);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  Curve operator+(const Curve& other) const;
  Curve operator-(const Curve& other) const;
  Curve scaled(double factor) const;

  // Bitwise equality of the sampled values.
  friend bool operator==(const Curve&, const Curve&) = default;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

struct Window {
  std::size_t index = 0;
  std::size_t start_time = 0;
  std::size_t size = 0;

  static Window at(std::size_t index, std::size_t size) { return {index, index * size, size}; }

  friend bool operator==(const Window&, const Window&) = default;
};

// Raw values of n parallel streams inside one window; raw[i] holds stream i.
struct StreamBatch {
  Window window;
  std::vector<std::vector<double>> raw;

  std::size_t n_streams() const noexcept { return raw.size(); }

  // Throws DataError unless every row has window.size finite values.
  void validate() const;
};

// Maps a window onto the shared domain [0, w). Requires w > 1.
TimeGrid canonicalize(const Window& window);

}  // namespace fbpstream
