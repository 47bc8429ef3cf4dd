#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace vt25 {

/// Uniform square-cell raster. Cell (0,0) sits at `origin`; x grows with
/// column index, y with row index.
struct GridSpec {
  double ds = 0.74e-3;
  int nx = 270;
  int ny = 45;
  double origin_x = 0.0;
  double origin_y = 0.0;

  std::size_t cells() const noexcept { return static_cast<std::size_t>(nx) * ny; }
  double x_of(int i) const noexcept { return origin_x + i * ds; }
  double y_of(int j) const noexcept { return origin_y + j * ds; }

  // Throws ValidationError when ds <= 0 or either count is below 3.
  void validate() const;
};

/// Dense row-major 2D array, index (i, j) -> j * nx + i.
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int nx, int ny, T fill = T{})
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, fill) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int i, int j) noexcept { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const noexcept { return data_[index(i, j)]; }

  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  bool contains(int i, int j) const noexcept { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool operator==(const Grid2&) const = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<T> data_;
};

}  // namespace vt25
