#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nlspread {

/// Uniform 1-D sample grid; node i sits at x_min + i*dx.
struct SpatialGrid {
  double x_min = 0.0;
  double dx = 1.0;
  std::size_t n = 2;

  SpatialGrid() = default;
  SpatialGrid(double x_min, double dx, std::size_t n);

  /// Symmetric grid covering [-half_width, half_width] with node 0 at x = 0
  /// (half_width is rounded up to a multiple of dx).
  static SpatialGrid symmetric(double half_width, double dx);

  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
  double x_max() const { return x(n - 1); }
  double extent() const { return static_cast<double>(n - 1) * dx; }
  /// Index of the node nearest to x (clamped to the grid).
  std::size_t nearest(double x) const;

  bool operator==(const SpatialGrid&) const = default;
};

/// How reads outside the grid are resolved when an integral operator is applied.
enum class Extension {
  zero,      ///< values vanish beyond the grid (compactly supported data)
  constant,  ///< nearest end value is repeated (test functions bounded below)
  periodic,  ///< grid is one period cell and reads wrap around
};

const char* to_string(Extension e);
Extension extension_from_string(const std::string& s);

/// A real function sampled on a SpatialGrid. Values are always finite.
class Field {
 public:
  Field() = default;
  Field(SpatialGrid grid, std::vector<double> values);
  Field(SpatialGrid grid, double value);

  static Field sample(const SpatialGrid& grid, const std::function<double(double)>& f);

  const SpatialGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::vector<double>& storage() { return values_; }

  double min() const;
  double max() const;
  /// Throws NumericalFailure if any value is NaN or infinite.
  void check_finite(const char* module) const;

 private:
  SpatialGrid grid_;
  std::vector<double> values_;
};

}  // namespace nlspread
