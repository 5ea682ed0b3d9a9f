#include "nlspread/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlspread/error.hpp"

namespace nlspread {

SpatialGrid::SpatialGrid(double x_min_, double dx_, std::size_t n_) : x_min(x_min_), dx(dx_), n(n_) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw InvalidInput("SpatialGrid: dx must be positive");
  if (n < 2) throw InvalidInput("SpatialGrid: need at least two nodes");
  if (!std::isfinite(x_min)) throw InvalidInput("SpatialGrid: x_min must be finite");
}

SpatialGrid SpatialGrid::symmetric(double half_width, double dx) {
  if (!(half_width > 0.0)) throw InvalidInput("SpatialGrid: half width must be positive");
  const auto m = static_cast<std::size_t>(std::ceil(half_width / dx - 1e-9));
  return SpatialGrid(-static_cast<double>(m) * dx, dx, 2 * m + 1);
}

std::size_t SpatialGrid::nearest(double xq) const {
  const double k = std::round((xq - x_min) / dx);
  if (k <= 0.0) return 0;
  return std::min(n - 1, static_cast<std::size_t>(k));
}

const char* to_string(Extension e) {
  switch (e) {
    case Extension::zero: return "zero";
    case Extension::constant: return "constant";
    case Extension::periodic: return "periodic";
  }
  return "?";
}

Extension extension_from_string(const std::string& s) {
  if (s == "zero") return Extension::zero;
  if (s == "constant") return Extension::constant;
  if (s == "periodic") return Extension::periodic;
  throw InvalidInput("unknown boundary extension '" + s + "'");
}

Field::Field(SpatialGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n) throw InvalidInput("Field: value count does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidInput("Field: non-finite value");
}

Field::Field(SpatialGrid grid, double value) : grid_(grid), values_(grid.n, value) {
  if (!std::isfinite(value)) throw InvalidInput("Field: non-finite value");
}

Field Field::sample(const SpatialGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = f(grid.x(i));
  return Field(grid, std::move(v));
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

void Field::check_finite(const char* module) const {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw NumericalFailure(module, "non-finite value at node " + std::to_string(i));
}

}  // namespace nlspread
