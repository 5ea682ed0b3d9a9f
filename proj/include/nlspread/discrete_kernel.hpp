#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nlspread/grid.hpp"
#include "nlspread/kernel.hpp"
#include "nlspread/stencil_kernels.hpp"

namespace nlspread {

/// A kernel discretized on a grid: trapezoid weights on the grid's own nodes for
/// densities, exact index shifts for Dirac combs, optional separable modulation.
///
///   (K phi)_i = w_i * sum_k weight_k * w_{i+k} * phi_{i+k}
///
/// where w is the modulation (identically 1 unless separable) and reads outside the
/// grid follow an explicit Extension. Under Extension::periodic the grid is one period
/// cell of length n*dx.
class DiscreteKernel {
 public:
  DiscreteKernel(const Kernel& kernel, const SpatialGrid& grid);

  const SpatialGrid& grid() const { return grid_; }
  int reach() const { return reach_; }
  std::span<const int> offsets() const { return offsets_; }
  std::span<const double> weights() const { return weights_; }
  bool modulated() const { return modulated_; }
  double truncation_radius() const { return truncation_radius_; }

  /// Weights multiplied by e^{p (y - x)} = e^{p k dx}: the operator with kernel K_p.
  DiscreteKernel tilted(double p) const;

  /// Reads beyond the grid are resolved with `ext`; throws if a non-periodic grid is
  /// shorter than twice the truncation radius.
  void apply(std::span<const double> in, std::span<double> out, Extension ext) const;
  /// Reference path through the serial stencil kernel.
  void apply_serial(std::span<const double> in, std::span<double> out, Extension ext) const;

  /// Discrete b_i = sum of row i, evaluated as if the grid were unbounded.
  std::vector<double> row_sums() const;

  /// Padded copy of `in` of length n + 2*reach (modulation applied when separable).
  std::vector<double> pad(std::span<const double> in, Extension ext) const;

 private:
  kernels::StencilView view() const;
  void finish(std::span<double> out) const;

  SpatialGrid grid_;
  std::vector<int> offsets_;
  std::vector<double> weights_;
  int reach_ = 0;
  bool contiguous_ = false;
  bool modulated_ = false;
  double truncation_radius_ = 0.0;
  std::vector<double> modulation_padded_;  // w at node indices -reach .. n-1+reach
};

/// K phi on phi's grid (see DiscreteKernel).
Field apply_kernel(const Kernel& k, const Field& phi, Extension ext);

}  // namespace nlspread
