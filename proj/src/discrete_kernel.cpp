#include "nlspread/discrete_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nlspread/error.hpp"

namespace nlspread {

DiscreteKernel::DiscreteKernel(const Kernel& kernel, const SpatialGrid& grid)
    : grid_(grid), truncation_radius_(kernel.truncation_radius()) {
  const double dx = grid.dx;
  if (const auto* comb = std::get_if<Kernel::DiracComb>(&kernel.variant())) {
    // K phi(x) = sum a_n phi(x - q_n): node offset -q_n/dx, which must be an integer.
    std::map<int, double> merged;
    for (const auto& atom : comb->atoms) {
      const double k = -atom.shift / dx;
      const double kr = std::round(k);
      if (std::abs(k - kr) > 1e-9 * std::max(1.0, std::abs(k)))
        throw InvalidInput("dirac comb: shift " + std::to_string(atom.shift) + " is not a multiple of dx");
      merged[static_cast<int>(kr)] += atom.weight;
    }
    for (const auto& [k, w] : merged) {
      offsets_.push_back(k);
      weights_.push_back(w);
    }
  } else {
    const Density* d = nullptr;
    const CoefficientProfile* w = nullptr;
    if (const auto* c = std::get_if<Kernel::Convolution>(&kernel.variant())) d = &c->density;
    if (const auto* s = std::get_if<Kernel::Separable>(&kernel.variant())) {
      d = &s->density;
      w = &s->modulation;
    }
    const int m = static_cast<int>(std::floor(truncation_radius_ / dx + 1e-9));
    for (int k = -m; k <= m; ++k) {
      // y = x + k dx, xi = x - y = -k dx; trapezoid end nodes carry half weight.
      const double trap = (k == -m || k == m) ? 0.5 : 1.0;
      const double value = (*d)(-k * dx);
      if (value < 0.0) throw InvalidInput("kernel: negative density detected");
      offsets_.push_back(k);
      weights_.push_back(trap * dx * value);
    }
    contiguous_ = true;
    if (w != nullptr) {
      modulated_ = true;
      const int reach = m;
      modulation_padded_.resize(grid.n + 2 * static_cast<std::size_t>(reach));
      for (std::size_t j = 0; j < modulation_padded_.size(); ++j)
        modulation_padded_[j] = (*w)(grid.x_min + (static_cast<double>(j) - reach) * dx);
    }
  }
  reach_ = 0;
  for (int k : offsets_) reach_ = std::max(reach_, std::abs(k));
  if (!contiguous_ && !offsets_.empty()) {
    contiguous_ = true;
    for (std::size_t k = 1; k < offsets_.size(); ++k)
      if (offsets_[k] != offsets_[k - 1] + 1) contiguous_ = false;
  }
}

DiscreteKernel DiscreteKernel::tilted(double p) const {
  if (std::abs(p) * reach_ * grid_.dx > kOverflowGuard)
    throw NumericalFailure("kernel", "overflow guard tripped for tilt " + std::to_string(p));
  DiscreteKernel t = *this;
  for (std::size_t k = 0; k < offsets_.size(); ++k) t.weights_[k] *= std::exp(p * offsets_[k] * grid_.dx);
  return t;
}

std::vector<double> DiscreteKernel::pad(std::span<const double> in, Extension ext) const {
  const auto n = static_cast<std::ptrdiff_t>(grid_.n);
  if (static_cast<std::ptrdiff_t>(in.size()) != n) throw InvalidInput("apply_kernel: field/grid size mismatch");
  if (ext != Extension::periodic && grid_.extent() < 2.0 * truncation_radius_ * (1.0 - 1e-12))
    throw InvalidInput("apply_kernel: grid extent is smaller than twice the truncation radius");
  std::vector<double> padded(static_cast<std::size_t>(n + 2 * reach_));
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(padded.size()); ++j) {
    const std::ptrdiff_t i = j - reach_;
    double v = 0.0;
    if (i >= 0 && i < n) {
      v = in[static_cast<std::size_t>(i)];
    } else if (ext == Extension::constant) {
      v = in[i < 0 ? 0 : static_cast<std::size_t>(n - 1)];
    } else if (ext == Extension::periodic) {
      v = in[static_cast<std::size_t>(((i % n) + n) % n)];
    }
    padded[static_cast<std::size_t>(j)] = v;
  }
  if (modulated_)
    for (std::size_t j = 0; j < padded.size(); ++j) padded[j] *= modulation_padded_[j];
  return padded;
}

kernels::StencilView DiscreteKernel::view() const {
  return kernels::StencilView{offsets_, weights_, reach_, contiguous_};
}

void DiscreteKernel::finish(std::span<double> out) const {
  if (!modulated_) return;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= modulation_padded_[i + static_cast<std::size_t>(reach_)];
}

void DiscreteKernel::apply(std::span<const double> in, std::span<double> out, Extension ext) const {
  const auto padded = pad(in, ext);
  kernels::apply_padded(view(), padded, out);
  finish(out);
}

void DiscreteKernel::apply_serial(std::span<const double> in, std::span<double> out, Extension ext) const {
  const auto padded = pad(in, ext);
  kernels::serial::apply_padded(view(), padded, out);
  finish(out);
}

std::vector<double> DiscreteKernel::row_sums() const {
  std::vector<double> padded(grid_.n + 2 * static_cast<std::size_t>(reach_), 1.0);
  if (modulated_) padded = modulation_padded_;
  std::vector<double> out(grid_.n);
  kernels::apply_padded(view(), padded, out);
  finish(out);
  return out;
}

Field apply_kernel(const Kernel& k, const Field& phi, Extension ext) {
  DiscreteKernel dk(k, phi.grid());
  std::vector<double> out(phi.size());
  dk.apply(phi.values(), out, ext);
  return Field(phi.grid(), std::move(out));
}

}  // namespace nlspread
