#include <cstddef>

#include "nlspread/stencil_kernels.hpp"

namespace nlspread::kernels {

void apply_padded(const StencilView& s, std::span<const double> padded, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const auto m = static_cast<std::ptrdiff_t>(s.offsets.size());
  const double* w = s.weights.data();
  const double* in = padded.data();
  double* o = out.data();
  if (s.contiguous) {
    const std::ptrdiff_t first = s.reach + s.offsets[0];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double* row = in + i + first;
      double acc = 0.0;
      for (std::ptrdiff_t k = 0; k < m; ++k) acc += w[k] * row[k];
      o[i] = acc;
    }
    return;
  }
  const int* off = s.offsets.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t k = 0; k < m; ++k) acc += w[k] * in[i + s.reach + off[k]];
    o[i] = acc;
  }
}

void euler_update(std::span<const double> u, std::span<const double> ku, std::span<const double> b,
                  std::span<const double> slope, const ReactionKPP& reaction, double dt, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = u[i] + dt * (ku[i] - b[i] * u[i] + reaction.value_unchecked(slope[i], u[i]));
}

std::size_t perron_update(double eps, std::span<const double> u, std::span<const double> a,
                          std::span<const double> t, double root_tol, std::span<double> w_out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  std::size_t failures = 0;
#pragma omp parallel for schedule(static) reduction(+ : failures)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    if (!solve_perron_scalar(eps, u[i], a[i], t[i], root_tol, w_out[i])) ++failures;
  return failures;
}

}  // namespace nlspread::kernels
