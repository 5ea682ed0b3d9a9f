#include <cmath>
#include <limits>

#include "nlspread/stencil_kernels.hpp"

namespace nlspread::kernels {

bool solve_perron_scalar(double eps, double u, double a, double t, double root_tol, double& w) {
  // g(w) = eps*(u+w) + a - t e^{-w} is increasing and concave, so Newton started left
  // of the root stays left of it; bisection guards the remaining cases.
  auto g = [&](double x) { return eps * (u + x) + a - t * std::exp(-x); };
  double lo = 0.0;
  double hi = 0.0;
  double glo = g(lo);
  if (glo > 0.0) {
    double step = 1.0;
    while (g(lo) > 0.0) {
      hi = lo;
      lo -= step;
      step *= 2.0;
      if (step > 1e6) return false;
    }
  } else {
    double step = 1.0;
    hi = step;
    while (g(hi) < 0.0) {
      lo = hi;
      step *= 2.0;
      hi += step;
      if (step > 1e12) return false;
    }
  }
  double x = lo;
  for (int it = 0; it < 200; ++it) {
    const double gx = g(x);
    if (gx == 0.0) {
      w = x;
      return true;
    }
    if (gx < 0.0) lo = x; else hi = x;
    const double dg = eps + t * std::exp(-x);
    double next = x - gx / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double tol = root_tol * std::max(1.0, std::abs(u + next));
    if (std::abs(next - x) <= tol || (hi - lo) <= tol) {
      w = next;
      return true;
    }
    x = next;
  }
  w = x;
  return false;
}

namespace serial {

void apply_padded(const StencilView& s, std::span<const double> padded, std::span<double> out) {
  const std::size_t n = out.size();
  const std::size_t m = s.offsets.size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      acc += s.weights[k] * padded[static_cast<std::ptrdiff_t>(i) + s.reach + s.offsets[k]];
    out[i] = acc;
  }
}

void euler_update(std::span<const double> u, std::span<const double> ku, std::span<const double> b,
                  std::span<const double> slope, const ReactionKPP& reaction, double dt, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = u[i] + dt * (ku[i] - b[i] * u[i] + reaction.value_unchecked(slope[i], u[i]));
}

std::size_t perron_update(double eps, std::span<const double> u, std::span<const double> a,
                          std::span<const double> t, double root_tol, std::span<double> w_out) {
  std::size_t failures = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!solve_perron_scalar(eps, u[i], a[i], t[i], root_tol, w_out[i])) ++failures;
  return failures;
}

}  // namespace serial
}  // namespace nlspread::kernels
