#pragma once

#include <span>

#include "nlspread/reaction.hpp"

// Data-parallel inner loops. Every kernel has an OpenMP version (namespace
// nlspread::kernels) and a plain serial reference (nlspread::kernels::serial) that the
// tests compare against.

namespace nlspread::kernels {

/// Offsets and weights of a discrete integral operator; row i reads padded[i + reach + offset].
struct StencilView {
  std::span<const int> offsets;
  std::span<const double> weights;
  int reach = 0;
  /// offsets are first, first+1, ..., first+len-1
  bool contiguous = false;
};

/// out[i] = sum_k weights[k] * padded[i + reach + offsets[k]].
void apply_padded(const StencilView& s, std::span<const double> padded, std::span<double> out);

/// One explicit Euler step of u_t = Ku - b u + r(x) u g(u), given Ku.
void euler_update(std::span<const double> u, std::span<const double> ku, std::span<const double> b,
                  std::span<const double> slope, const ReactionKPP& reaction, double dt, std::span<double> out);

/// Node-wise Perron update: for each i find w >= 0 (up to rounding) solving
///   eps * (u_i + w) + a_i = T_i * exp(-w),
/// by safeguarded Newton/bisection, and store it in w_out. Returns the number of nodes
/// at which the scalar solve did not reach `root_tol`.
std::size_t perron_update(double eps, std::span<const double> u, std::span<const double> a,
                          std::span<const double> t, double root_tol, std::span<double> w_out);

namespace serial {
void apply_padded(const StencilView& s, std::span<const double> padded, std::span<double> out);
void euler_update(std::span<const double> u, std::span<const double> ku, std::span<const double> b,
                  std::span<const double> slope, const ReactionKPP& reaction, double dt, std::span<double> out);
std::size_t perron_update(double eps, std::span<const double> u, std::span<const double> a,
                          std::span<const double> t, double root_tol, std::span<double> w_out);
}  // namespace serial

/// Scalar root of eps*(u + w) + a = t*exp(-w) (t > 0); shared by both variants.
/// Returns false if the tolerance was not met in the iteration budget.
bool solve_perron_scalar(double eps, double u, double a, double t, double root_tol, double& w);

}  // namespace nlspread::kernels
