#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nlspread/tilted.hpp"

namespace nlspread {

struct RegularizedOptions {
  /// Target accuracy of eps * u^eps (sup norm).
  double tol = 1e-9;
  double root_tol = 1e-13;
  std::size_t max_sweeps = 5'000'000;
  /// Nodes outside the window are solved but ignored for flatness and bracket reports.
  Window window;
  /// Use the serial stencil kernels (reference path for tests).
  bool serial = false;
};

/// Solution of eps u + a = int K_p(x,y) e^{u(y) - u(x)} dy on a grid.
struct RegularizedSolution {
  double epsilon = 0.0;
  Field u_eps;
  /// e^{u^eps - max u^eps}: the test function e^{u^eps} up to a constant factor.
  Field phi_eps;
  double flatness = 0.0;  ///< sup - inf of eps u^eps over the window
  double residual = 0.0;  ///< sup-norm residual over the whole grid
  double c_lower = 0.0;   ///< inf (m - a)
  double c_upper = 0.0;   ///< sup (m - a)
  std::size_t sweeps = 0;
};

/// Monotone Perron iteration started from the constant subsolution c_lower / eps.
RegularizedSolution solve_regularized(const DiscreteTilted& op, double eps, const RegularizedOptions& opts = {});
RegularizedSolution solve_regularized(const TiltedOperator& op, const SpatialGrid& grid, Extension ext, double eps,
                                      const RegularizedOptions& opts = {});

/// Measured Harnack constant: min over sampled pairs |x - y| < radius of
/// e^{u(y) - u(x)} / (a(x) + eps u(x)).
struct HarnackSample {
  double epsilon = 0.0;
  double radius = 0.0;
  double min_ratio = 0.0;
};
HarnackSample harnack_check(const DiscreteTilted& op, const RegularizedSolution& sol, double radius,
                            const Window& window = {});

enum class Verdict { pass, fail, unknown };
const char* to_string(Verdict v);

struct DiscountReport {
  EigenEstimate estimate;  ///< central = extrapolated lambda_0; bracket from the best witness
  double lambda0 = 0.0;
  double extrapolation_error = 0.0;
  std::vector<double> eps;
  std::vector<double> values;    ///< eps u^eps(x0)
  std::vector<double> flatness;
  double ratio_test = 0.0;       ///< (v1 - v2) / (v2 - v3); 2 for first order with halving
  bool flatness_decreasing = true;
  Verdict almost_periodic = Verdict::pass;
  std::vector<HarnackSample> harnack;
  RegularizedSolution finest;
};

/// Vanishing-discount limit over a decreasing schedule (>= 3 entries, ratios <= 1/2).
/// Polynomial (Richardson) extrapolation of eps u^eps at the window centre to eps = 0.
DiscountReport discount_limit(const DiscreteTilted& op, const std::vector<double>& schedule,
                              const RegularizedOptions& opts = {});
DiscountReport discount_limit(const TiltedOperator& op, const SpatialGrid& grid, Extension ext,
                              const std::vector<double>& schedule, const RegularizedOptions& opts = {});

void to_json(nlohmann::json& j, const RegularizedSolution& s);
void to_json(nlohmann::json& j, const DiscountReport& r);

}  // namespace nlspread
