#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "nlspread/discrete_kernel.hpp"
#include "nlspread/grid.hpp"
#include "nlspread/kernel.hpp"
#include "nlspread/profile.hpp"

namespace nlspread {

/// L_p phi(x) = int K(x,y) e^{p(y-x)} phi(y) dy - a(x) phi(x), with a = b - f'_s(.,0).
struct TiltedOperator {
  Kernel kernel;
  CoefficientProfile a;
  double p = 0.0;
};

enum class EigenMethod { closed_form, periodic_power, discount_limit, rayleigh };
const char* to_string(EigenMethod m);
EigenMethod eigen_method_from_string(const std::string& s);

/// Certified bracket: lambda_lower bounds the lower generalized principal eigenvalue
/// from below and lambda_upper bounds the upper one from above, both realized by the
/// positive witness over the window.
struct EigenEstimate {
  double lambda_lower = 0.0;
  double lambda_upper = 0.0;
  /// Best point estimate (power-iteration value, extrapolated discount limit, ...).
  double central = 0.0;
  double window_R = -std::numeric_limits<double>::infinity();
  Field witness;
  EigenMethod method = EigenMethod::rayleigh;
  std::size_t iterations = 0;
};

/// Discretized L_p on a grid with a given boundary extension.
class DiscreteTilted {
 public:
  DiscreteTilted(const TiltedOperator& op, const SpatialGrid& grid, Extension ext);

  const SpatialGrid& grid() const { return kp_.grid(); }
  Extension extension() const { return ext_; }
  const DiscreteKernel& kernel() const { return kp_; }
  std::span<const double> a() const { return a_; }
  /// Discrete tilted moments m_i = sum_j K_p(x_i, y_j) (grid treated as unbounded).
  std::span<const double> moments() const { return moments_; }

  /// out = K_p phi (no zeroth-order term).
  void apply_kernel(std::span<const double> phi, std::span<double> out) const;
  /// out = L_p phi.
  void apply(std::span<const double> phi, std::span<double> out) const;

 private:
  DiscreteKernel kp_;
  Extension ext_;
  std::vector<double> a_;
  std::vector<double> moments_;
};

/// L_p phi on phi's grid.
Field apply_tilted(const TiltedOperator& op, const Field& phi, Extension ext = Extension::constant);

/// Measurement window [left, right] of node positions.
struct Window {
  double left = -std::numeric_limits<double>::infinity();
  double right = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x >= left && x <= right; }
};

/// inf and sup of (L_p phi)/phi over the window. phi must be positive on the grid.
EigenEstimate rayleigh_bounds(const TiltedOperator& op, const Field& phi, const Window& window = {},
                              Extension ext = Extension::constant);
/// Same, with an already discretized operator.
EigenEstimate rayleigh_bounds(const DiscreteTilted& op, const Field& phi, const Window& window = {});

struct PowerOptions {
  double increment_tol = 1e-12;  ///< Rayleigh-quotient increment
  double pinch_tol = 1e-10;      ///< Collatz-Wielandt bracket width
  std::size_t max_iterations = 200000;
};

/// Principal eigenpair of L_p on one period cell of length L (a's period, or `period`
/// when a is constant), discretized with cell_nodes nodes and periodic wrap-around.
/// The bracket is the Collatz-Wielandt enclosure of the cell operator.
EigenEstimate periodic_principal_eigen(const TiltedOperator& op, std::size_t cell_nodes,
                                       std::optional<double> period = std::nullopt, const PowerOptions& opts = {});

void to_json(nlohmann::json& j, const EigenEstimate& e);

}  // namespace nlspread
