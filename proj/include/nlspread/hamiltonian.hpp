#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nlspread/front.hpp"
#include "nlspread/reaction.hpp"
#include "nlspread/regularized.hpp"
#include "nlspread/tilted.hpp"

namespace nlspread {

/// Kernel and media of one spreading problem plus the discretization used by the
/// grid-based eigen methods.
struct EigenProblem {
  Kernel kernel;
  CoefficientProfile a;  ///< b - f'_s(.,0)
  SpatialGrid grid = SpatialGrid::symmetric(60.0, 0.05);
  Extension extension = Extension::constant;
  std::size_t cell_nodes = 256;
  std::vector<double> eps_schedule{0.2, 0.1, 0.05, 0.025};
  RegularizedOptions regularized;  ///< its window also limits Rayleigh bounds

  /// Reflected kernel K(-x,-y), media a(-x), mirrored grid and window.
  EigenProblem reflected() const;
};

/// a = b - f'_s(.,0). For translation-invariant kernels b is a constant and a keeps the
/// structure of the slope profile; separable kernels tabulate a on the grid.
EigenProblem make_eigen_problem(const Kernel& k, const ReactionKPP& r, const SpatialGrid& grid);

/// Closed form > periodic power iteration > discount limit > Rayleigh with phi = 1.
EigenMethod best_method(const EigenProblem& problem);
EigenEstimate estimate_eigen(const EigenProblem& problem, double p, EigenMethod method);

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  double central = 0.0;
};
using HamiltonianSource = std::function<Bracket(double)>;

/// Sampled p -> [H_lower(p), H_upper(p)] together with evaluators for on-demand
/// refinement, both for the problem itself and for its reflection (left direction).
struct HamiltonianCurve {
  std::vector<double> p_samples;
  std::vector<double> H_lower;
  std::vector<double> H_upper;
  std::vector<double> H_central;
  std::vector<EigenMethod> methods;
  std::vector<std::string> failures;  ///< empty where the sample succeeded
  HamiltonianSource source;
  HamiltonianSource reflected_source;
  /// Largest |p| at which the sources may be evaluated.
  double max_tilt = 50.0;

  /// Exact curve p -> H(p); the reflection is p -> H(-p).
  static HamiltonianCurve from_function(std::vector<double> p_samples, const std::function<double(double)>& h,
                                        double max_tilt = 50.0);

  bool complete() const;
  /// Smallest second difference of H_upper over consecutive successful samples.
  double min_second_difference() const;
};

HamiltonianCurve hamiltonian_curve(const EigenProblem& problem, std::span<const double> p_grid,
                                   std::optional<EigenMethod> method = std::nullopt);

struct SpeedSearchOptions {
  double rel_tol = 1e-6;
  double p_min = 0.02;
  double p_max = 0.0;  ///< 0: min(20, curve.max_tilt)
  int scan_points = 24;
  bool central = true;  ///< also minimize the central estimate
};

/// omega = min_{p>0} H(-p)/p for H_lower and H_upper (and the central estimate).
struct SpeedResult {
  Direction direction = Direction::right;
  double omega_lower = 0.0;
  double omega_upper = 0.0;
  double omega_central = 0.0;
  double argmin_lower = 0.0;
  double argmin_upper = 0.0;
  double argmin_central = 0.0;
  double rel_tol = 1e-6;

  /// [omega_lower, omega_upper] widened by the search tolerance.
  double bracket_low() const;
  double bracket_high() const;
  bool contains(double omega) const { return omega >= bracket_low() && omega <= bracket_high(); }
};

SpeedResult speed_from_hamiltonian(const HamiltonianCurve& curve, Direction dir, const SpeedSearchOptions& opts = {});

/// H*(q) = sup_p (p q - H(p)) from the sampled H_lower (or H_upper), refined by a local
/// parabolic interpolation between samples.
std::vector<std::pair<double, double>> legendre_transform(const HamiltonianCurve& curve, std::span<const double> q_grid,
                                                          bool use_upper = false);

struct LeftRightReport {
  std::vector<double> p;
  std::vector<Bracket> right;
  std::vector<Bracket> left;
  std::vector<bool> overlap;
  bool brackets_overlap = true;
  SpeedResult speed_right;
  SpeedResult speed_left;
  bool speeds_overlap = true;
};

/// Eigenvalue brackets of the problem and of its reflection at the same tilts, and the
/// two directional speeds. The kernel must be symmetric.
LeftRightReport left_right_compare(const EigenProblem& problem, std::span<const double> p_grid,
                                   std::optional<EigenMethod> method = std::nullopt,
                                   const SpeedSearchOptions& opts = {});

void to_json(nlohmann::json& j, const SpeedResult& s);
void to_json(nlohmann::json& j, const HamiltonianCurve& c);
void to_json(nlohmann::json& j, const LeftRightReport& r);

}  // namespace nlspread
