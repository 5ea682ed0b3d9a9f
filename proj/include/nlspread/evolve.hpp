#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nlspread/discrete_kernel.hpp"
#include "nlspread/grid.hpp"
#include "nlspread/kernel.hpp"
#include "nlspread/reaction.hpp"

namespace nlspread {

/// u_t = K u - b(x) u + f(x,u) discretized on a fixed grid with explicit Euler.
///
/// The update is a monotone map of [0,1]^n into itself whenever
/// dt * (sup b + L sup f'_s(.,0)) <= 0.9, with L the reaction's Lipschitz factor
/// (1 for the logistic shape).
class EvolutionOperator {
 public:
  EvolutionOperator(const Kernel& kernel, const ReactionKPP& reaction, const SpatialGrid& grid,
                    Extension ext = Extension::zero);

  const SpatialGrid& grid() const { return kernel_.grid(); }
  const DiscreteKernel& discrete_kernel() const { return kernel_; }
  const ReactionKPP& reaction() const { return reaction_; }
  Extension extension() const { return ext_; }
  std::span<const double> b() const { return b_; }
  std::span<const double> slope() const { return slope_; }

  /// Largest dt satisfying the monotone-step condition.
  double max_dt() const;
  /// 0.5 / (sup b + sup f'_s(.,0)).
  double default_dt() const;
  /// Bound on the linear spreading rate in either direction; also bounds the speed at
  /// which boundary truncation effects travel inward.
  double speed_bound() const;

  /// One step; throws NumericalFailure if the result leaves [0,1] by more than 1e-12
  /// and InvalidInput if dt violates the step condition.
  void step(std::span<const double> u, std::span<double> out, double dt) const;

 private:
  DiscreteKernel kernel_;
  ReactionKPP reaction_;
  Extension ext_;
  std::vector<double> b_;
  std::vector<double> slope_;
  mutable std::vector<double> ku_;
};

/// Single explicit step on u's grid (zero extension unless stated).
Field step(const Field& u, const Kernel& k, const ReactionKPP& r, double dt, Extension ext = Extension::zero);

struct Snapshot {
  double time = 0.0;
  Field u;
};

/// Snapshots of one run plus the boundary-contamination mask shared by all of them.
struct Trajectory {
  SpatialGrid grid;
  std::vector<Snapshot> snapshots;
  /// true where the node lies within horizon * speed_bound + truncation_radius of a
  /// truncated boundary; excluded from all measurements.
  std::vector<bool> contaminated;
  double dt = 0.0;
  double horizon = 0.0;
  double speed_bound = 0.0;
  double truncation_radius = 0.0;
  /// Largest |u - clamp(u,0,1)| seen over the run (0 for a clean monotone scheme).
  double max_excursion = 0.0;

  /// Half-open index range [first, last) of uncontaminated nodes (empty if first >= last).
  std::pair<std::size_t, std::size_t> clean_range() const;
};

struct EvolveOptions {
  std::optional<double> dt;
  Extension extension = Extension::zero;
};

/// Steps u0 to `horizon`, recording snapshots at the completed steps nearest to each
/// requested time.
Trajectory evolve(const Field& u0, const Kernel& k, const ReactionKPP& r, double horizon,
                  std::span<const double> snapshot_times, const EvolveOptions& opts = {});

/// Contamination mask for a grid truncated on both sides (none under periodic extension).
std::vector<bool> contamination_mask(const SpatialGrid& grid, double horizon, double speed_bound,
                                     double truncation_radius, Extension ext);

/// S_tau(a,b) = (-a tau, b tau).
struct Slab {
  double a = 1.0;
  double b = 1.0;
  double tau = 1.0;
};

/// max_{t <= T, z in S_tau(a-theta, b-theta)} |v(t,z) - v~(t,z)| for data agreeing on S_tau(a,b).
double localization_gap(const Field& v0, const Field& v0_tilde, const Kernel& k, const ReactionKPP& r,
                        double horizon, const Slab& slab, double theta, const EvolveOptions& opts = {});

/// Constant C of the bound gap <= C e^{C T} e^{-theta tau}, fitted so that it holds at
/// both measured slab sizes, and the observed log-gap slope.
struct LocalizationFit {
  double constant = 0.0;
  double log_gap_slope = 0.0;  ///< (ln g2 - ln g1) / (tau2 - tau1)
  double slope_ratio = 0.0;    ///< -log_gap_slope / theta (1 for exact e^{-theta tau})
};
LocalizationFit fit_localization(double gap1, double tau1, double gap2, double tau2, double theta, double horizon);

/// True iff every uncontaminated node of u(t,.) is strictly positive. u0 must be
/// nonnegative and not identically zero. The step is refined so that the discrete
/// stencil can reach across the whole grid within t.
bool positivity_time(const Field& u0, const Kernel& k, const ReactionKPP& r, double t,
                     const EvolveOptions& opts = {});

}  // namespace nlspread
