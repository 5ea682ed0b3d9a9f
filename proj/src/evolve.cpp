#include "nlspread/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlspread/error.hpp"

namespace nlspread {

namespace {

constexpr double kRangeTolerance = 1e-12;

double sup(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }
double inf(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

EvolutionOperator::EvolutionOperator(const Kernel& kernel, const ReactionKPP& reaction, const SpatialGrid& grid,
                                     Extension ext)
    : kernel_(kernel, grid), reaction_(reaction), ext_(ext), b_(kernel_.row_sums()),
      slope_(reaction.slope_profile().sample(grid.x_min, grid.dx, grid.n)), ku_(grid.n) {}

double EvolutionOperator::max_dt() const { return 0.9 / (sup(b_) + reaction_.lipschitz_factor() * sup(slope_)); }

double EvolutionOperator::default_dt() const { return 0.5 / (sup(b_) + sup(slope_)); }

double EvolutionOperator::speed_bound() const {
  // min over p > 0 of (sup_x sum_k w_k e^{-+ p k dx} - inf b + L sup r) / p, both directions.
  const double growth = reaction_.lipschitz_factor() * sup(slope_) - inf(b_);
  const auto offsets = kernel_.offsets();
  const auto weights = kernel_.weights();
  const double dx = grid().dx;
  double wmax = 1.0;
  if (kernel_.modulated()) {
    // Row sums of a separable kernel are bounded by (sup w)^2 times the density sums.
    const auto sums = kernel_.row_sums();
    double plain = 0.0;
    for (double w : weights) plain += w;
    wmax = plain > 0.0 ? sup(sums) / plain : 1.0;
    wmax = std::max(wmax, 1.0);
  }
  const double reach = std::max(1, kernel_.reach()) * dx;
  const double p_hi = std::min(50.0, 0.9 * kOverflowGuard / reach);
  // The bound must hold in both directions, so the larger directional minimum is used.
  double worst = 0.0;
  for (int dir : {-1, 1}) {
    double dmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 600; ++j) {
      const double p = 1e-3 * std::pow(p_hi / 1e-3, j / 600.0);
      double m = 0.0;
      for (std::size_t k = 0; k < offsets.size(); ++k) m += weights[k] * std::exp(dir * p * offsets[k] * dx);
      dmin = std::min(dmin, (m * wmax + growth) / p);
    }
    worst = std::max(worst, dmin);
  }
  return std::max(worst, 0.0);
}

void EvolutionOperator::step(std::span<const double> u, std::span<double> out, double dt) const {
  if (!(dt > 0.0) || dt > max_dt() * (1.0 + 1e-12))
    throw InvalidInput("step: dt violates the monotone-step condition dt*(sup b + sup f') <= 0.9");
  kernel_.apply(u, ku_, ext_);
  kernels::euler_update(u, ku_, b_, slope_, reaction_, dt, out);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = out[i];
    if (!(v >= -kRangeTolerance && v <= 1.0 + kRangeTolerance))
      throw NumericalFailure("evolve", "scheme failure: u left [0,1] at node " + std::to_string(i) +
                                           " (value " + std::to_string(v) + ")");
  }
}

Field step(const Field& u, const Kernel& k, const ReactionKPP& r, double dt, Extension ext) {
  if (u.min() < 0.0 || u.max() > 1.0) throw InvalidInput("step: u must lie in [0,1]");
  EvolutionOperator op(k, r, u.grid(), ext);
  std::vector<double> out(u.size());
  op.step(u.values(), out, dt);
  return Field(u.grid(), std::move(out));
}

std::vector<bool> contamination_mask(const SpatialGrid& grid, double horizon, double speed_bound,
                                     double truncation_radius, Extension ext) {
  std::vector<bool> mask(grid.n, false);
  if (ext == Extension::periodic) return mask;
  const double layer = horizon * speed_bound + truncation_radius;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double d = std::min(grid.x(i) - grid.x_min, grid.x_max() - grid.x(i));
    mask[i] = d < layer;
  }
  return mask;
}

std::pair<std::size_t, std::size_t> Trajectory::clean_range() const {
  std::size_t first = 0;
  while (first < contaminated.size() && contaminated[first]) ++first;
  std::size_t last = first;
  while (last < contaminated.size() && !contaminated[last]) ++last;
  return {first, last};
}

Trajectory evolve(const Field& u0, const Kernel& k, const ReactionKPP& r, double horizon,
                  std::span<const double> snapshot_times, const EvolveOptions& opts) {
  if (u0.min() < 0.0 || u0.max() > 1.0) throw InvalidInput("evolve: u0 must lie in [0,1]");
  if (u0.max() <= 0.0) throw InvalidInput("evolve: u0 must not vanish identically");
  if (!(horizon >= 0.0)) throw InvalidInput("evolve: horizon must be nonnegative");
  EvolutionOperator op(k, r, u0.grid(), opts.extension);
  Trajectory traj;
  traj.grid = u0.grid();
  traj.dt = opts.dt.value_or(op.default_dt());
  traj.horizon = horizon;
  traj.speed_bound = op.speed_bound();
  traj.truncation_radius = k.truncation_radius();
  traj.contaminated = contamination_mask(traj.grid, horizon, traj.speed_bound, traj.truncation_radius,
                                         opts.extension);

  const auto total_steps = static_cast<long>(std::llround(horizon / traj.dt));
  std::vector<long> wanted;
  for (double t : snapshot_times) {
    if (t < 0.0 || t > horizon + 0.5 * traj.dt) throw InvalidInput("evolve: snapshot time outside [0, T]");
    wanted.push_back(std::min(total_steps, static_cast<long>(std::llround(t / traj.dt))));
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  std::vector<double> u(u0.values().begin(), u0.values().end());
  std::vector<double> next(u.size());
  std::size_t w = 0;
  for (long s = 0; s <= total_steps && w < wanted.size(); ++s) {
    if (wanted[w] == s) {
      traj.snapshots.push_back({static_cast<double>(s) * traj.dt, Field(traj.grid, u)});
      ++w;
    }
    if (s == total_steps || w == wanted.size()) break;
    op.step(u, next, traj.dt);
    for (double v : next) traj.max_excursion = std::max({traj.max_excursion, -v, v - 1.0});
    u.swap(next);
  }
  return traj;
}

double localization_gap(const Field& v0, const Field& v0_tilde, const Kernel& k, const ReactionKPP& r,
                        double horizon, const Slab& slab, double theta, const EvolveOptions& opts) {
  if (!(v0.grid() == v0_tilde.grid())) throw InvalidInput("localization_gap: data on different grids");
  if (!(theta > 0.0 && theta < std::min(slab.a, slab.b)))
    throw InvalidInput("localization_gap: need 0 < theta < min(a, b)");
  const auto& g = v0.grid();
  const double lo = -slab.a * slab.tau;
  const double hi = slab.b * slab.tau;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    if (x > lo && x < hi && v0[i] != v0_tilde[i])
      throw InvalidInput("localization_gap: initial data differ inside the slab");
  }
  const double mlo = -(slab.a - theta) * slab.tau;
  const double mhi = (slab.b - theta) * slab.tau;
  std::vector<std::size_t> probe;
  for (std::size_t i = 0; i < g.n; ++i)
    if (g.x(i) > mlo && g.x(i) < mhi) probe.push_back(i);

  EvolutionOperator op(k, r, g, opts.extension);
  const double dt = opts.dt.value_or(op.default_dt());
  const auto steps = static_cast<long>(std::llround(horizon / dt));
  std::vector<double> v(v0.values().begin(), v0.values().end());
  std::vector<double> vt(v0_tilde.values().begin(), v0_tilde.values().end());
  std::vector<double> scratch(g.n);
  double gap = 0.0;
  for (long s = 0;; ++s) {
    for (std::size_t i : probe) gap = std::max(gap, std::abs(v[i] - vt[i]));
    if (s == steps) break;
    op.step(v, scratch, dt);
    v.swap(scratch);
    op.step(vt, scratch, dt);
    vt.swap(scratch);
  }
  return gap;
}

LocalizationFit fit_localization(double gap1, double tau1, double gap2, double tau2, double theta, double horizon) {
  if (!(gap1 > 0.0 && gap2 > 0.0) || tau1 == tau2) throw InvalidInput("fit_localization: need positive gaps");
  LocalizationFit fit;
  fit.log_gap_slope = (std::log(gap2) - std::log(gap1)) / (tau2 - tau1);
  fit.slope_ratio = -fit.log_gap_slope / theta;
  // Smallest C with C e^{C T} >= gap_k e^{theta tau_k} for both k.
  const double target = std::max(gap1 * std::exp(theta * tau1), gap2 * std::exp(theta * tau2));
  auto lhs = [&](double c) { return c * std::exp(c * horizon); };
  double lo = 0.0;
  double hi = 1.0;
  while (lhs(hi) < target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) < target ? lo : hi) = mid;
  }
  fit.constant = hi;
  return fit;
}

bool positivity_time(const Field& u0, const Kernel& k, const ReactionKPP& r, double t, const EvolveOptions& opts) {
  if (u0.min() < 0.0 || u0.max() <= 0.0)
    throw InvalidInput("positivity_time: u0 must be nonnegative and not identically zero");
  if (!(t > 0.0)) throw InvalidInput("positivity_time: t must be positive");
  EvolutionOperator op(k, r, u0.grid(), opts.extension);
  const auto& g = u0.grid();
  // Each step moves support by at most reach nodes; take enough steps to cross the grid.
  const double reach_nodes = std::max(1, op.discrete_kernel().reach());
  const double needed = std::ceil(2.0 * static_cast<double>(g.n) / reach_nodes);
  double dt = opts.dt.value_or(op.default_dt());
  dt = std::min(dt, t / needed);
  const double times[] = {t};
  EvolveOptions o = opts;
  o.dt = t / std::ceil(t / dt);
  const auto traj = evolve(u0, k, r, t, times, o);
  const auto& u = traj.snapshots.back().u;
  for (std::size_t i = 0; i < g.n; ++i)
    if (!traj.contaminated[i] && !(u[i] > 0.0)) return false;
  return true;
}

}  // namespace nlspread
