#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nlspread/evolve.hpp"

namespace nlspread {

enum class Direction { right, left };
const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// Right: largest x with u(x) >= threshold, linearly interpolated towards the next
/// node; left: the mirror image. Only nodes in [first, last) are considered.
double front_position(const Field& u, double threshold, Direction dir, std::size_t first, std::size_t last);
/// Same, over the whole grid.
double front_position(const Field& u, double threshold, Direction dir);

/// Edge of the region {0 <= x <= X} (mirrored for left) on which u >= 1 - delta.
double bulk_edge(const Field& u, double delta, Direction dir, std::size_t first, std::size_t last);

struct SpeedEstimate {
  Direction direction = Direction::right;
  double omega_upper = 0.0;  ///< slope of the front at the smallest threshold
  double omega_lower = 0.0;  ///< slope of the bulk edge at level 1 - delta_bulk
  double t_start = 0.0;
  double t_end = 0.0;
  double residual = 0.0;     ///< RMS of the omega_upper fit
  double omega_upper_stderr = 0.0;
  double omega_lower_stderr = 0.0;
  double delta_bulk = 0.05;
  std::vector<double> thresholds;
  std::vector<double> threshold_speeds;  ///< fitted slope per threshold
  std::size_t snapshots_used = 0;

  /// Allowed excess of omega_lower over omega_upper.
  double fit_tolerance() const;
};

struct SpeedFitOptions {
  double delta_bulk = 0.05;
  double fit_fraction = 0.6;  ///< last fraction of snapshots used for the fits
  std::size_t min_snapshots = 10;
};

SpeedEstimate estimate_speeds(const Trajectory& traj, std::span<const double> thresholds, Direction dir,
                              const SpeedFitOptions& opts = {});

/// (t, front_x) pairs at one threshold over all snapshots (NaN once the front is lost).
std::vector<std::pair<double, double>> front_history(const Trajectory& traj, double threshold, Direction dir);

struct RescaledPoint {
  double t = 0.0;
  double x = 0.0;
  double z = 0.0;       ///< eps * ln u(t/eps, x/eps); -inf where u vanishes
  bool masked = false;  ///< boundary-contaminated: z is not meaningful
};

/// z_eps(t,x) = eps ln u(t/eps, x/eps) on the lattice t_query x x_query, from snapshots
/// already present in the trajectory (nearest snapshot within one step).
std::vector<RescaledPoint> rescaled_log_profile(const Trajectory& traj, double eps, std::span<const double> t_query,
                                                std::span<const double> x_query);

void to_json(nlohmann::json& j, const SpeedEstimate& s);

}  // namespace nlspread
