#include "nlspread/front.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "nlspread/error.hpp"

namespace nlspread {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  double slope_stderr = 0.0;
};

LineFit least_squares(std::span<const double> t, std::span<const double> y) {
  const auto n = static_cast<double>(t.size());
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tm += t[i];
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
  }
  LineFit f;
  f.slope = sty / stt;
  f.intercept = ym - f.slope * tm;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * t[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  f.slope_stderr = t.size() > 2 ? std::sqrt(ss / (n - 2.0) / stt) : 0.0;
  return f;
}

}  // namespace

const char* to_string(Direction d) { return d == Direction::right ? "right" : "left"; }

Direction direction_from_string(const std::string& s) {
  if (s == "right") return Direction::right;
  if (s == "left") return Direction::left;
  throw InvalidInput("unknown direction '" + s + "'");
}

double front_position(const Field& u, double threshold, Direction dir, std::size_t first, std::size_t last) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("front_position: threshold must lie in (0,1)");
  const auto& g = u.grid();
  last = std::min(last, g.n);
  if (first + 1 >= last) throw InvalidInput("front_position: empty measurement window");
  if (dir == Direction::right) {
    std::size_t i = last;
    for (std::size_t j = last; j-- > first;) {
      if (u[j] >= threshold) {
        i = j;
        break;
      }
    }
    if (i == last) throw NumericalFailure("front", "level not attained in the measurable window");
    if (i + 1 >= last) throw NumericalFailure("front", "front left the measurable window on the right");
    return g.x(i) + g.dx * (u[i] - threshold) / (u[i] - u[i + 1]);
  }
  std::size_t i = last;
  for (std::size_t j = first; j < last; ++j) {
    if (u[j] >= threshold) {
      i = j;
      break;
    }
  }
  if (i == last) throw NumericalFailure("front", "level not attained in the measurable window");
  if (i == first) throw NumericalFailure("front", "front left the measurable window on the left");
  return g.x(i) - g.dx * (u[i] - threshold) / (u[i] - u[i - 1]);
}

double front_position(const Field& u, double threshold, Direction dir) {
  return front_position(u, threshold, dir, 0, u.size());
}

double bulk_edge(const Field& u, double delta, Direction dir, std::size_t first, std::size_t last) {
  const auto& g = u.grid();
  const double level = 1.0 - delta;
  std::size_t origin = g.nearest(0.0);
  if (origin < first || origin >= last) throw InvalidInput("bulk_edge: x = 0 is outside the measurement window");
  if (u[origin] < level) return 0.0;
  if (dir == Direction::right) {
    std::size_t i = origin;
    while (i + 1 < last && u[i + 1] >= level) ++i;
    if (i + 1 >= last) throw NumericalFailure("front", "bulk region reached the measurable window edge");
    return std::max(0.0, g.x(i) + g.dx * (u[i] - level) / (u[i] - u[i + 1]));
  }
  std::size_t i = origin;
  while (i > first && u[i - 1] >= level) --i;
  if (i == first) throw NumericalFailure("front", "bulk region reached the measurable window edge");
  return std::min(0.0, g.x(i) - g.dx * (u[i] - level) / (u[i] - u[i - 1]));
}

double SpeedEstimate::fit_tolerance() const {
  return 0.02 * std::abs(omega_upper) + 3.0 * (omega_upper_stderr + omega_lower_stderr);
}

SpeedEstimate estimate_speeds(const Trajectory& traj, std::span<const double> thresholds, Direction dir,
                              const SpeedFitOptions& opts) {
  if (thresholds.empty()) throw InvalidInput("estimate_speeds: need at least one threshold");
  const auto [first, last] = traj.clean_range();
  if (first >= last) throw InvalidInput("estimate_speeds: no uncontaminated nodes");
  const std::size_t n = traj.snapshots.size();
  const auto start = static_cast<std::size_t>(std::floor((1.0 - opts.fit_fraction) * static_cast<double>(n)));
  if (n - start < opts.min_snapshots)
    throw InvalidInput("estimate_speeds: need at least " + std::to_string(opts.min_snapshots) +
                       " snapshots in the fit window");
  const double sign = dir == Direction::right ? 1.0 : -1.0;

  SpeedEstimate est;
  est.direction = dir;
  est.delta_bulk = opts.delta_bulk;
  est.thresholds.assign(thresholds.begin(), thresholds.end());
  est.t_start = traj.snapshots[start].time;
  est.t_end = traj.snapshots.back().time;
  est.snapshots_used = n - start;

  std::vector<double> times;
  for (std::size_t s = start; s < n; ++s) times.push_back(traj.snapshots[s].time);

  auto positions = [&](double level) {
    std::vector<double> y;
    for (std::size_t s = start; s < n; ++s) {
      try {
        y.push_back(sign * front_position(traj.snapshots[s].u, level, dir, first, last));
      } catch (const NumericalFailure&) {
        throw NumericalFailure("front", "front escapes the uncontaminated window at t=" +
                                            std::to_string(traj.snapshots[s].time) + "; use a larger grid");
      }
    }
    return y;
  };

  const std::size_t smallest =
      static_cast<std::size_t>(std::min_element(thresholds.begin(), thresholds.end()) - thresholds.begin());
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const auto fit = least_squares(times, positions(thresholds[k]));
    est.threshold_speeds.push_back(fit.slope);
    if (k == smallest) {
      est.omega_upper = fit.slope;
      est.residual = fit.rms;
      est.omega_upper_stderr = fit.slope_stderr;
    }
  }

  std::vector<double> edges;
  for (std::size_t s = start; s < n; ++s)
    edges.push_back(sign * bulk_edge(traj.snapshots[s].u, opts.delta_bulk, dir, first, last));
  const auto bulk = least_squares(times, edges);
  est.omega_lower = bulk.slope;
  est.omega_lower_stderr = bulk.slope_stderr;
  return est;
}

std::vector<std::pair<double, double>> front_history(const Trajectory& traj, double threshold, Direction dir) {
  const auto [first, last] = traj.clean_range();
  std::vector<std::pair<double, double>> out;
  for (const auto& s : traj.snapshots) {
    double x = std::numeric_limits<double>::quiet_NaN();
    try {
      x = front_position(s.u, threshold, dir, first, last);
    } catch (const NumericalFailure&) {
    }
    out.emplace_back(s.time, x);
  }
  return out;
}

std::vector<RescaledPoint> rescaled_log_profile(const Trajectory& traj, double eps, std::span<const double> t_query,
                                                std::span<const double> x_query) {
  if (!(eps > 0.0)) throw InvalidInput("rescaled_log_profile: eps must be positive");
  const auto& g = traj.grid;
  std::vector<RescaledPoint> out;
  for (double t : t_query) {
    const double ts = t / eps;
    const Snapshot* snap = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.snapshots) {
      const double d = std::abs(s.time - ts);
      if (d < best) {
        best = d;
        snap = &s;
      }
    }
    if (snap == nullptr || best > traj.dt * (1.0 + 1e-9))
      throw InvalidInput("rescaled_log_profile: time " + std::to_string(ts) + " is not covered by a snapshot");
    for (double x : x_query) {
      const double xs = x / eps;
      if (xs < g.x_min || xs > g.x_max()) throw InvalidInput("rescaled_log_profile: point outside simulated domain");
      const double s = (xs - g.x_min) / g.dx;
      const auto i = std::min(static_cast<std::size_t>(s), g.n - 2);
      const double frac = s - static_cast<double>(i);
      const double u = (1.0 - frac) * snap->u[i] + frac * snap->u[i + 1];
      RescaledPoint pt;
      pt.t = t;
      pt.x = x;
      pt.masked = traj.contaminated[i] || traj.contaminated[i + 1];
      pt.z = u > 0.0 ? eps * std::log(u) : -std::numeric_limits<double>::infinity();
      out.push_back(pt);
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const SpeedEstimate& s) {
  j = {{"direction", to_string(s.direction)},
       {"omega_upper", s.omega_upper},
       {"omega_lower", s.omega_lower},
       {"fit_window", {s.t_start, s.t_end}},
       {"residual", s.residual},
       {"omega_upper_stderr", s.omega_upper_stderr},
       {"omega_lower_stderr", s.omega_lower_stderr},
       {"delta_bulk", s.delta_bulk},
       {"thresholds", s.thresholds},
       {"threshold_speeds", s.threshold_speeds},
       {"snapshots_used", s.snapshots_used}};
}

}  // namespace nlspread
