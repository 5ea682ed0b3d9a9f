#include "nlspread/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <nlohmann/json.hpp>

#include "nlspread/error.hpp"
#include "nlspread/optimize.hpp"

namespace nlspread {

EigenProblem EigenProblem::reflected() const {
  EigenProblem r = *this;
  r.kernel = reflect_kernel(kernel);
  r.a = a.reflected();
  r.grid = SpatialGrid(-grid.x_max(), grid.dx, grid.n);
  r.regularized.window = Window{-regularized.window.right, -regularized.window.left};
  return r;
}

EigenProblem make_eigen_problem(const Kernel& k, const ReactionKPP& r, const SpatialGrid& grid) {
  EigenProblem prob{k, CoefficientProfile{}, grid, Extension::constant, 256, {0.2, 0.1, 0.05, 0.025}, {}};
  if (k.is_translation_invariant()) {
    prob.a = CoefficientProfile::affine(kernel_mass(k, 0.0), -1.0, r.slope_profile());
  } else {
    const double margin = k.truncation_radius();
    const auto n = grid.n + 2 * static_cast<std::size_t>(std::ceil(margin / grid.dx));
    const double x0 = grid.x_min - std::ceil(margin / grid.dx) * grid.dx;
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = x0 + static_cast<double>(i) * grid.dx;
      values[i] = kernel_mass(k, x) - r.slope(x);
    }
    prob.a = CoefficientProfile::tabulated(x0, grid.dx, std::move(values));
  }
  return prob;
}

EigenMethod best_method(const EigenProblem& problem) {
  const bool invariant = problem.kernel.is_translation_invariant();
  if (invariant && problem.a.is_constant()) return EigenMethod::closed_form;
  if (invariant && problem.a.period()) return EigenMethod::periodic_power;
  if (problem.a.is_almost_periodic()) return EigenMethod::discount_limit;
  return EigenMethod::rayleigh;
}

EigenEstimate estimate_eigen(const EigenProblem& problem, double p, EigenMethod method) {
  const TiltedOperator op{problem.kernel, problem.a, p};
  switch (method) {
    case EigenMethod::closed_form: {
      if (!problem.kernel.is_translation_invariant() || !problem.a.is_constant())
        throw InvalidInput("closed form needs a translation-invariant kernel and constant media");
      if (std::abs(p) * problem.kernel.truncation_radius() > kOverflowGuard)
        throw NumericalFailure("kernel", "overflow guard tripped for tilt " + std::to_string(p));
      EigenEstimate e;
      e.lambda_lower = e.lambda_upper = e.central = tilted_moment(problem.kernel, 0.0, p) - problem.a(0.0);
      e.witness = Field(SpatialGrid(0.0, 1.0, 2), 1.0);
      e.method = EigenMethod::closed_form;
      return e;
    }
    case EigenMethod::periodic_power:
      return periodic_principal_eigen(op, problem.cell_nodes);
    case EigenMethod::discount_limit:
      return discount_limit(op, problem.grid, problem.extension, problem.eps_schedule, problem.regularized).estimate;
    case EigenMethod::rayleigh:
      return rayleigh_bounds(op, Field(problem.grid, 1.0), problem.regularized.window, problem.extension);
  }
  throw InvalidInput("unknown eigen method");
}

namespace {

// Thread-safe memo so that repeated evaluations during speed searches are free and
// every consumer sees the same value for the same tilt.
HamiltonianSource memoize(HamiltonianSource f) {
  struct Cache {
    std::mutex mutex;
    std::map<double, Bracket> values;
  };
  auto cache = std::make_shared<Cache>();
  return [f = std::move(f), cache](double p) {
    {
      std::lock_guard lock(cache->mutex);
      if (auto it = cache->values.find(p); it != cache->values.end()) return it->second;
    }
    const Bracket b = f(p);
    std::lock_guard lock(cache->mutex);
    cache->values.emplace(p, b);
    return b;
  };
}

HamiltonianSource problem_source(EigenProblem problem, EigenMethod method) {
  return memoize([problem = std::move(problem), method](double p) {
    const auto e = estimate_eigen(problem, p, method);
    return Bracket{e.lambda_lower, e.lambda_upper, e.central};
  });
}

}  // namespace

HamiltonianCurve HamiltonianCurve::from_function(std::vector<double> p_samples, const std::function<double(double)>& h,
                                                 double max_tilt) {
  HamiltonianCurve c;
  c.p_samples = std::move(p_samples);
  for (double p : c.p_samples) {
    const double v = h(p);
    c.H_lower.push_back(v);
    c.H_upper.push_back(v);
    c.H_central.push_back(v);
    c.methods.push_back(EigenMethod::closed_form);
    c.failures.emplace_back();
  }
  c.source = [h](double p) {
    const double v = h(p);
    return Bracket{v, v, v};
  };
  c.reflected_source = [h](double p) {
    const double v = h(-p);
    return Bracket{v, v, v};
  };
  c.max_tilt = max_tilt;
  return c;
}

bool HamiltonianCurve::complete() const {
  return std::all_of(failures.begin(), failures.end(), [](const std::string& f) { return f.empty(); });
}

double HamiltonianCurve::min_second_difference() const {
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < p_samples.size(); ++i)
    if (failures[i].empty()) ok.push_back(i);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < ok.size(); ++k) {
    const double p0 = p_samples[ok[k - 1]], p1 = p_samples[ok[k]], p2 = p_samples[ok[k + 1]];
    const double s1 = (H_upper[ok[k]] - H_upper[ok[k - 1]]) / (p1 - p0);
    const double s2 = (H_upper[ok[k + 1]] - H_upper[ok[k]]) / (p2 - p1);
    worst = std::min(worst, (s2 - s1) / (0.5 * (p2 - p0)));
  }
  return worst;
}

HamiltonianCurve hamiltonian_curve(const EigenProblem& problem, std::span<const double> p_grid,
                                   std::optional<EigenMethod> method) {
  const EigenMethod m = method.value_or(best_method(problem));
  const EigenMethod m_reflected = method.value_or(best_method(problem.reflected()));
  HamiltonianCurve c;
  c.source = problem_source(problem, m);
  c.reflected_source = problem_source(problem.reflected(), m_reflected);
  c.max_tilt = kOverflowGuard / (1.01 * problem.kernel.truncation_radius());
  const std::size_t n = p_grid.size();
  c.p_samples.assign(p_grid.begin(), p_grid.end());
  c.H_lower.assign(n, 0.0);
  c.H_upper.assign(n, 0.0);
  c.H_central.assign(n, 0.0);
  c.methods.assign(n, m);
  c.failures.assign(n, std::string());
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      const Bracket b = c.source(c.p_samples[k]);
      c.H_lower[k] = b.lower;
      c.H_upper[k] = b.upper;
      c.H_central[k] = b.central;
    } catch (const std::exception& e) {
      c.failures[k] = e.what();
      c.H_lower[k] = c.H_upper[k] = c.H_central[k] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return c;
}

double SpeedResult::bracket_low() const { return omega_lower - rel_tol * std::abs(omega_lower); }
double SpeedResult::bracket_high() const { return omega_upper + rel_tol * std::abs(omega_upper); }

namespace {

ScalarMinimum minimize_ratio(const std::function<double(double)>& h_neg, const SpeedSearchOptions& opts,
                             double p_max_allowed) {
  auto g = [&](double p) {
    try {
      const double v = h_neg(p) / p;
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const NumericalFailure&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double lo = opts.p_min;
  double hi = opts.p_max > 0.0 ? opts.p_max : std::min(20.0, p_max_allowed);
  if (!(lo < hi)) throw InvalidInput("speed search: empty tilt range");
  for (int attempt = 0; attempt < 12; ++attempt) {
    const int m = std::max(opts.scan_points, 5);
    std::vector<double> ps(static_cast<std::size_t>(m)), gs(ps.size());
    for (int k = 0; k < m; ++k) {
      ps[static_cast<std::size_t>(k)] = lo * std::pow(hi / lo, static_cast<double>(k) / (m - 1));
      gs[static_cast<std::size_t>(k)] = g(ps[static_cast<std::size_t>(k)]);
    }
    const auto best = static_cast<std::size_t>(std::min_element(gs.begin(), gs.end()) - gs.begin());
    if (!std::isfinite(gs[best])) break;
    if (best == 0 && lo > 1e-8) {
      hi = ps[1];
      lo /= 16.0;
      continue;
    }
    if (best + 1 == ps.size() && hi < p_max_allowed) {
      lo = ps[best - 1];
      hi = std::min(4.0 * hi, p_max_allowed);
      continue;
    }
    if (best == 0 || best + 1 == ps.size()) break;
    return golden_section(g, ps[best - 1], ps[best + 1], opts.rel_tol);
  }
  throw NumericalFailure("eigen", "no interior minimum of H(-p)/p for p in [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "]; H(-p)/p = " + std::to_string(g(lo)) + " and " +
                                      std::to_string(g(hi)) + " at the ends (superlinearity surrogate)");
}

}  // namespace

SpeedResult speed_from_hamiltonian(const HamiltonianCurve& curve, Direction dir, const SpeedSearchOptions& opts) {
  const HamiltonianSource& src = dir == Direction::right ? curve.source : curve.reflected_source;
  if (!src) throw InvalidInput("speed_from_hamiltonian: curve has no evaluator for this direction");
  SpeedResult s;
  s.direction = dir;
  s.rel_tol = opts.rel_tol;
  const auto lower = minimize_ratio([&](double p) { return src(-p).lower; }, opts, curve.max_tilt);
  const auto upper = minimize_ratio([&](double p) { return src(-p).upper; }, opts, curve.max_tilt);
  s.omega_lower = lower.value;
  s.argmin_lower = lower.x;
  s.omega_upper = upper.value;
  s.argmin_upper = upper.x;
  if (opts.central) {
    const auto central = minimize_ratio([&](double p) { return src(-p).central; }, opts, curve.max_tilt);
    s.omega_central = central.value;
    s.argmin_central = central.x;
  } else {
    s.omega_central = 0.5 * (s.omega_lower + s.omega_upper);
    s.argmin_central = 0.5 * (s.argmin_lower + s.argmin_upper);
  }
  return s;
}

std::vector<std::pair<double, double>> legendre_transform(const HamiltonianCurve& curve, std::span<const double> q_grid,
                                                          bool use_upper) {
  const auto& h = use_upper ? curve.H_upper : curve.H_lower;
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < curve.p_samples.size(); ++i)
    if (curve.failures[i].empty()) ok.push_back(i);
  if (ok.size() < 3) throw InvalidInput("legendre_transform: need at least three valid samples");
  for (std::size_t k = 1; k < ok.size(); ++k)
    if (!(curve.p_samples[ok[k]] > curve.p_samples[ok[k - 1]]))
      throw InvalidInput("legendre_transform: p samples must be increasing");

  // Refine H by the local parabola through each sample triple, then take the sup over the
  // fixed refined set so the transform stays convex in q.
  constexpr int kSub = 32;
  std::vector<double> pp, hh;
  for (std::size_t k = 0; k + 1 < ok.size(); ++k) {
    const std::size_t m = k == 0 ? 0 : k - 1;
    const double x0 = curve.p_samples[ok[m]], x1 = curve.p_samples[ok[m + 1]], x2 = curve.p_samples[ok[m + 2]];
    const double y0 = h[ok[m]], y1 = h[ok[m + 1]], y2 = h[ok[m + 2]];
    const double a = curve.p_samples[ok[k]], b = curve.p_samples[ok[k + 1]];
    for (int j = 0; j < kSub; ++j) {
      const double x = a + (b - a) * j / kSub;
      pp.push_back(x);
      hh.push_back(y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)) +
                   y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)) +
                   y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1)));
    }
  }
  pp.push_back(curve.p_samples[ok.back()]);
  hh.push_back(h[ok.back()]);

  std::vector<std::pair<double, double>> out;
  for (double q : q_grid) {
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pp.size(); ++k) {
      const double v = pp[k] * q - hh[k];
      if (v > best_v) {
        best_v = v;
        best = k;
      }
    }
    if (best == 0 || best + 1 == pp.size())
      throw NumericalFailure("eigen", "Legendre sup at q=" + std::to_string(q) +
                                          " is attained on the p-grid boundary; widen the grid");
    out.emplace_back(q, best_v);
  }
  return out;
}

LeftRightReport left_right_compare(const EigenProblem& problem, std::span<const double> p_grid,
                                   std::optional<EigenMethod> method, const SpeedSearchOptions& opts) {
  if (!problem.kernel.is_symmetric())
    throw InvalidInput("left_right_compare: kernel is not symmetric, left/right equality does not apply");
  const auto curve = hamiltonian_curve(problem, p_grid, method);
  LeftRightReport rep;
  rep.p.assign(p_grid.begin(), p_grid.end());
  for (std::size_t i = 0; i < rep.p.size(); ++i) {
    if (!curve.failures[i].empty()) throw NumericalFailure("eigen", curve.failures[i]);
    rep.right.push_back(Bracket{curve.H_lower[i], curve.H_upper[i], curve.H_central[i]});
    rep.left.push_back(curve.reflected_source(rep.p[i]));
    const bool ov = rep.right[i].lower <= rep.left[i].upper && rep.left[i].lower <= rep.right[i].upper;
    rep.overlap.push_back(ov);
    rep.brackets_overlap = rep.brackets_overlap && ov;
  }
  rep.speed_right = speed_from_hamiltonian(curve, Direction::right, opts);
  rep.speed_left = speed_from_hamiltonian(curve, Direction::left, opts);
  rep.speeds_overlap = rep.speed_right.bracket_low() <= rep.speed_left.bracket_high() &&
                       rep.speed_left.bracket_low() <= rep.speed_right.bracket_high();
  return rep;
}

void to_json(nlohmann::json& j, const SpeedResult& s) {
  j = {{"direction", to_string(s.direction)}, {"omega_lower", s.omega_lower},
       {"omega_upper", s.omega_upper},       {"omega_central", s.omega_central},
       {"argmin_lower", s.argmin_lower},     {"argmin_upper", s.argmin_upper},
       {"argmin_central", s.argmin_central}, {"rel_tol", s.rel_tol}};
}

void to_json(nlohmann::json& j, const HamiltonianCurve& c) {
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < c.p_samples.size(); ++i) {
    nlohmann::json row = {{"p", c.p_samples[i]}, {"method", to_string(c.methods[i])}};
    if (c.failures[i].empty()) {
      row["H_lower"] = c.H_lower[i];
      row["H_upper"] = c.H_upper[i];
      row["H_central"] = c.H_central[i];
    } else {
      row["failure"] = c.failures[i];
    }
    samples.push_back(row);
  }
  j = {{"samples", samples}};
}

void to_json(nlohmann::json& j, const LeftRightReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < r.p.size(); ++i)
    rows.push_back({{"p", r.p[i]},
                    {"right", {r.right[i].lower, r.right[i].upper}},
                    {"left", {r.left[i].lower, r.left[i].upper}},
                    {"overlap", static_cast<bool>(r.overlap[i])}});
  j = {{"tilts", rows},
       {"brackets_overlap", r.brackets_overlap},
       {"speed_right", r.speed_right},
       {"speed_left", r.speed_left},
       {"speeds_overlap", r.speeds_overlap}};
}

}  // namespace nlspread
