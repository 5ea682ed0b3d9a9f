// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nlspread/evolve.hpp"
#include "nlspread/front.hpp"
#include "nlspread/hamiltonian.hpp"

using namespace nlspread;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

Field bump(const SpatialGrid& g, double half_width = 2.0) {
  return Field::sample(g, [=](double x) { return std::abs(x) <= half_width ? 1.0 : 0.0; });
}

std::vector<double> every_unit(double horizon) {
  std::vector<double> t;
  for (int k = 0; k <= static_cast<int>(horizon); ++k) t.push_back(k);
  return t;
}

const double kSqrtE = std::sqrt(std::numbers::e);
// min_{p>0} sinh(p)/p^2, from the grid-search oracle in the unit tests
constexpr double kUniformSpeed = 0.9052617394;
// min_{p>0} cosh(p)/p
constexpr double kCombSpeed = 1.50887956;
const double kThresholds[] = {0.01, 0.1, 0.5};

const ReactionKPP kLogistic{CoefficientProfile::constant(1.0)};
const Kernel kGaussian = Kernel::convolution(Density::gaussian(1.0));
const Kernel kUniform = Kernel::convolution(Density::uniform(1.0));

// Every eigen bracket produced below, for the ordering check of criterion 10.
std::vector<std::pair<double, double>> g_brackets;

void record(const HamiltonianCurve& c) {
  for (std::size_t i = 0; i < c.p_samples.size(); ++i)
    if (c.failures[i].empty()) g_brackets.emplace_back(c.H_lower[i], c.H_upper[i]);
}

void record(const EigenEstimate& e) { g_brackets.emplace_back(e.lambda_lower, e.lambda_upper); }

SpeedResult eigen_speed(const Kernel& k, const ReactionKPP& r, Direction dir, HamiltonianCurve* keep = nullptr) {
  const auto prob = make_eigen_problem(k, r, SpatialGrid::symmetric(60.0, 0.05));
  const auto p = linspace(-3.0, 3.0, 25);
  const auto curve = hamiltonian_curve(prob, p);
  record(curve);
  if (keep != nullptr) *keep = curve;
  return speed_from_hamiltonian(curve, dir);
}

Trajectory run(const Kernel& k, const ReactionKPP& r, double half_width, double horizon, double dt = 0.02) {
  const SpatialGrid g = SpatialGrid::symmetric(half_width, 0.05);
  EvolveOptions opts;
  opts.dt = dt;
  const auto times = every_unit(horizon);
  return evolve(bump(g), k, r, horizon, times, opts);
}

// Shared Gaussian benchmark run (criteria 1, 7 and 10).
const Trajectory& gaussian_run() {
  static const Trajectory traj = run(kGaussian, kLogistic, 220.0, 60.0);
  return traj;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = eigen_speed(kGaussian, kLogistic, Direction::right);
  const double width = s.bracket_high() - s.bracket_low();
  const auto& traj = gaussian_run();
  const auto est = estimate_speeds(traj, kThresholds, Direction::right);
  const double rel = std::abs(est.omega_upper - kSqrtE) / kSqrtE;
  const double secs = seconds_since(t0);
  const bool ok = s.contains(kSqrtE) && width < 1e-4 && rel < 0.05 && traj.grid.n <= 200000 && secs < 300.0;
  return {ok, fmt("eigen bracket [%.7f, %.7f] width %.2e; empirical %.5f (rel err %.3f) on %zu nodes; %.1f s",
                  s.bracket_low(), s.bracket_high(), width, est.omega_upper, rel, traj.grid.n, secs)};
}

Outcome criterion2() {
  const auto s = eigen_speed(kUniform, kLogistic, Direction::right);
  const double width = s.bracket_high() - s.bracket_low();
  const auto traj = run(kUniform, kLogistic, 120.0, 60.0);
  const auto est = estimate_speeds(traj, kThresholds, Direction::right);
  const double rel = std::abs(est.omega_upper - kUniformSpeed) / kUniformSpeed;
  const bool ok = s.contains(kUniformSpeed) && width < 1e-4 && rel < 0.05;
  return {ok, fmt("oracle %.10f; eigen bracket [%.10f, %.10f] width %.2e at p=%.6f; empirical %.5f (rel err %.3f)",
                  kUniformSpeed, s.bracket_low(), s.bracket_high(), width, s.argmin_central, est.omega_upper, rel)};
}

Outcome criterion3() {
  const auto comb = Kernel::dirac_comb({{0.5, 1.0}, {0.5, -1.0}});
  const auto s = eigen_speed(comb, kLogistic, Direction::right);
  const auto traj = run(comb, kLogistic, 200.0, 60.0);
  const auto est = estimate_speeds(traj, kThresholds, Direction::right);
  const double rel = std::abs(est.omega_upper - kCombSpeed) / kCombSpeed;
  const bool ok = s.contains(kCombSpeed) && rel < 0.05;
  return {ok, fmt("eigen bracket [%.8f, %.8f]; comb evolution %.5f (rel err %.3f)", s.bracket_low(), s.bracket_high(),
                  est.omega_upper, rel)};
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const ReactionKPP r(CoefficientProfile::periodic(1.0, 1.0, {}, {0.5}));
  const auto prob = make_eigen_problem(kUniform, r, SpatialGrid::symmetric(10.0, 0.05));
  bool ok = true;
  std::string d;
  for (double p : {0.5, 1.0, 2.0}) {
    const TiltedOperator op{kUniform, prob.a, p};
    const auto per = periodic_principal_eigen(op, 256);
    // four whole periods with wrap-around at the cell resolution
    const auto dl = discount_limit(op, SpatialGrid(0.0, 1.0 / 256, 1024), Extension::periodic, prob.eps_schedule);
    record(per);
    record(dl.estimate);
    const double diff = std::abs(per.central - dl.lambda0);
    ok = ok && diff < 1e-3;
    d += fmt("p=%g: per %.8f, discount %.8f, |diff| %.1e; ", p, per.central, dl.lambda0, diff);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  return {ok, d + fmt("%.1f s", secs)};
}

CoefficientProfile sin_sum() {
  const double amp[] = {1.0, 1.0}, freq[] = {1.0, std::numbers::sqrt2}, ph[] = {0.0, 0.0};
  return make_quasiperiodic(amp, freq, ph);
}

Outcome criterion5() {
  const TiltedOperator op{kUniform, sin_sum(), 1.0};
  RegularizedOptions opts;
  opts.window = Window{-50.0, 50.0};
  const auto dl = discount_limit(op, SpatialGrid::symmetric(150.0, 0.1), Extension::constant,
                                 {0.2, 0.1, 0.05, 0.025}, opts);
  record(dl.estimate);
  bool decreasing = true;
  for (std::size_t i = 1; i < dl.flatness.size(); ++i) decreasing = decreasing && dl.flatness[i] < dl.flatness[i - 1];
  const double last = dl.flatness.back();
  std::string d = "flatness";
  for (double f : dl.flatness) d += fmt(" %.4f", f);
  d += fmt("; strictly decreasing: %s; last %.4f vs 0.05", decreasing ? "yes" : "no", last);
  return {decreasing && last < 0.05, d};
}

Outcome criterion6() {
  // f' = 2.5 - (sin x + sin sqrt2 x) > 0, so a = b - f' = sin x + sin sqrt2 x - 1.5
  const ReactionKPP r(CoefficientProfile::affine(2.5, -1.0, sin_sum()));
  // Truncation effects reach far inward at large tilts, so the grid is eight windows wide.
  auto prob = make_eigen_problem(kUniform, r, SpatialGrid::symmetric(400.0, 0.2));
  prob.regularized.window = Window{-50.0, 50.0};
  const auto p = linspace(-3.0, 3.0, 7);
  SpeedSearchOptions so;
  so.p_max = 6.0;
  so.rel_tol = 1e-4;
  so.central = false;
  const auto rep = left_right_compare(prob, p, EigenMethod::discount_limit, so);
  for (std::size_t i = 0; i < rep.p.size(); ++i) {
    g_brackets.emplace_back(rep.right[i].lower, rep.right[i].upper);
    g_brackets.emplace_back(rep.left[i].lower, rep.left[i].upper);
  }
  const auto& sr = rep.speed_right;
  const auto& sl = rep.speed_left;
  const bool speeds_overlap = sr.bracket_low() <= sl.bracket_high() && sl.bracket_low() <= sr.bracket_high();

  const auto traj = run(kUniform, r, 400.0, 60.0);
  const auto right = estimate_speeds(traj, kThresholds, Direction::right);
  const auto left = estimate_speeds(traj, kThresholds, Direction::left);
  const double rel = std::abs(right.omega_upper - left.omega_upper) / (0.5 * (right.omega_upper + left.omega_upper));
  return {speeds_overlap && rel < 0.05,
          fmt("right eigen [%.5f, %.5f], left eigen [%.5f, %.5f], tilt brackets overlap at every p: %s; "
              "empirical right %.4f, left %.4f (rel diff %.3f)",
              sr.bracket_low(), sr.bracket_high(), sl.bracket_low(), sl.bracket_high(),
              rep.brackets_overlap ? "yes" : "no", right.omega_upper, left.omega_upper, rel)};
}

Outcome criterion7() {
  const auto& traj = gaussian_run();
  const double t = 0.8 * traj.horizon;
  const Snapshot* snap = nullptr;
  for (const auto& s : traj.snapshots)
    if (std::abs(s.time - t) < 0.5 * traj.dt) snap = &s;
  if (snap == nullptr) return {false, "no snapshot at 0.8 T"};
  double ahead = 0.0, behind = 1.0;
  for (std::size_t i = 0; i < traj.grid.n; ++i) {
    const double x = traj.grid.x(i);
    if (traj.contaminated[i]) continue;
    if (x >= 1.1 * kSqrtE * t) ahead = std::max(ahead, snap->u[i]);
    if (x >= 0.0 && x <= 0.9 * kSqrtE * t) behind = std::min(behind, snap->u[i]);
  }
  return {ahead < 0.01 && behind > 0.95,
          fmt("t=%.1f: max u beyond 1.1 w t = %.3e (< 0.01), min u on [0, 0.9 w t] = %.5f (> 0.95)", t, ahead, behind)};
}

Outcome criterion8() {
  const ReactionKPP r(CoefficientProfile::periodic(1.0, 1.0, {}, {0.5}));
  const SpatialGrid g = SpatialGrid::symmetric(30.0, 0.1);
  EvolveOptions opts;
  opts.dt = 0.05;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double times[] = {0.5, 1.0, 2.0, 4.0};
  double excursion = 0.0;
  int ordered = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> lo(g.n), hi(g.n);
    const double support = 2.0 + 10.0 * unif(gen);
    for (std::size_t i = 0; i < g.n; ++i) {
      lo[i] = std::abs(g.x(i)) < support ? unif(gen) : 0.0;
      hi[i] = std::min(1.0, lo[i] + (unif(gen) < 0.5 ? 0.0 : 0.3 * unif(gen)));
    }
    if (*std::max_element(lo.begin(), lo.end()) == 0.0) lo[g.n / 2] = 0.1;
    hi[g.n / 2] = std::max(hi[g.n / 2], lo[g.n / 2]);
    const auto a = evolve(Field(g, lo), kUniform, r, 4.0, times, opts);
    const auto b = evolve(Field(g, hi), kUniform, r, 4.0, times, opts);
    excursion = std::max({excursion, a.max_excursion, b.max_excursion});
    bool ok = true;
    for (std::size_t s = 0; s < a.snapshots.size(); ++s)
      for (std::size_t i = 0; i < g.n; ++i) ok = ok && a.snapshots[s].u[i] <= b.snapshots[s].u[i];
    ordered += ok ? 1 : 0;
  }

  const Field compact = Field::sample(g, [](double x) { return std::abs(x) < 0.5 ? 0.2 : 0.0; });
  const bool positive = positivity_time(compact, kUniform, r, 1.0, opts);

  bool monotone = true;
  EvolveOptions cst = opts;
  cst.extension = Extension::constant;
  const auto steps = every_unit(10.0);
  for (double alpha : {0.05, 0.3, 0.7, 0.99}) {
    const auto traj = evolve(Field(g, alpha), kUniform, kLogistic, 10.0, steps, cst);
    excursion = std::max(excursion, traj.max_excursion);
    double prev = alpha;
    for (const auto& s : traj.snapshots) {
      monotone = monotone && s.u.min() >= prev && s.u.max() <= 1.0 && s.u.max() - s.u.min() < 1e-14;
      prev = s.u.min();
    }
    monotone = monotone && 1.0 - prev < (1.0 - alpha) * 1e-3;
  }
  const bool ok = ordered == 50 && positive && monotone && excursion == 0.0;
  return {ok, fmt("%d/50 pairs ordered; compact data positive by t=1: %s; constant data monotone to 1: %s; "
                  "clamping events: %s",
                  ordered, positive ? "yes" : "no", monotone ? "yes" : "no", excursion == 0.0 ? "0" : "some")};
}

Outcome criterion9() {
  // Kernel with an exponential tail (J = e^{-|xi|}/2, truncated at 40): the gap reaching
  // the inner slab decays like e^{-theta tau}.
  std::vector<double> table;
  for (int i = 0; i <= 800; ++i) table.push_back(0.5 * std::exp(-std::abs(-40.0 + 0.1 * i)));
  const Kernel k = Kernel::convolution(Density::tabulated(-40.0, 0.1, table));
  const SpatialGrid g = SpatialGrid::symmetric(80.0, 0.1);
  EvolveOptions opts;
  opts.dt = 0.02;
  const double theta = 0.5, horizon = 1.0;
  const double taus[] = {10.0, 20.0};
  double gaps[2];
  for (int j = 0; j < 2; ++j) {
    const double tau = taus[j];
    const Field v(g, 0.5);
    const Field w = Field::sample(g, [tau](double x) { return std::abs(x) < tau ? 0.5 : 0.0; });
    gaps[j] = localization_gap(v, w, k, kLogistic, horizon, Slab{1.0, 1.0, tau}, theta, opts);
  }
  const auto fit = fit_localization(gaps[0], taus[0], gaps[1], taus[1], theta, horizon);
  const bool ok = std::abs(fit.slope_ratio - 1.0) < 0.2;
  return {ok, fmt("gaps %.3e (tau=10), %.3e (tau=20); log-gap slope %.4f vs -theta = %.2f (ratio %.3f); C = %.3f",
                  gaps[0], gaps[1], fit.log_gap_slope, -theta, fit.slope_ratio, fit.constant)};
}

Outcome criterion10() {
  std::string d;
  // Lipschitz dependence on a: |lambda(a + delta) - lambda(a)| <= sup |delta|.
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> coef(-0.4, 0.4), tilt(-2.0, 2.0);
  const auto base = CoefficientProfile::periodic(1.0, 0.0, {}, {0.5});
  int lipschitz = 0;
  for (int k = 0; k < 10; ++k) {
    const double p = tilt(gen), c0 = coef(gen), c1 = coef(gen), s1 = coef(gen);
    const auto pert = CoefficientProfile::periodic(1.0, c0, {c1}, {0.5 + s1});
    const auto e0 = periodic_principal_eigen(TiltedOperator{kUniform, base, p}, 256);
    const auto e1 = periodic_principal_eigen(TiltedOperator{kUniform, pert, p}, 256);
    record(e0);
    record(e1);
    double sup = 0.0;
    for (int i = 0; i < 2000; ++i) sup = std::max(sup, std::abs(pert(i / 2000.0) - base(i / 2000.0)));
    lipschitz += std::abs(e1.central - e0.central) <= sup + 1e-9 ? 1 : 0;
  }

  // Convexity of H_upper on the Gaussian and a periodic medium.
  HamiltonianCurve gauss;
  eigen_speed(kGaussian, kLogistic, Direction::right, &gauss);
  const ReactionKPP periodic(CoefficientProfile::periodic(1.0, 1.0, {}, {0.5}));
  const auto pcurve = hamiltonian_curve(make_eigen_problem(kUniform, periodic, SpatialGrid::symmetric(20.0, 0.05)),
                                        linspace(-3.0, 3.0, 25));
  record(pcurve);
  const double convex = std::min(gauss.min_second_difference(), pcurve.min_second_difference());

  // Rescaled log-solution against the Legendre bound at eps = 0.05, t = 1.
  const double eps = 0.05;
  const auto& traj = gaussian_run();
  std::vector<double> xs;
  for (double x = -4.0; x <= 4.0 + 1e-9; x += 0.1) xs.push_back(x);
  const double t1[] = {1.0};
  const auto pts = rescaled_log_profile(traj, eps, t1, xs);
  std::vector<double> q;
  for (double x : xs) q.push_back(-x);
  const auto hstar = legendre_transform(gauss, q);
  double worst = INFINITY;
  int checked = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].masked) continue;
    const double bound = std::min(-hstar[i].second, 0.0) - 0.1;
    // below about -35 the solution underflows and z carries no information
    if (bound < -30.0) continue;
    worst = std::min(worst, pts[i].z - bound);
    ++checked;
  }

  bool ordered = true;
  for (const auto& [lo, hi] : g_brackets) ordered = ordered && lo <= hi;
  const bool ok = ordered && lipschitz == 10 && convex >= -1e-8 && checked > 0 && worst >= 0.0;
  d = fmt("bracket ordering on %zu estimates: %s; Lipschitz %d/10; min second difference %.2e; "
          "z - bound >= %.4f over %d points",
          g_brackets.size(), ordered ? "ok" : "violated", lipschitz, convex, worst, checked);
  return {ok, d};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %zu: %s (%s) [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
