#include "nlspread/regularized.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "nlspread/error.hpp"
#include "nlspread/stencil_kernels.hpp"

namespace nlspread {

namespace {

// exp() of the spread of u must stay representable when forming e^{u(y) - u(x)}.
constexpr double kMaxOscillation = 600.0;

void interaction(const DiscreteTilted& op, std::span<const double> u, std::vector<double>& e, std::vector<double>& s,
                 std::vector<double>& t) {
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  if (*hi - *lo > kMaxOscillation)
    throw NumericalFailure("eigen", "oscillation of u^eps exceeds the exponent range; use a larger eps");
  const double top = *hi;
  for (std::size_t j = 0; j < u.size(); ++j) e[j] = std::exp(u[j] - top);
  op.apply_kernel(e, s);
  for (std::size_t i = 0; i < u.size(); ++i) t[i] = s[i] * std::exp(top - u[i]);
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::unknown: return "unknown";
  }
  return "unknown";
}

RegularizedSolution solve_regularized(const DiscreteTilted& op, double eps, const RegularizedOptions& opts) {
  if (!(eps > 0.0)) throw InvalidInput("solve_regularized: eps must be positive");
  if (op.extension() == Extension::zero)
    throw InvalidInput("solve_regularized: zero extension destroys the constant sub/supersolutions");
  const auto& g = op.grid();
  const std::size_t n = g.n;
  const auto a = op.a();
  const auto m = op.moments();

  RegularizedSolution sol;
  sol.epsilon = eps;
  sol.c_lower = std::numeric_limits<double>::infinity();
  sol.c_upper = -sol.c_lower;
  for (std::size_t i = 0; i < n; ++i) {
    sol.c_lower = std::min(sol.c_lower, m[i] - a[i]);
    sol.c_upper = std::max(sol.c_upper, m[i] - a[i]);
  }
  const double ceiling = sol.c_upper / eps;
  const double ceiling_slack = 1e-9 * std::max(1.0, std::abs(ceiling));

  std::vector<double> u(n, sol.c_lower / eps), e(n), s(n), t(n), w(n);
  std::size_t sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    interaction(op, u, e, s, t);
    const std::size_t failed = opts.serial ? kernels::serial::perron_update(eps, u, a, t, opts.root_tol, w)
                                           : kernels::perron_update(eps, u, a, t, opts.root_tol, w);
    if (failed > 0) throw NumericalFailure("eigen", "scalar Perron root did not converge at " + std::to_string(failed) + " nodes");
    double diff = 0.0, mmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] < -1e-11 * std::max(1.0, std::abs(u[i])))
        throw NumericalFailure("eigen", "Perron iteration is not monotone at x=" + std::to_string(g.x(i)));
      u[i] += w[i];
      if (u[i] > ceiling + ceiling_slack)
        throw NumericalFailure("eigen", "Perron iterate exceeds the supersolution c_upper/eps");
      diff = std::max(diff, std::abs(w[i]));
      mmax = std::max(mmax, eps * u[i] + a[i]);
    }
    if (diff * (eps + mmax) < opts.tol) break;
  }
  if (sweep == opts.max_sweeps) throw NumericalFailure("eigen", "Perron iteration budget exhausted");
  sol.sweeps = sweep + 1;

  interaction(op, u, e, s, t);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const double top = *std::max_element(u.begin(), u.end());
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    sol.residual = std::max(sol.residual, std::abs(eps * u[i] + a[i] - t[i]));
    phi[i] = std::exp(u[i] - top);
    if (opts.window.contains(g.x(i))) {
      lo = std::min(lo, eps * u[i]);
      hi = std::max(hi, eps * u[i]);
    }
  }
  if (!std::isfinite(lo)) throw InvalidInput("solve_regularized: window contains no grid node");
  sol.flatness = hi - lo;
  sol.u_eps = Field(g, std::move(u));
  sol.phi_eps = Field(g, std::move(phi));
  return sol;
}

RegularizedSolution solve_regularized(const TiltedOperator& op, const SpatialGrid& grid, Extension ext, double eps,
                                      const RegularizedOptions& opts) {
  return solve_regularized(DiscreteTilted(op, grid, ext), eps, opts);
}

HarnackSample harnack_check(const DiscreteTilted& op, const RegularizedSolution& sol, double radius,
                            const Window& window) {
  const auto& g = op.grid();
  const auto a = op.a();
  const auto& u = sol.u_eps;
  const auto reach = static_cast<std::ptrdiff_t>(std::floor(radius / g.dx));
  HarnackSample h{sol.epsilon, radius, std::numeric_limits<double>::infinity()};
  const auto n = static_cast<std::ptrdiff_t>(g.n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!window.contains(g.x(static_cast<std::size_t>(i)))) continue;
    const double denom = a[static_cast<std::size_t>(i)] + sol.epsilon * u[static_cast<std::size_t>(i)];
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - reach); j <= std::min(n - 1, i + reach); ++j) {
      const double ratio = std::exp(u[static_cast<std::size_t>(j)] - u[static_cast<std::size_t>(i)]) / denom;
      h.min_ratio = std::min(h.min_ratio, ratio);
    }
  }
  return h;
}

DiscountReport discount_limit(const DiscreteTilted& op, const std::vector<double>& schedule,
                              const RegularizedOptions& opts) {
  if (schedule.size() < 3) throw InvalidInput("discount_limit: schedule needs at least three entries");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0)) throw InvalidInput("discount_limit: eps must be positive");
    if (k > 0 && schedule[k] > 0.5 * schedule[k - 1] * (1.0 + 1e-12))
      throw InvalidInput("discount_limit: schedule ratios must be at most 1/2");
  }
  const auto& g = op.grid();
  const double left = std::max(opts.window.left, g.x_min);
  const double right = std::min(opts.window.right, g.x_max());
  const std::size_t i0 = g.nearest(0.5 * (left + right));

  DiscountReport rep;
  std::vector<RegularizedSolution> sols;
  std::size_t sweeps = 0;
  for (double eps : schedule) {
    auto sol = solve_regularized(op, eps, opts);
    sweeps += sol.sweeps;
    rep.eps.push_back(eps);
    rep.values.push_back(eps * sol.u_eps[i0]);
    rep.flatness.push_back(sol.flatness);
    rep.harnack.push_back(harnack_check(op, sol, op.kernel().truncation_radius(), opts.window));
    sols.push_back(std::move(sol));
  }
  for (std::size_t k = 1; k < rep.flatness.size(); ++k)
    if (!(rep.flatness[k] < rep.flatness[k - 1]) && rep.flatness[k - 1] > 1e-12) rep.flatness_decreasing = false;
  rep.almost_periodic = rep.flatness_decreasing ? Verdict::pass : Verdict::unknown;

  // Neville tableau evaluated at eps = 0; the error estimate compares the full
  // extrapolation with the one that drops the coarsest solve.
  const std::size_t n = rep.eps.size();
  std::vector<double> p = rep.values;
  std::vector<double> drop_first;
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double hi = rep.eps[i], hj = rep.eps[i + level];
      p[i] = (-hj * p[i] + hi * p[i + 1]) / (hi - hj);
    }
    if (level == n - 2) drop_first = {p[1]};
  }
  rep.lambda0 = p[0];
  rep.extrapolation_error = std::abs(p[0] - drop_first.at(0));
  const double d1 = rep.values[0] - rep.values[1], d2 = rep.values[1] - rep.values[2];
  rep.ratio_test = d2 != 0.0 ? d1 / d2 : std::numeric_limits<double>::quiet_NaN();

  // Two witnesses: e^{u^eps} at the finest eps, and e^{chi} with the corrector chi
  // extrapolated from the two finest solves. Each gives a valid bracket; keep the tighter.
  const auto& fine = sols[n - 1];
  const auto& coarse = sols[n - 2];
  auto best = rayleigh_bounds(op, fine.phi_eps, opts.window);
  std::vector<double> chi(g.n);
  const double e1 = coarse.epsilon, e2 = fine.epsilon;
  for (std::size_t i = 0; i < g.n; ++i) chi[i] = (e1 * coarse.u_eps[i] - e2 * fine.u_eps[i]) / (e1 - e2);
  const double chi_top = *std::max_element(chi.begin(), chi.end());
  if (chi_top - *std::min_element(chi.begin(), chi.end()) < kMaxOscillation) {
    for (double& c : chi) c = std::exp(c - chi_top);
    auto alt = rayleigh_bounds(op, Field(g, std::move(chi)), opts.window);
    if (alt.lambda_upper - alt.lambda_lower < best.lambda_upper - best.lambda_lower) best = std::move(alt);
  }
  best.method = EigenMethod::discount_limit;
  best.central = rep.lambda0;
  best.iterations = sweeps;
  rep.estimate = std::move(best);
  rep.finest = sols.back();
  return rep;
}

DiscountReport discount_limit(const TiltedOperator& op, const SpatialGrid& grid, Extension ext,
                              const std::vector<double>& schedule, const RegularizedOptions& opts) {
  return discount_limit(DiscreteTilted(op, grid, ext), schedule, opts);
}

void to_json(nlohmann::json& j, const RegularizedSolution& s) {
  j = {{"epsilon", s.epsilon},   {"flatness", s.flatness}, {"residual", s.residual},
       {"c_lower", s.c_lower},   {"c_upper", s.c_upper},   {"sweeps", s.sweeps},
       {"x_min", s.u_eps.grid().x_min}, {"dx", s.u_eps.grid().dx},
       {"u_eps", std::vector<double>(s.u_eps.values().begin(), s.u_eps.values().end())}};
}

void to_json(nlohmann::json& j, const DiscountReport& r) {
  nlohmann::json harnack = nlohmann::json::array();
  for (const auto& h : r.harnack)
    harnack.push_back({{"epsilon", h.epsilon}, {"radius", h.radius}, {"min_ratio", h.min_ratio}});
  j = {{"estimate", r.estimate},
       {"lambda0", r.lambda0},
       {"extrapolation_error", r.extrapolation_error},
       {"eps", r.eps},
       {"values", r.values},
       {"flatness", r.flatness},
       {"flatness_decreasing", r.flatness_decreasing},
       {"almost_periodic", to_string(r.almost_periodic)},
       {"harnack", harnack}};
  j["ratio_test"] = std::isfinite(r.ratio_test) ? nlohmann::json(r.ratio_test) : nlohmann::json(nullptr);
}

}  // namespace nlspread
