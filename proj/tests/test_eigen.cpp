#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "nlspread/audit.hpp"
#include "nlspread/error.hpp"
#include "nlspread/hamiltonian.hpp"
#include "nlspread/optimize.hpp"

using namespace nlspread;

namespace {

// min_{p>0} sinh(p)/p^2 by brute-force grid search and a local refinement, independent
// of the library's optimizer. Frozen result below.
std::pair<double, double> uniform_speed_oracle() {
  auto f = [](double p) { return std::sinh(p) / (p * p); };
  double best_p = 0.0, best = INFINITY;
  for (int i = 1; i <= 1000000; ++i) {
    const double p = 1e-5 * i;
    if (f(p) < best) best = f(p), best_p = p;
  }
  for (int i = -1000; i <= 1000; ++i) {
    const double p = best_p + 1e-8 * i;
    if (f(p) < best) best = f(p), best_p = p;
  }
  return {best_p, best};
}

constexpr double kUniformSpeed = 0.9052617394;
constexpr double kUniformArgmin = 1.915008048;
// p tanh p = 1 gives the minimizer of cosh(p)/p
constexpr double kCombArgmin = 1.19967864;
constexpr double kCombSpeed = 1.50887956;

const Kernel kUniform = Kernel::convolution(Density::uniform(1.0));
const ReactionKPP kLogistic{CoefficientProfile::constant(1.0)};

}  // namespace

TEST_CASE("frozen uniform-kernel speed agrees with the grid-search oracle") {
  const auto [p, v] = uniform_speed_oracle();
  CHECK(v == doctest::Approx(kUniformSpeed).epsilon(1e-9));
  CHECK(p == doctest::Approx(kUniformArgmin).epsilon(1e-6));
  // first-order condition p cosh p = 2 sinh p
  CHECK(kUniformArgmin * std::cosh(kUniformArgmin) == doctest::Approx(2.0 * std::sinh(kUniformArgmin)).epsilon(1e-8));
  CHECK(kCombArgmin * std::tanh(kCombArgmin) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::cosh(kCombArgmin) / kCombArgmin == doctest::Approx(kCombSpeed).epsilon(1e-8));
}

TEST_CASE("golden section finds a smooth minimum and prefers the left end of a plateau") {
  const auto m = golden_section([](double x) { return (x - 1.3) * (x - 1.3); }, 0.0, 5.0, 1e-10);
  CHECK(m.x == doctest::Approx(1.3).epsilon(1e-8));
  const auto flat = golden_section([](double x) { return x < 2.0 ? 2.0 - x : 0.0; }, 0.0, 5.0, 1e-10);
  CHECK(flat.x == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("speeds from exact Hamiltonians") {
  std::vector<double> p;
  for (int i = -12; i <= 12; ++i) p.push_back(0.25 * i);
  SUBCASE("Gaussian") {
    const auto c = HamiltonianCurve::from_function(p, [](double q) { return std::exp(0.5 * q * q); });
    const auto s = speed_from_hamiltonian(c, Direction::right);
    CHECK(s.contains(std::sqrt(std::numbers::e)));
    CHECK(s.argmin_central == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(s.bracket_high() - s.bracket_low() < 1e-4);
  }
  SUBCASE("uniform") {
    const auto c = HamiltonianCurve::from_function(p, [](double q) { return q == 0.0 ? 1.0 : std::sinh(q) / q; });
    const auto s = speed_from_hamiltonian(c, Direction::left);
    CHECK(s.omega_central == doctest::Approx(kUniformSpeed).epsilon(1e-9));
  }
  SUBCASE("Dirac comb") {
    const auto c = HamiltonianCurve::from_function(p, [](double q) { return std::cosh(q); });
    CHECK(speed_from_hamiltonian(c, Direction::right).omega_central == doctest::Approx(kCombSpeed).epsilon(1e-8));
  }
  SUBCASE("drift separates the two directions") {
    // J shifted by +0.5: H(p) = e^{-p/2} sinh(p)/p, so the right speed exceeds the left
    const auto c = HamiltonianCurve::from_function(p, [](double q) {
      return std::exp(-0.5 * q) * (q == 0.0 ? 1.0 : std::sinh(q) / q);
    });
    CHECK(speed_from_hamiltonian(c, Direction::right).omega_central >
          speed_from_hamiltonian(c, Direction::left).omega_central + 0.5);
  }
}

TEST_CASE("Legendre transform of a parabola") {
  std::vector<double> p;
  for (int i = -40; i <= 40; ++i) p.push_back(0.1 * i);
  const auto c = HamiltonianCurve::from_function(p, [](double q) { return 0.5 * q * q; });
  const double q[] = {-1.0, 0.0, 0.55, 2.0};
  for (const auto& [x, v] : legendre_transform(c, q)) CHECK(v == doctest::Approx(0.5 * x * x).epsilon(1e-9));
  const double far[] = {10.0};
  CHECK_THROWS(legendre_transform(c, far));
}

TEST_CASE("closed form and Rayleigh bounds agree for homogeneous media") {
  const auto prob = make_eigen_problem(Kernel::convolution(Density::gaussian(1.0)), kLogistic,
                                       SpatialGrid::symmetric(40.0, 0.05));
  CHECK(best_method(prob) == EigenMethod::closed_form);
  const auto cf = estimate_eigen(prob, 1.0, EigenMethod::closed_form);
  CHECK(cf.central == doctest::Approx(std::exp(0.5)).epsilon(1e-10));
  auto p2 = prob;
  p2.regularized.window = Window{-10.0, 10.0};
  const auto ry = estimate_eigen(p2, 1.0, EigenMethod::rayleigh);
  CHECK(ry.lambda_lower <= ry.lambda_upper);
  CHECK(ry.lambda_lower == doctest::Approx(std::exp(0.5)).epsilon(1e-6));
  CHECK(ry.lambda_upper == doctest::Approx(std::exp(0.5)).epsilon(1e-6));
}

TEST_CASE("periodic power iteration brackets its own central value") {
  const ReactionKPP r(CoefficientProfile::periodic(1.0, 1.0, {}, {0.5}));
  const auto prob = make_eigen_problem(kUniform, r, SpatialGrid::symmetric(20.0, 0.05));
  CHECK(best_method(prob) == EigenMethod::periodic_power);
  for (double p : {-1.0, 0.0, 1.5}) {
    const auto e = estimate_eigen(prob, p, EigenMethod::periodic_power);
    CHECK(e.lambda_lower <= e.central);
    CHECK(e.central <= e.lambda_upper);
    CHECK(e.lambda_upper - e.lambda_lower < 1e-8);
    CHECK(e.witness.min() > 0.0);
  }
  // constant media: the cell eigenvalue is the discrete tilted moment
  const auto h = make_eigen_problem(kUniform, kLogistic, SpatialGrid::symmetric(20.0, 0.05));
  const auto e = periodic_principal_eigen(TiltedOperator{kUniform, h.a, 1.0}, 64);
  CHECK(e.central == doctest::Approx(std::sinh(1.0)).epsilon(1e-3));
}

TEST_CASE("regularized equation is exact for homogeneous media") {
  const TiltedOperator op{Kernel::convolution(Density::gaussian(1.0)), CoefficientProfile::constant(0.0), 1.0};
  const SpatialGrid g = SpatialGrid::symmetric(30.0, 0.05);
  const DiscreteTilted dt(op, g, Extension::constant);
  const auto sol = solve_regularized(dt, 0.1);
  const double m = dt.moments()[g.n / 2];
  for (std::size_t i = 0; i < g.n; i += 50) CHECK(0.1 * sol.u_eps[i] == doctest::Approx(m).epsilon(1e-8));
  CHECK(sol.flatness < 1e-8);
  CHECK(sol.residual < 1e-8);
  const auto h = harnack_check(dt, sol, 1.0);
  CHECK(h.min_ratio > 0.0);
  CHECK_THROWS_AS(solve_regularized(dt, 0.0), InvalidInput);
  CHECK_THROWS_AS(solve_regularized(op, g, Extension::zero, 0.1), InvalidInput);
}

TEST_CASE("serial and parallel Perron iterations give identical solutions") {
  const ReactionKPP r(CoefficientProfile::periodic(1.0, 1.0, {}, {0.5}));
  const auto prob = make_eigen_problem(kUniform, r, SpatialGrid::symmetric(10.0, 0.05));
  const DiscreteTilted op(TiltedOperator{kUniform, prob.a, 0.5}, prob.grid, Extension::constant);
  RegularizedOptions a, b;
  b.serial = true;
  const auto s1 = solve_regularized(op, 0.1, a);
  const auto s2 = solve_regularized(op, 0.1, b);
  CHECK(s1.sweeps == s2.sweeps);
  for (std::size_t i = 0; i < op.grid().n; ++i) CHECK(s1.u_eps[i] == s2.u_eps[i]);
}

TEST_CASE("discount limit pinches the periodic eigenvalue") {
  const ReactionKPP r(CoefficientProfile::periodic(1.0, 1.0, {}, {0.5}));
  // eight whole periods with wrap-around, so no truncation boundary is present
  auto prob = make_eigen_problem(kUniform, r, SpatialGrid(-4.0, 0.05, 160));
  prob.extension = Extension::periodic;
  const auto per = periodic_principal_eigen(TiltedOperator{kUniform, prob.a, 1.0}, 256);
  const auto dl = discount_limit(TiltedOperator{kUniform, prob.a, 1.0}, prob.grid, prob.extension,
                                 prob.eps_schedule, prob.regularized);
  CHECK(dl.lambda0 == doctest::Approx(per.central).epsilon(1e-3));
  CHECK(dl.estimate.lambda_lower <= dl.estimate.lambda_upper);
  CHECK(dl.flatness_decreasing);
  CHECK(dl.almost_periodic == Verdict::pass);
  CHECK_THROWS_AS(discount_limit(TiltedOperator{kUniform, prob.a, 1.0}, prob.grid, prob.extension, {0.2, 0.15, 0.1},
                                 prob.regularized),
                  InvalidInput);
  const nlohmann::json j = dl;
  CHECK(j.contains("lambda0"));
}

TEST_CASE("eigenvalue is Lipschitz in the media") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> amp(-0.3, 0.3);
  const auto base = CoefficientProfile::periodic(1.0, 0.0, {}, {0.5});
  const double l0 = periodic_principal_eigen(TiltedOperator{kUniform, base, 0.7}, 128).central;
  for (int k = 0; k < 3; ++k) {
    const double c = amp(gen), s = amp(gen);
    const auto pert = CoefficientProfile::periodic(1.0, 0.0, {c}, {0.5 + s});
    const double l1 = periodic_principal_eigen(TiltedOperator{kUniform, pert, 0.7}, 128).central;
    CHECK(std::abs(l1 - l0) <= std::abs(c) + std::abs(s) + 1e-9);
  }
}

TEST_CASE("Hamiltonian curve from a problem and its failure reporting") {
  const auto prob = make_eigen_problem(kUniform, kLogistic, SpatialGrid::symmetric(20.0, 0.05));
  const double p[] = {-2.0, -1.0, 0.0, 1.0, 2.0, 1000.0};
  const auto c = hamiltonian_curve(prob, p);
  CHECK_FALSE(c.complete());
  CHECK(c.failures.back().find("overflow") != std::string::npos);
  CHECK(c.H_central[1] == doctest::Approx(std::sinh(1.0)).epsilon(1e-12));
  CHECK(c.min_second_difference() >= -1e-8);
}

TEST_CASE("left and right brackets coincide for even kernels in symmetric media") {
  const ReactionKPP r(CoefficientProfile::periodic(1.0, 1.0, {0.3}, {}));
  const auto prob = make_eigen_problem(kUniform, r, SpatialGrid::symmetric(20.0, 0.05));
  const double p[] = {-1.0, 0.5, 1.5};
  const auto rep = left_right_compare(prob, p);
  CHECK(rep.brackets_overlap);
  CHECK(rep.speeds_overlap);
  const auto drift = make_eigen_problem(Kernel::convolution(Density::uniform(1.0, 1.0, 0.5)), kLogistic,
                                        SpatialGrid::symmetric(20.0, 0.05));
  CHECK_THROWS_AS(left_right_compare(drift, p), InvalidInput);
}

TEST_CASE("assumption audit examples") {
  AuditParams one;
  one.tilts = {-1.0, 1.0};
  const auto u = audit_assumptions(kUniform, kLogistic, one);
  CHECK(u.at("K4").surrogate == doctest::Approx(std::sinh(1.0)).epsilon(1e-10));
  for (const char* id : {"K1", "K2", "K3", "K3'", "K4", "K5"}) CHECK(u.at(id).verdict == Verdict::pass);

  const auto comb = audit_assumptions(Kernel::dirac_comb({{0.5, 1.0}, {0.5, -1.0}}), kLogistic);
  CHECK(comb.at("H2").surrogate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(comb.at("H2").verdict == Verdict::pass);
  CHECK(comb.at("H3").verdict == Verdict::pass);
  CHECK(comb.at("H4").verdict == Verdict::unknown);
  CHECK(comb.at("K3'").verdict == Verdict::fail);

  AuditParams zero;
  zero.tilts = {0.0};
  const auto g = audit_assumptions(Kernel::convolution(Density::gaussian(1.0)), kLogistic, zero);
  CHECK(g.at("K2").surrogate == doctest::Approx(std::erfc(6.0 / std::sqrt(2.0))).epsilon(1e-3));
  CHECK(g.at("K2").verdict == Verdict::pass);

  AuditParams small;
  small.window_radius = 5.0;
  CHECK_THROWS_AS(audit_assumptions(kUniform, kLogistic, small), InvalidInput);
}
