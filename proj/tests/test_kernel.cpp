#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "nlspread/discrete_kernel.hpp"
#include "nlspread/error.hpp"
#include "nlspread/kernel.hpp"
#include "nlspread/stencil_kernels.hpp"

using namespace nlspread;

namespace {

Field random_field(const SpatialGrid& g, std::mt19937_64& gen, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(g.n);
  for (auto& x : v) x = d(gen);
  return Field(g, v);
}

}  // namespace

TEST_CASE("tilted moments match closed forms") {
  const auto gauss = Kernel::convolution(Density::gaussian(1.0));
  CHECK(tilted_moment(gauss, 0.3, 1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-10));
  CHECK(tilted_moment(gauss, 0.0, -2.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-10));
  const auto uni = Kernel::convolution(Density::uniform(1.0));
  for (double p : {-3.0, -0.5, 0.7, 2.0}) CHECK(tilted_moment(uni, 1.0, p) == doctest::Approx(std::sinh(p) / p).epsilon(1e-12));
  const auto comb = Kernel::dirac_comb({{0.5, 1.0}, {0.5, -1.0}});
  CHECK(tilted_moment(comb, 0.0, 1.3) == doctest::Approx(std::cosh(1.3)).epsilon(1e-14));
  const auto shifted = Kernel::convolution(Density::uniform(1.0, 1.0, 0.5));
  // J(xi) = J0(xi - 0.5): int e^{-p xi} = e^{-p/2} sinh(p)/p
  CHECK(tilted_moment(shifted, 0.0, 1.0) == doctest::Approx(std::exp(-0.5) * std::sinh(1.0)).epsilon(1e-12));
}

TEST_CASE("tilted moment at zero tilt is the kernel mass") {
  const auto sep = Kernel::separable(Density::uniform(1.0), CoefficientProfile::periodic(1.0, 1.0, {}, {0.3}));
  for (double x : {-2.0, 0.1, 0.6, 3.3}) CHECK(tilted_moment(sep, x, 0.0) == kernel_mass(sep, x));
}

TEST_CASE("tilted moment is convex in p") {
  const auto sep = Kernel::separable(Density::gaussian(0.7), CoefficientProfile::periodic(1.0, 1.0, {}, {0.3}));
  for (double x : {0.0, 0.37}) {
    const double h = 0.25;
    for (double p = -2.0; p <= 2.0; p += h) {
      const double d2 = tilted_moment(sep, x, p - h) - 2.0 * tilted_moment(sep, x, p) + tilted_moment(sep, x, p + h);
      CHECK(d2 >= -1e-9);
    }
  }
}

TEST_CASE("reflection is an involution and preserves mass") {
  const auto k = Kernel::convolution(Density::uniform(1.0, 1.0, 0.3));
  const auto rr = reflect_kernel(reflect_kernel(k));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> xs(-5, 5), ps(-2, 2);
  for (int i = 0; i < 20; ++i) {
    const double x = xs(gen), p = ps(gen);
    CHECK(tilted_moment(rr, x, p) == doctest::Approx(tilted_moment(k, x, p)).epsilon(1e-13));
  }
  const auto r = reflect_kernel(k);
  CHECK(tilted_moment(r, 0.0, 1.0) == doctest::Approx(tilted_moment(k, 0.0, -1.0)).epsilon(1e-13));
  const auto sep = Kernel::separable(Density::uniform(1.0), CoefficientProfile::periodic(1.0, 1.0, {}, {0.3}));
  const auto sr = reflect_kernel(sep);
  for (double x : {-0.8, 0.2, 1.1}) CHECK(kernel_mass(sr, x) == doctest::Approx(kernel_mass(sep, -x)).epsilon(1e-12));
}

TEST_CASE("kernel invariants and construction errors") {
  CHECK_THROWS_AS(Kernel::dirac_comb({}), InvalidInput);
  CHECK_THROWS_AS(Kernel::dirac_comb({{-0.5, 1.0}}), InvalidInput);
  CHECK_THROWS_AS(Kernel::dirac_comb({{0.5, 2.0}}, false, 1.0), InvalidInput);
  CHECK_THROWS_AS(Kernel::separable(Density::uniform(1.0, 1.0, 0.5), CoefficientProfile::constant(1.0)), InvalidInput);
  CHECK(Kernel::separable(Density::uniform(1.0), CoefficientProfile::periodic(1.0, 1.0, {}, {0.3})).is_symmetric());
  CHECK_FALSE(Kernel::convolution(Density::uniform(1.0, 1.0, 0.5)).is_symmetric());
  CHECK_THROWS_AS(Kernel::convolution(Density::tabulated(-1.0, 0.5, {0.1, -0.2, 0.1})), InvalidInput);
}

TEST_CASE("Gaussian truncation follows the tilt guard") {
  const double c = Density::gaussian_cutoff_for(1.0, 4.0);
  // integrand exp(-xi^2/2 + 4 xi) relative to its peak is 1e-14 at |xi - 4| = sqrt(2 ln 1e14)
  CHECK(c == doctest::Approx(4.0 + std::sqrt(2.0 * std::log(1e14))).epsilon(1e-10));
}

TEST_CASE("kernels round-trip through JSON") {
  for (const auto& k : {Kernel::convolution(Density::gaussian(0.5, 2.0, 0.1)),
                        Kernel::dirac_comb({{0.5, 1.0}, {0.5, -1.0}}, true),
                        Kernel::separable(Density::uniform(1.0), CoefficientProfile::periodic(1.0, 1.0, {}, {0.3}))}) {
    const nlohmann::json j = k;
    const auto back = kernel_from_json(j);
    CHECK(back.truncation_radius() == k.truncation_radius());
    for (double p : {-1.0, 0.5}) CHECK(tilted_moment(back, 0.2, p) == tilted_moment(k, 0.2, p));
  }
}

TEST_CASE("apply_kernel is linear and monotone") {
  const SpatialGrid g = SpatialGrid::symmetric(30.0, 0.05);
  const auto k = Kernel::convolution(Density::gaussian(1.0));
  std::mt19937_64 gen(11);
  const Field a = random_field(g, gen), b = random_field(g, gen);
  std::vector<double> mix(g.n), bigger(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    mix[i] = 2.0 * a[i] - 0.5 * b[i];
    bigger[i] = a[i] + 0.01 * b[i];
  }
  const Field ka = apply_kernel(k, a, Extension::zero), kb = apply_kernel(k, b, Extension::zero);
  const Field km = apply_kernel(k, Field(g, mix), Extension::zero);
  const Field kbig = apply_kernel(k, Field(g, bigger), Extension::zero);
  for (std::size_t i = 0; i < g.n; ++i) {
    CHECK(km[i] == doctest::Approx(2.0 * ka[i] - 0.5 * kb[i]).epsilon(1e-12).scale(1.0));
    CHECK(kbig[i] >= ka[i]);
  }
}

TEST_CASE("discrete kernel reproduces the constant with constant extension") {
  const SpatialGrid g = SpatialGrid::symmetric(20.0, 0.05);
  const auto k = Kernel::convolution(Density::gaussian(1.0));
  const Field one = apply_kernel(k, Field(g, 1.0), Extension::constant);
  const auto rows = DiscreteKernel(k, g).row_sums();
  for (std::size_t i = 0; i < g.n; ++i) CHECK(one[i] == doctest::Approx(rows[i]).epsilon(1e-14));
  CHECK(rows[g.n / 2] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Dirac comb apply equals a brute-force shift loop") {
  const SpatialGrid g(-5.0, 0.25, 41);
  const auto k = Kernel::dirac_comb({{0.3, 0.5}, {0.7, -1.0}});
  std::mt19937_64 gen(5);
  const Field phi = random_field(g, gen);
  const Field out = apply_kernel(k, phi, Extension::zero);
  for (std::size_t i = 0; i < g.n; ++i) {
    // phi(x - q): q = 0.5 is two nodes left, q = -1 four nodes right
    const double l = i >= 2 ? phi[i - 2] : 0.0;
    const double r = i + 4 < g.n ? phi[i + 4] : 0.0;
    CHECK(out[i] == 0.3 * l + 0.7 * r);
  }
  CHECK_THROWS_AS(DiscreteKernel(Kernel::dirac_comb({{1.0, 0.3}}), g), InvalidInput);
}

TEST_CASE("periodic extension wraps reads") {
  const SpatialGrid g(0.0, 0.25, 8);
  const auto k = Kernel::dirac_comb({{1.0, 0.25}});
  std::vector<double> v{0, 1, 2, 3, 4, 5, 6, 7};
  const Field out = apply_kernel(k, Field(g, v), Extension::periodic);
  CHECK(out[0] == 7.0);
  CHECK(out[3] == 2.0);
}

TEST_CASE("grid shorter than the kernel reach is rejected") {
  const SpatialGrid g(0.0, 0.1, 5);
  CHECK_THROWS_AS(apply_kernel(Kernel::convolution(Density::uniform(1.0)), Field(g, 1.0), Extension::zero),
                  InvalidInput);
}

TEST_CASE("OpenMP and serial stencil paths agree") {
  const SpatialGrid g = SpatialGrid::symmetric(30.0, 0.05);
  std::mt19937_64 gen(13);
  const Field phi = random_field(g, gen);
  for (const auto& k : {Kernel::convolution(Density::gaussian(1.0)), Kernel::dirac_comb({{0.5, 1.0}, {0.5, -1.0}}),
                        Kernel::separable(Density::uniform(1.0), CoefficientProfile::periodic(1.0, 1.0, {}, {0.3}))}) {
    const DiscreteKernel dk(k, g);
    for (Extension ext : {Extension::zero, Extension::constant}) {
      std::vector<double> a(g.n), b(g.n);
      dk.apply(phi.values(), a, ext);
      dk.apply_serial(phi.values(), b, ext);
      for (std::size_t i = 0; i < g.n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
    }
  }

  const ReactionKPP r(CoefficientProfile::constant(1.0));
  std::vector<double> u(g.n), ku(g.n), b(g.n, 1.0), s(g.n, 1.0), o1(g.n), o2(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    u[i] = phi[i];
    ku[i] = 0.5 * phi[i];
  }
  kernels::euler_update(u, ku, b, s, r, 0.1, o1);
  kernels::serial::euler_update(u, ku, b, s, r, 0.1, o2);
  CHECK(o1 == o2);

  std::vector<double> a(g.n, 0.3), t(g.n, 1.2), w1(g.n), w2(g.n);
  CHECK(kernels::perron_update(0.1, u, a, t, 1e-13, w1) == 0);
  CHECK(kernels::serial::perron_update(0.1, u, a, t, 1e-13, w2) == 0);
  CHECK(w1 == w2);
}

TEST_CASE("scalar Perron root solves its equation") {
  double w = 0.0;
  REQUIRE(kernels::solve_perron_scalar(0.05, 1.0, 0.2, 2.0, 1e-14, w));
  CHECK(0.05 * (1.0 + w) + 0.2 == doctest::Approx(2.0 * std::exp(-w)).epsilon(1e-12));
}
