#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "nlspread/error.hpp"
#include "nlspread/grid.hpp"
#include "nlspread/profile.hpp"
#include "nlspread/reaction.hpp"

using namespace nlspread;

TEST_CASE("symmetric grid places a node at the origin") {
  const auto g = SpatialGrid::symmetric(10.0, 0.1);
  CHECK(g.n == 201);
  CHECK(g.x(g.nearest(0.0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g.x_min == doctest::Approx(-10.0));
  CHECK(g.x_max() == doctest::Approx(10.0));
  CHECK(g.nearest(-1e9) == 0);
  CHECK(g.nearest(1e9) == g.n - 1);
}

TEST_CASE("grid and field reject bad input") {
  CHECK_THROWS_AS(SpatialGrid(0.0, 0.0, 10), InvalidInput);
  CHECK_THROWS_AS(SpatialGrid(0.0, 0.1, 1), InvalidInput);
  const SpatialGrid g(0.0, 1.0, 3);
  CHECK_THROWS_AS(Field(g, std::vector<double>{1.0, 2.0}), InvalidInput);
  CHECK_THROWS_AS(Field(g, std::vector<double>{1.0, NAN, 2.0}), InvalidInput);
  CHECK_THROWS_AS(extension_from_string("mirror"), InvalidInput);
  CHECK(extension_from_string("periodic") == Extension::periodic);
}

TEST_CASE("periodic profile evaluates its Fourier series and reports its period") {
  const auto c = CoefficientProfile::periodic(1.0, 1.0, {}, {0.5});
  for (double x : {-1.3, 0.0, 0.25, 0.7, 12.1})
    CHECK(c(x) == doctest::Approx(1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * x)).epsilon(1e-13));
  REQUIRE(c.period().has_value());
  CHECK(*c.period() == doctest::Approx(1.0));
  CHECK(c.sup_bound() == doctest::Approx(1.5));
  CHECK(c.is_almost_periodic());
  CHECK_FALSE(c.is_even());
  CHECK_THROWS_AS(CoefficientProfile::periodic(0.0, 1.0, {}, {}), InvalidInput);
}

TEST_CASE("quasi-periodic profile is almost periodic but has no period") {
  const double amp[] = {1.0, 1.0}, freq[] = {1.0, std::sqrt(2.0)}, ph[] = {0.0, 0.0};
  const auto q = make_quasiperiodic(amp, freq, ph);
  CHECK(q(1.0) == doctest::Approx(std::sin(1.0) + std::sin(std::sqrt(2.0))));
  CHECK_FALSE(q.period().has_value());
  CHECK(q.is_almost_periodic());
  CHECK(q.sup_bound() == doctest::Approx(2.0));
  const auto r = q.reflected();
  for (double x : {-2.0, 0.3, 5.0}) CHECK(r(x) == doctest::Approx(q(-x)));
  const double bad[] = {0.0};
  const double one[] = {1.0};
  CHECK_THROWS_AS(make_quasiperiodic(one, bad, one), InvalidInput);
}

TEST_CASE("affine and tabulated profiles") {
  const auto t = CoefficientProfile::tabulated(0.0, 1.0, {0.0, 2.0, 4.0});
  CHECK(t(0.5) == doctest::Approx(1.0));
  CHECK(t(-5.0) == doctest::Approx(0.0));
  CHECK(t(9.0) == doctest::Approx(4.0));
  const auto a = CoefficientProfile::affine(1.0, -2.0, t);
  CHECK(a(1.5) == doctest::Approx(1.0 - 2.0 * 3.0));
  CHECK_FALSE(a.is_almost_periodic());
}

TEST_CASE("profiles round-trip through JSON") {
  const double amp[] = {1.0, 0.3}, freq[] = {1.0, std::sqrt(2.0)}, ph[] = {0.1, 0.0};
  for (const auto& c : {CoefficientProfile::constant(2.0), CoefficientProfile::periodic(2.0, 1.0, {0.1}, {0.5, 0.2}),
                        make_quasiperiodic(amp, freq, ph),
                        CoefficientProfile::affine(2.5, -1.0, make_quasiperiodic(amp, freq, ph))}) {
    const nlohmann::json j = c;
    const auto back = j.get<CoefficientProfile>();
    for (double x : {-3.1, 0.0, 0.77, 4.2}) CHECK(back(x) == c(x));
  }
}

TEST_CASE("reaction accepts KPP data and rejects the rest") {
  const ReactionKPP r(CoefficientProfile::periodic(1.0, 1.0, {}, {0.5}));
  CHECK(evaluate_reaction(r, 0.3, 0.0) == 0.0);
  CHECK(evaluate_reaction(r, 0.3, 1.0) == 0.0);
  CHECK(evaluate_slope(r, 0.25) == doctest::Approx(1.5));
  CHECK_THROWS_AS(evaluate_reaction(r, 0.0, 1.5), InvalidInput);
  CHECK_THROWS_AS(ReactionKPP(CoefficientProfile::constant(0.0)), InvalidInput);
  CHECK_THROWS_AS(ReactionKPP(CoefficientProfile::periodic(1.0, 0.2, {}, {0.5})), InvalidInput);

  const ReactionKPP q(CoefficientProfile::constant(1.0), ReactionShape::quadratic);
  CHECK(q.lipschitz_factor() == doctest::Approx(2.0));
  CHECK(evaluate_reaction(q, 0.0, 0.5) == doctest::Approx(0.5 * 0.75));
}

TEST_CASE("KPP inequality holds on a random lattice") {
  const ReactionKPP r(CoefficientProfile::periodic(1.0, 1.0, {}, {0.5}));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> xs(-20.0, 20.0), ss(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = xs(gen), s = ss(gen);
    const double f = evaluate_reaction(r, x, s);
    CHECK(f >= 0.0);
    CHECK(f <= evaluate_slope(r, x) * s + 1e-15);
  }
}

TEST_CASE("reaction JSON round trip keeps shape and slope") {
  const ReactionKPP r(CoefficientProfile::constant(1.5), ReactionShape::quadratic);
  const nlohmann::json j = r;
  const auto back = reaction_from_json(j);
  CHECK(back.shape() == ReactionShape::quadratic);
  CHECK(back.slope(3.0) == 1.5);
  CHECK_THROWS_AS(reaction_from_json(nlohmann::json::array()), InvalidInput);
}
