#include "nlspread/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "nlspread/error.hpp"

namespace nlspread {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double eval_periodic(const CoefficientProfile::Periodic& p, double x) {
  // Reduce to one cell first so that c(x + L) = c(x) holds to rounding of x itself.
  const double xr = x - p.period * std::floor(x / p.period);
  const double w = 2.0 * std::numbers::pi / p.period;
  double s = p.mean;
  for (std::size_t k = 0; k < p.cos_coeffs.size(); ++k)
    s += p.cos_coeffs[k] * std::cos(w * static_cast<double>(k + 1) * xr);
  for (std::size_t k = 0; k < p.sin_coeffs.size(); ++k)
    s += p.sin_coeffs[k] * std::sin(w * static_cast<double>(k + 1) * xr);
  return s;
}

double eval_tabulated(const CoefficientProfile::Tabulated& t, double x) {
  const double s = (x - t.x_min) / t.dx;
  if (s <= 0.0) return t.values.front();
  const auto last = static_cast<double>(t.values.size() - 1);
  if (s >= last) return t.values.back();
  const auto i = static_cast<std::size_t>(s);
  const double frac = s - static_cast<double>(i);
  return (1.0 - frac) * t.values[i] + frac * t.values[i + 1];
}

}  // namespace

CoefficientProfile CoefficientProfile::constant(double value) {
  if (!std::isfinite(value)) throw InvalidInput("constant profile: value must be finite");
  return CoefficientProfile(Constant{value});
}

CoefficientProfile CoefficientProfile::periodic(double period, double mean, std::vector<double> cos_coeffs,
                                                std::vector<double> sin_coeffs) {
  if (!(period > 0.0)) throw InvalidInput("periodic profile: period must be positive");
  return CoefficientProfile(Periodic{period, mean, std::move(cos_coeffs), std::move(sin_coeffs)});
}

CoefficientProfile CoefficientProfile::tabulated(double x_min, double dx, std::vector<double> values) {
  if (!(dx > 0.0)) throw InvalidInput("tabulated profile: dx must be positive");
  if (values.size() < 2) throw InvalidInput("tabulated profile: need at least two samples");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidInput("tabulated profile: non-finite sample");
  return CoefficientProfile(Tabulated{x_min, dx, std::move(values)});
}

CoefficientProfile CoefficientProfile::affine(double offset, double scale, CoefficientProfile base) {
  return CoefficientProfile(Affine{offset, scale, std::make_shared<const CoefficientProfile>(std::move(base))});
}

CoefficientProfile make_quasiperiodic(std::span<const double> amplitudes, std::span<const double> frequencies,
                                      std::span<const double> phases) {
  if (amplitudes.size() != frequencies.size() || amplitudes.size() != phases.size())
    throw InvalidInput("make_quasiperiodic: amplitude/frequency/phase lists differ in length");
  for (double nu : frequencies)
    if (!(nu > 0.0)) throw InvalidInput("make_quasiperiodic: frequencies must be positive");
  return CoefficientProfile(CoefficientProfile::QuasiPeriodic{
      {amplitudes.begin(), amplitudes.end()},
      {frequencies.begin(), frequencies.end()},
      {phases.begin(), phases.end()}});
}

double CoefficientProfile::operator()(double x) const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.value; },
                        [x](const Periodic& p) { return eval_periodic(p, x); },
                        [x](const QuasiPeriodic& q) {
                          double s = 0.0;
                          for (std::size_t j = 0; j < q.amplitudes.size(); ++j)
                            s += q.amplitudes[j] * std::sin(q.frequencies[j] * x + q.phases[j]);
                          return s;
                        },
                        [x](const Tabulated& t) { return eval_tabulated(t, x); },
                        [x](const Affine& a) { return a.offset + a.scale * (*a.base)(x); },
                    },
                    kind_);
}

double CoefficientProfile::sup_bound() const {
  return std::visit(overloaded{
                        [](const Constant& c) { return std::abs(c.value); },
                        [](const Periodic& p) {
                          double s = std::abs(p.mean);
                          for (double c : p.cos_coeffs) s += std::abs(c);
                          for (double c : p.sin_coeffs) s += std::abs(c);
                          return s;
                        },
                        [](const QuasiPeriodic& q) {
                          double s = 0.0;
                          for (double c : q.amplitudes) s += std::abs(c);
                          return s;
                        },
                        [](const Tabulated& t) {
                          double s = 0.0;
                          for (double v : t.values) s = std::max(s, std::abs(v));
                          return s;
                        },
                        [](const Affine& a) { return std::abs(a.offset) + std::abs(a.scale) * a.base->sup_bound(); },
                    },
                    kind_);
}

std::optional<double> CoefficientProfile::period() const {
  return std::visit(overloaded{
                        [](const Constant&) -> std::optional<double> { return std::nullopt; },
                        [](const Periodic& p) -> std::optional<double> { return p.period; },
                        [](const QuasiPeriodic& q) -> std::optional<double> {
                          if (q.frequencies.size() == 1) return 2.0 * std::numbers::pi / q.frequencies[0];
                          return std::nullopt;
                        },
                        [](const Tabulated&) -> std::optional<double> { return std::nullopt; },
                        [](const Affine& a) { return a.base->period(); },
                    },
                    kind_);
}

bool CoefficientProfile::is_constant() const {
  return std::visit(overloaded{
                        [](const Constant&) { return true; },
                        [](const Periodic& p) {
                          return std::all_of(p.cos_coeffs.begin(), p.cos_coeffs.end(), [](double c) { return c == 0.0; }) &&
                                 std::all_of(p.sin_coeffs.begin(), p.sin_coeffs.end(), [](double c) { return c == 0.0; });
                        },
                        [](const QuasiPeriodic& q) {
                          return std::all_of(q.amplitudes.begin(), q.amplitudes.end(), [](double c) { return c == 0.0; });
                        },
                        [](const Tabulated& t) {
                          return std::all_of(t.values.begin(), t.values.end(),
                                             [&](double v) { return v == t.values.front(); });
                        },
                        [](const Affine& a) { return a.scale == 0.0 || a.base->is_constant(); },
                    },
                    kind_);
}

bool CoefficientProfile::is_almost_periodic() const {
  return std::visit(overloaded{
                        [](const Tabulated& t) {
                          return std::all_of(t.values.begin(), t.values.end(),
                                             [&](double v) { return v == t.values.front(); });
                        },
                        [](const Affine& a) { return a.scale == 0.0 || a.base->is_almost_periodic(); },
                        [](const auto&) { return true; },
                    },
                    kind_);
}

bool CoefficientProfile::is_even() const {
  return std::visit(overloaded{
                        [](const Constant&) { return true; },
                        [](const Periodic& p) {
                          return std::all_of(p.sin_coeffs.begin(), p.sin_coeffs.end(), [](double c) { return c == 0.0; });
                        },
                        [](const QuasiPeriodic& q) {
                          // sin(nu x + theta) is even only for theta = pi/2 mod pi.
                          for (std::size_t j = 0; j < q.amplitudes.size(); ++j) {
                            if (q.amplitudes[j] == 0.0) continue;
                            const double r = std::remainder(q.phases[j] - std::numbers::pi / 2, std::numbers::pi);
                            if (std::abs(r) > 1e-15) return false;
                          }
                          return true;
                        },
                        [](const Tabulated& t) {
                          const std::size_t n = t.values.size();
                          const double center = t.x_min + 0.5 * static_cast<double>(n - 1) * t.dx;
                          if (std::abs(center) > 1e-12 * t.dx) return false;
                          for (std::size_t i = 0; i < n / 2; ++i)
                            if (t.values[i] != t.values[n - 1 - i]) return false;
                          return true;
                        },
                        [](const Affine& a) { return a.scale == 0.0 || a.base->is_even(); },
                    },
                    kind_);
}

CoefficientProfile CoefficientProfile::reflected() const {
  return std::visit(overloaded{
                        [](const Constant& c) { return CoefficientProfile(c); },
                        [](const Periodic& p) {
                          Periodic r = p;
                          for (double& s : r.sin_coeffs) s = -s;
                          return CoefficientProfile(std::move(r));
                        },
                        [](const QuasiPeriodic& q) {
                          // c sin(-nu x + theta) = -c sin(nu x - theta)
                          QuasiPeriodic r = q;
                          for (double& c : r.amplitudes) c = -c;
                          for (double& t : r.phases) t = -t;
                          return CoefficientProfile(std::move(r));
                        },
                        [](const Tabulated& t) {
                          Tabulated r = t;
                          std::reverse(r.values.begin(), r.values.end());
                          r.x_min = -(t.x_min + static_cast<double>(t.values.size() - 1) * t.dx);
                          return CoefficientProfile(std::move(r));
                        },
                        [](const Affine& a) {
                          return CoefficientProfile::affine(a.offset, a.scale, a.base->reflected());
                        },
                    },
                    kind_);
}

Field CoefficientProfile::sample(const SpatialGrid& grid) const {
  return Field(grid, sample(grid.x_min, grid.dx, grid.n));
}

std::vector<double> CoefficientProfile::sample(double x_min, double dx, std::size_t n) const {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (*this)(x_min + static_cast<double>(i) * dx);
  return v;
}

void to_json(nlohmann::json& j, const CoefficientProfile& p) {
  using P = CoefficientProfile;
  std::visit(overloaded{
                 [&](const P::Constant& c) { j = {{"kind", "constant"}, {"value", c.value}}; },
                 [&](const P::Periodic& q) {
                   j = {{"kind", "periodic"}, {"period", q.period}, {"mean", q.mean}, {"cos", q.cos_coeffs},
                        {"sin", q.sin_coeffs}};
                 },
                 [&](const P::QuasiPeriodic& q) {
                   j = {{"kind", "quasiperiodic"}, {"amplitudes", q.amplitudes}, {"frequencies", q.frequencies},
                        {"phases", q.phases}};
                 },
                 [&](const P::Tabulated& t) {
                   j = {{"kind", "tabulated"}, {"x_min", t.x_min}, {"dx", t.dx}, {"values", t.values}};
                 },
                 [&](const P::Affine& a) {
                   j = {{"kind", "affine"}, {"offset", a.offset}, {"scale", a.scale}, {"base", *a.base}};
                 },
             },
             p.kind());
}

void from_json(const nlohmann::json& j, CoefficientProfile& p) {
  if (!j.is_object() || !j.contains("kind")) throw InvalidInput("profile: expected object with 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "constant") {
      p = CoefficientProfile::constant(j.at("value").get<double>());
    } else if (kind == "periodic") {
      p = CoefficientProfile::periodic(j.at("period").get<double>(), j.value("mean", 0.0),
                                       j.value("cos", std::vector<double>{}), j.value("sin", std::vector<double>{}));
    } else if (kind == "quasiperiodic") {
      const auto a = j.at("amplitudes").get<std::vector<double>>();
      const auto f = j.at("frequencies").get<std::vector<double>>();
      const auto t = j.value("phases", std::vector<double>(a.size(), 0.0));
      p = make_quasiperiodic(a, f, t);
    } else if (kind == "tabulated") {
      p = CoefficientProfile::tabulated(j.at("x_min").get<double>(), j.at("dx").get<double>(),
                                        j.at("values").get<std::vector<double>>());
    } else if (kind == "affine") {
      p = CoefficientProfile::affine(j.value("offset", 0.0), j.value("scale", 1.0),
                                     j.at("base").get<CoefficientProfile>());
    } else {
      throw InvalidInput("profile: unknown kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("profile: ") + e.what());
  }
}

}  // namespace nlspread
