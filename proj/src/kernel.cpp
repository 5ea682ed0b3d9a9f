#include "nlspread/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <nlohmann/json.hpp>

#include "nlspread/error.hpp"

namespace nlspread {

namespace {

constexpr double kTruncationLevel = 1e-14;

double table_eval(const Density& d, double s) {
  const double u = (s - d.table_x_min) / d.table_dx;
  const auto last = static_cast<double>(d.table.size() - 1);
  if (u < 0.0 || u > last) return 0.0;
  const auto i = std::min(static_cast<std::size_t>(u), d.table.size() - 2);
  const double frac = u - static_cast<double>(i);
  return (1.0 - frac) * d.table[i] + frac * d.table[i + 1];
}

// Composite 20-point Gauss-Legendre of f over [lo, hi], split at breakpoints and into
// panels of width at most h.
template <class F>
double composite_gauss(F&& f, double lo, double hi, std::vector<double> breaks, double h) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = std::max(lo, breaks[s]);
    const double b = std::min(hi, breaks[s + 1]);
    if (!(b > a)) continue;
    const auto panels = static_cast<int>(std::ceil((b - a) / h - 1e-12));
    const double w = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
      const double pa = a + k * w;
      total += Rule::integrate(f, pa, pa + w);
    }
  }
  return total;
}

bool same_multiset(std::vector<DiracAtom> a, std::vector<DiracAtom> b) {
  auto key = [](const DiracAtom& l, const DiracAtom& r) {
    return l.shift < r.shift || (l.shift == r.shift && l.weight < r.weight);
  };
  std::sort(a.begin(), a.end(), key);
  std::sort(b.begin(), b.end(), key);
  return a == b;
}

}  // namespace

// ---- Density ---------------------------------------------------------------

Density Density::uniform(double half_width, double mass, double shift) {
  if (!(half_width > 0.0)) throw InvalidInput("uniform density: half width must be positive");
  if (!(mass >= 0.0)) throw InvalidInput("uniform density: negative mass");
  Density d;
  d.shape = Shape::uniform;
  d.half_width = half_width;
  d.mass = mass;
  d.shift = shift;
  return d;
}

Density Density::triangle(double half_width, double mass, double shift) {
  Density d = uniform(half_width, mass, shift);
  d.shape = Shape::triangle;
  return d;
}

double Density::gaussian_cutoff_for(double sigma, double p_max) {
  return std::abs(p_max) * sigma * sigma + sigma * std::sqrt(-2.0 * std::log(kTruncationLevel));
}

Density Density::gaussian(double sigma, double mass, double shift, double cutoff, double p_max) {
  if (!(sigma > 0.0)) throw InvalidInput("gaussian density: sigma must be positive");
  if (!(mass >= 0.0)) throw InvalidInput("gaussian density: negative mass");
  Density d;
  d.shape = Shape::gaussian;
  d.sigma = sigma;
  d.mass = mass;
  d.shift = shift;
  d.cutoff = cutoff > 0.0 ? cutoff : gaussian_cutoff_for(sigma, p_max);
  return d;
}

Density Density::tabulated(double x_min, double dx, std::vector<double> values, double shift) {
  if (!(dx > 0.0) || values.size() < 2) throw InvalidInput("tabulated density: need dx > 0 and two samples");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("tabulated density: negative density detected");
  Density d;
  d.shape = Shape::tabulated;
  d.table_x_min = x_min;
  d.table_dx = dx;
  d.table = std::move(values);
  d.shift = shift;
  d.mass = 1.0;
  return d;
}

double Density::operator()(double xi) const {
  const double s = xi - shift;
  switch (shape) {
    case Shape::uniform:
      return std::abs(s) <= half_width * (1.0 + 1e-12) ? mass / (2.0 * half_width) : 0.0;
    case Shape::triangle: {
      const double t = half_width - std::abs(s);
      return t > 0.0 ? mass * t / (half_width * half_width) : 0.0;
    }
    case Shape::gaussian: {
      if (std::abs(s) > cutoff) return 0.0;
      const double z = s / sigma;
      return mass * std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    }
    case Shape::tabulated:
      return mass * table_eval(*this, s);
  }
  return 0.0;
}

double Density::support_radius() const {
  switch (shape) {
    case Shape::uniform:
    case Shape::triangle: return std::abs(shift) + half_width;
    case Shape::gaussian: return std::abs(shift) + cutoff;
    case Shape::tabulated: {
      const double lo = table_x_min + shift;
      const double hi = table_x_min + static_cast<double>(table.size() - 1) * table_dx + shift;
      return std::max(std::abs(lo), std::abs(hi));
    }
  }
  return 0.0;
}

bool Density::is_even() const {
  if (shape != Shape::tabulated) return shift == 0.0;
  const double lo = table_x_min + shift;
  const double hi = table_x_min + static_cast<double>(table.size() - 1) * table_dx + shift;
  if (std::abs(lo + hi) > 1e-12 * table_dx) return false;
  for (std::size_t i = 0; i < table.size() / 2; ++i)
    if (table[i] != table[table.size() - 1 - i]) return false;
  return true;
}

Density Density::reflected() const {
  Density r = *this;
  r.shift = -shift;
  if (shape == Shape::tabulated) {
    std::reverse(r.table.begin(), r.table.end());
    r.table_x_min = -(table_x_min + static_cast<double>(table.size() - 1) * table_dx);
  }
  return r;
}

std::vector<double> Density::breakpoints() const {
  switch (shape) {
    case Shape::uniform: return {shift - half_width, shift + half_width};
    case Shape::triangle: return {shift - half_width, shift, shift + half_width};
    case Shape::gaussian: return {shift - cutoff, shift, shift + cutoff};
    case Shape::tabulated: {
      std::vector<double> b(table.size());
      for (std::size_t i = 0; i < table.size(); ++i)
        b[i] = table_x_min + static_cast<double>(i) * table_dx + shift;
      return b;
    }
  }
  return {};
}

double Density::panel_width() const {
  switch (shape) {
    case Shape::uniform:
    case Shape::triangle: return half_width / 4.0;
    case Shape::gaussian: return sigma / 2.0;
    case Shape::tabulated: return table_dx;
  }
  return 1.0;
}

// ---- Kernel ----------------------------------------------------------------

Kernel Kernel::convolution(Density density, std::optional<double> truncation_radius) {
  const double r = truncation_radius.value_or(density.support_radius());
  if (!(r > 0.0)) throw InvalidInput("kernel: truncation radius must be positive");
  return Kernel(Convolution{std::move(density)}, r);
}

Kernel Kernel::separable(Density density, CoefficientProfile modulation, std::optional<double> truncation_radius) {
  if (!density.is_even()) throw InvalidInput("separable kernel: density must be even so that K(x,y)=K(y,x)");
  // inf w > 0 is checked on a sample window; the bound is reported by the audit.
  for (int i = -200; i <= 200; ++i) {
    if (!(modulation(0.05 * i) > 0.0)) throw InvalidInput("separable kernel: modulation must be positive");
  }
  const double r = truncation_radius.value_or(density.support_radius());
  if (!(r > 0.0)) throw InvalidInput("kernel: truncation radius must be positive");
  return Kernel(Separable{std::move(density), std::move(modulation)}, r);
}

Kernel Kernel::dirac_comb(std::vector<DiracAtom> atoms, bool irrational_shift_declared,
                          std::optional<double> truncation_radius) {
  if (atoms.empty()) throw InvalidInput("dirac comb: need at least one atom");
  double qmax = 0.0;
  for (const auto& a : atoms) {
    if (!(a.weight > 0.0)) throw InvalidInput("dirac comb: atom weights must be positive");
    if (!std::isfinite(a.shift)) throw InvalidInput("dirac comb: shift must be finite");
    qmax = std::max(qmax, std::abs(a.shift));
  }
  const double r = truncation_radius.value_or(qmax > 0.0 ? qmax : 1.0);
  if (!(r > 0.0) || r < qmax) throw InvalidInput("dirac comb: truncation radius must cover every |q_n|");
  return Kernel(DiracComb{std::move(atoms), irrational_shift_declared}, r);
}

bool Kernel::is_symmetric() const {
  if (const auto* c = std::get_if<Convolution>(&variant_)) return c->density.is_even();
  if (std::holds_alternative<Separable>(variant_)) return true;
  const auto& comb = std::get<DiracComb>(variant_);
  auto mirrored = comb.atoms;
  for (auto& a : mirrored) a.shift = -a.shift;
  return same_multiset(comb.atoms, mirrored);
}

double Kernel::value(double x, double xi) const {
  if (std::abs(xi) > truncation_radius_) return 0.0;
  if (const auto* c = std::get_if<Convolution>(&variant_)) return c->density(xi);
  if (const auto* s = std::get_if<Separable>(&variant_))
    return s->density(xi) * s->modulation(x) * s->modulation(x - xi);
  throw InvalidInput("kernel: pointwise values are not defined for a Dirac comb");
}

double tilted_moment_range(const Kernel& k, double x, double p, double xi_lo, double xi_hi) {
  const double r = k.truncation_radius();
  if (std::abs(p) * r > kOverflowGuard) throw NumericalFailure("kernel", "tilted moment overflow guard tripped");
  if (const auto* comb = std::get_if<Kernel::DiracComb>(&k.variant())) {
    double s = 0.0;
    for (const auto& a : comb->atoms)
      if (a.shift >= xi_lo && a.shift <= xi_hi) s += a.weight * std::exp(-p * a.shift);
    return s;
  }
  const Density* d = nullptr;
  const CoefficientProfile* w = nullptr;
  if (const auto* c = std::get_if<Kernel::Convolution>(&k.variant())) d = &c->density;
  if (const auto* s = std::get_if<Kernel::Separable>(&k.variant())) {
    d = &s->density;
    w = &s->modulation;
  }
  const double lo = std::max(xi_lo, -std::min(r, d->support_radius()));
  const double hi = std::min(xi_hi, std::min(r, d->support_radius()));
  if (!(lo < hi)) return 0.0;
  if (w == nullptr) {
    auto f = [&](double xi) { return (*d)(xi) * std::exp(-p * xi); };
    return composite_gauss(f, lo, hi, d->breakpoints(), d->panel_width());
  }
  auto f = [&](double xi) { return (*d)(xi) * (*w)(x - xi) * std::exp(-p * xi); };
  return (*w)(x) * composite_gauss(f, lo, hi, d->breakpoints(), std::min(d->panel_width(), 0.5));
}

double tilted_moment(const Kernel& k, double x, double p) {
  const double inf = std::numeric_limits<double>::infinity();
  return tilted_moment_range(k, x, p, -inf, inf);
}

double kernel_mass(const Kernel& k, double x) { return tilted_moment(k, x, 0.0); }

Kernel reflect_kernel(const Kernel& k) {
  const double r = k.truncation_radius();
  if (const auto* c = std::get_if<Kernel::Convolution>(&k.variant()))
    return Kernel::convolution(c->density.reflected(), r);
  if (const auto* s = std::get_if<Kernel::Separable>(&k.variant()))
    return Kernel::separable(s->density.reflected(), s->modulation.reflected(), r);
  const auto& comb = std::get<Kernel::DiracComb>(k.variant());
  auto atoms = comb.atoms;
  for (auto& a : atoms) a.shift = -a.shift;
  return Kernel::dirac_comb(std::move(atoms), comb.irrational_shift_declared, r);
}

// ---- JSON ------------------------------------------------------------------

void to_json(nlohmann::json& j, const Density& d) {
  switch (d.shape) {
    case Density::Shape::uniform:
      j = {{"shape", "uniform"}, {"half_width", d.half_width}, {"mass", d.mass}, {"shift", d.shift}};
      break;
    case Density::Shape::triangle:
      j = {{"shape", "triangle"}, {"half_width", d.half_width}, {"mass", d.mass}, {"shift", d.shift}};
      break;
    case Density::Shape::gaussian:
      j = {{"shape", "gaussian"}, {"sigma", d.sigma}, {"mass", d.mass}, {"shift", d.shift}, {"cutoff", d.cutoff}};
      break;
    case Density::Shape::tabulated:
      j = {{"shape", "tabulated"}, {"x_min", d.table_x_min}, {"dx", d.table_dx}, {"values", d.table},
           {"shift", d.shift}};
      break;
  }
}

void from_json(const nlohmann::json& j, Density& d) {
  if (!j.is_object()) throw InvalidInput("density: expected object");
  try {
    const auto shape = j.at("shape").get<std::string>();
    const double mass = j.value("mass", 1.0);
    const double shift = j.value("shift", 0.0);
    if (shape == "uniform") {
      d = Density::uniform(j.at("half_width").get<double>(), mass, shift);
    } else if (shape == "triangle") {
      d = Density::triangle(j.at("half_width").get<double>(), mass, shift);
    } else if (shape == "gaussian") {
      d = Density::gaussian(j.value("sigma", 1.0), mass, shift, j.value("cutoff", 0.0), j.value("p_max", 4.0));
    } else if (shape == "tabulated") {
      d = Density::tabulated(j.at("x_min").get<double>(), j.at("dx").get<double>(),
                             j.at("values").get<std::vector<double>>(), shift);
    } else {
      throw InvalidInput("density: unknown shape '" + shape + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("density: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const Kernel& k) {
  if (const auto* c = std::get_if<Kernel::Convolution>(&k.variant())) {
    j = {{"variant", "convolution"}, {"density", c->density}};
  } else if (const auto* s = std::get_if<Kernel::Separable>(&k.variant())) {
    j = {{"variant", "separable"}, {"density", s->density}, {"modulation", s->modulation}};
  } else {
    const auto& comb = std::get<Kernel::DiracComb>(k.variant());
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : comb.atoms) atoms.push_back({{"weight", a.weight}, {"shift", a.shift}});
    j = {{"variant", "dirac_comb"}, {"atoms", atoms}, {"irrational_shift_declared", comb.irrational_shift_declared}};
  }
  j["truncation_radius"] = k.truncation_radius();
}

Kernel kernel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("variant")) throw InvalidInput("kernel: expected object with 'variant'");
  try {
    const auto variant = j.at("variant").get<std::string>();
    std::optional<double> r;
    if (j.contains("truncation_radius")) r = j.at("truncation_radius").get<double>();
    if (variant == "convolution") return Kernel::convolution(j.at("density").get<Density>(), r);
    if (variant == "separable")
      return Kernel::separable(j.at("density").get<Density>(), j.at("modulation").get<CoefficientProfile>(), r);
    if (variant == "dirac_comb") {
      std::vector<DiracAtom> atoms;
      for (const auto& a : j.at("atoms")) atoms.push_back({a.at("weight").get<double>(), a.at("shift").get<double>()});
      return Kernel::dirac_comb(std::move(atoms), j.value("irrational_shift_declared", false), r);
    }
    throw InvalidInput("kernel: unknown variant '" + variant + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("kernel: ") + e.what());
  }
}

}  // namespace nlspread
