#include "nlspread/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nlspread/error.hpp"

namespace nlspread {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> sample_points(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / std::max(1, n - 1);
  return xs;
}

const Density* density_of(const Kernel& k) {
  if (const auto* c = std::get_if<Kernel::Convolution>(&k.variant())) return &c->density;
  if (const auto* s = std::get_if<Kernel::Separable>(&k.variant())) return &s->density;
  return nullptr;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

const HypothesisRecord& AssumptionAudit::at(const std::string& id) const {
  for (const auto& r : records)
    if (r.id == id) return r;
  throw InvalidInput("audit: no record for " + id);
}

AssumptionAudit audit_assumptions(const Kernel& k, const ReactionKPP& reaction, const AuditParams& params) {
  AssumptionAudit audit;
  audit.params = params;
  const double r0 = k.truncation_radius();
  auto& P = audit.params;
  if (P.window_radius == 0.0) P.window_radius = std::max(10.0 * r0, 20.0);
  if (P.window_radius < 10.0 * r0) throw InvalidInput("audit: window radius must be at least 10 truncation radii");
  if (P.tilts.empty()) throw InvalidInput("audit: tilt set is empty");
  const Density* d = density_of(k);
  const auto* comb = std::get_if<Kernel::DiracComb>(&k.variant());
  if (P.tail_radius == 0.0)
    P.tail_radius = (d != nullptr && d->shape == Density::Shape::gaussian) ? 6.0 * d->sigma : r0;
  if (P.delta == 0.0) P.delta = d != nullptr ? 0.5 * (d->support_radius() - std::abs(d->shift)) : 0.0;

  const double R = P.window_radius;
  const auto xs = sample_points(-R, R, P.samples);
  std::vector<double> far;
  for (double x : sample_points(R / 2.0, R, (P.samples + 1) / 2)) {
    far.push_back(x);
    far.push_back(-x);
  }
  auto slope = [&](double x) { return reaction.slope(x); };
  auto a_of = [&](double x) { return kernel_mass(k, x) - slope(x); };
  auto add = [&](std::string id, Verdict v, double s, std::string note) {
    audit.records.push_back(HypothesisRecord{std::move(id), v, s, std::move(note)});
  };

  // (K1) bounded tilted moments.
  double k1 = 0.0;
  bool k1_ok = true;
  for (double p : P.tilts)
    for (double x : xs) {
      try {
        k1 = std::max(k1, tilted_moment(k, x, p));
      } catch (const NumericalFailure&) {
        k1_ok = false;
      }
    }
  add("K1", k1_ok && std::isfinite(k1) ? Verdict::pass : Verdict::fail, k1, "max sampled tilted moment");

  // (K2) uniform integrability: tilted tail mass beyond tail_radius.
  double tail = 0.0;
  std::vector<double> tail_tilts = P.tilts;
  tail_tilts.push_back(0.0);
  for (double p : tail_tilts)
    for (double x : (k.is_translation_invariant() ? std::vector<double>{0.0} : xs))
      tail = std::max(tail, tilted_moment_range(k, x, p, -kInf, -P.tail_radius) +
                                tilted_moment_range(k, x, p, P.tail_radius, kInf));
  add("K2", tail < P.tail_tolerance ? Verdict::pass : Verdict::fail, tail,
      "tail mass beyond R=" + fmt(P.tail_radius) + " vs tolerance " + fmt(P.tail_tolerance));

  // Truncation error of Gaussian densities at the largest audited tilt.
  if (d != nullptr && d->shape == Density::Shape::gaussian) {
    double pmax = 0.0;
    for (double p : P.tilts) pmax = std::max(pmax, std::abs(p));
    const double s = d->sigma, c = d->cutoff;
    // int_{|xi|>c} N(0,s^2) e^{p xi}: both tails in closed form via erfc.
    const double g = std::exp(0.5 * pmax * pmax * s * s) * 0.5 *
                     (std::erfc((c - pmax * s * s) / (s * std::sqrt(2.0))) +
                      std::erfc((c + pmax * s * s) / (s * std::sqrt(2.0))));
    audit.truncation_error = g * d->mass;
  }

  // (K3), (K3') lower bound theta_0 on |x-y| <= Delta and upper bound k_0.
  if (d != nullptr) {
    double theta0 = kInf, k0 = 0.0;
    const auto xis = sample_points(-P.delta, P.delta, 41);
    const auto all = sample_points(-r0, r0, 201);
    for (double x : (k.is_translation_invariant() ? std::vector<double>{0.0} : xs)) {
      for (double xi : xis) theta0 = std::min(theta0, k.value(x, xi));
      for (double xi : all) k0 = std::max(k0, k.value(x, xi));
    }
    const Verdict v = theta0 > 0.0 ? Verdict::pass : Verdict::fail;
    add("K3", v, theta0, "min K(x,y) over |x-y| <= " + fmt(P.delta));
    add("K3'", v, theta0, "theta_0 as for K3; sup K = " + fmt(k0));
    add("K5", v, theta0, "certified indirectly through K3 and the evolution positivity test");
  } else {
    double pos = 0.0, neg = 0.0;
    for (const auto& a : comb->atoms) {
      if (a.shift > 0.0) pos = pos == 0.0 ? a.shift : std::min(pos, a.shift);
      if (a.shift < 0.0) neg = neg == 0.0 ? -a.shift : std::min(neg, -a.shift);
    }
    const bool two_sided = pos > 0.0 && neg > 0.0;
    const double reach = two_sided ? std::min(pos, neg) : 0.0;
    add("K3", two_sided ? Verdict::pass : Verdict::fail, reach, "comb reaches both directions (delta_0 shown)");
    add("K3'", Verdict::fail, 0.0, "a Dirac comb has no bounded density");
    add("K5", two_sided ? Verdict::pass : Verdict::fail, reach, "positivity via two-sided shifts");
  }

  // (K4) k(p) surrogate on the far annulus, with slope diagnostics.
  std::vector<std::pair<double, double>> kp;
  double k4 = kInf;
  for (double p : P.tilts) {
    double m = kInf;
    for (double x : far) m = std::min(m, tilted_moment(k, x, p) - kernel_mass(k, x) + slope(x));
    kp.emplace_back(p, m);
    k4 = std::min(k4, m);
  }
  Verdict k4v = k4 > 0.0 ? Verdict::pass : Verdict::fail;
  std::string k4note = "min over R/2 <= |x| <= R and audited tilts of m(x,p) - b(x) + f'(x,0)";
  {
    double small = kInf, big = 0.0;
    for (const auto& [p, _] : kp) {
      small = std::min(small, std::abs(p));
      big = std::max(big, std::abs(p));
    }
    if (big > small && k4v == Verdict::pass) {
      auto ratio = [&](double mag) {
        double worst = kInf;
        for (const auto& [p, v] : kp)
          if (std::abs(p) == mag) worst = std::min(worst, v / mag);
        return worst;
      };
      double mid = kInf;
      for (const auto& [p, v] : kp)
        if (std::abs(p) > small && std::abs(p) < big) mid = std::min(mid, v / std::abs(p));
      const double at_small = ratio(small), at_big = ratio(big);
      k4note += "; k(p)/p = " + fmt(at_small) + " at |p|=" + fmt(small) + ", " + fmt(at_big) + " at |p|=" + fmt(big);
      // Superlinear growth is only claimed if k(p)/p has turned upward by the largest tilt.
      if (std::isfinite(mid) && !(at_big > mid)) k4v = Verdict::unknown;
    }
  }
  add("K4", k4v, k4, k4note);

  // (K6) and (K8): translation continuity of K_p; exact for x-independent kernels.
  if (k.is_translation_invariant()) {
    add("K6", Verdict::pass, 0.0, "translation invariant kernel");
    add("K8", Verdict::pass, 0.0, "translation invariant kernel");
  } else {
    const auto& sep = std::get<Kernel::Separable>(k.variant());
    const double h = 0.01;
    double modulus = 0.0;
    const auto ss = sample_points(-r0, r0, 401);
    for (double x : sample_points(-R / 4, R / 4, 41)) {
      double acc = 0.0;
      for (double s : ss) acc += std::abs(k.value(x, s) - k.value(x + h, s));
      modulus = std::max(modulus, acc * (2.0 * r0 / 400.0));
    }
    add("K6", Verdict::unknown, modulus, "sampled L1 modulus at shift 0.01; no quantitative modulus is required");
    add("K8", sep.modulation.is_almost_periodic() ? Verdict::pass : Verdict::unknown, modulus,
        "almost periodicity of the modulation");
  }

  // c_lower, c_upper and alpha_p for (K7).
  double alpha = 0.0;
  for (double p : P.tilts) {
    double clo = kInf, chi = -kInf, frac = 0.0;
    for (double x : xs) {
      const double m = tilted_moment(k, x, p);
      const double c = m - a_of(x);
      clo = std::min(clo, c);
      chi = std::max(chi, c);
      frac = std::max(frac, (tilted_moment_range(k, x, p, -kInf, -P.tail_radius) +
                             tilted_moment_range(k, x, p, P.tail_radius, kInf)) / m);
    }
    const double expo = (chi - clo) / P.eps0;
    alpha = std::max(alpha, expo > 700.0 ? (frac > 0.0 ? kInf : 0.0) : frac * std::exp(expo));
  }
  add("K7", alpha < 1.0 ? Verdict::pass : Verdict::unknown, alpha,
      "alpha_p at eps_0=" + fmt(P.eps0) + ", r=" + fmt(P.tail_radius) + " (kernel truncated: compact support holds)");

  // (K9) almost periodicity of a = b - f'.
  const bool ap = reaction.slope_profile().is_almost_periodic() &&
                  (k.is_translation_invariant() ||
                   std::get<Kernel::Separable>(k.variant()).modulation.is_almost_periodic());
  add("K9", ap ? Verdict::pass : Verdict::unknown, ap ? 1.0 : 0.0, "constructive almost periodicity of the profiles");

  // (S1) kappa surrogate over a fine finite tilt grid.
  {
    double a_lo = kInf, a_hi = -kInf;
    for (double x : xs) {
      a_lo = std::min(a_lo, a_of(x));
      a_hi = std::max(a_hi, a_of(x));
    }
    double best = kInf, argp = 0.0;
    const double pmax = std::min(4.0, 0.99 * kOverflowGuard / r0);
    for (double p : sample_points(-pmax, pmax, 161)) {
      double m = kInf;
      for (double x : (k.is_translation_invariant() ? std::vector<double>{0.0} : xs))
        m = std::min(m, tilted_moment(k, x, p));
      if (m < best) {
        best = m;
        argp = p;
      }
    }
    const double kappa = best - a_hi + a_lo;
    add("S1-kappa", kappa > 0.0 ? Verdict::pass : Verdict::fail, kappa, "minimizing sampled tilt p=" + fmt(argp));
  }

  // (H1)-(H4) for Dirac combs.
  if (comb != nullptr) {
    double h1 = 0.0;
    for (double p : P.tilts) h1 = std::max(h1, tilted_moment(k, 0.0, p));
    add("H1", std::isfinite(h1) ? Verdict::pass : Verdict::fail, h1, "finite atom list");
    double inf_sum = kInf, mass = 0.0;
    const double pmax = std::min(20.0, 0.99 * kOverflowGuard / r0);
    for (double p : sample_points(-pmax, pmax, 2001)) inf_sum = std::min(inf_sum, tilted_moment(k, 0.0, p));
    for (const auto& a : comb->atoms) mass += a.weight;
    double inf_slope = kInf;
    for (double x : far) inf_slope = std::min(inf_slope, slope(x));
    const double h2 = inf_sum - mass + inf_slope;
    add("H2", h2 > 0.0 ? Verdict::pass : Verdict::fail, h2, "inf_p sum a_n e^{-p q_n} - sum a_n + inf f'");
    const auto& k3 = audit.at("K3");
    add("H3", k3.verdict, k3.surrogate, "positive and negative shifts present");
    add("H4", comb->irrational_shift_declared ? Verdict::pass : Verdict::unknown,
        comb->irrational_shift_declared ? 1.0 : 0.0, "irrational shift ratio is a user declaration");
  } else {
    for (const char* id : {"H1", "H2", "H3", "H4"}) add(id, Verdict::unknown, 0.0, "applies to Dirac combs only");
  }
  return audit;
}

void to_json(nlohmann::json& j, const AssumptionAudit& a) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : a.records) {
    nlohmann::json row = {{"hypothesis", r.id}, {"verdict", to_string(r.verdict)}, {"note", r.note}};
    row["surrogate"] = std::isfinite(r.surrogate) ? nlohmann::json(r.surrogate) : nlohmann::json(nullptr);
    recs.push_back(row);
  }
  j = {{"parameters",
        {{"window_radius", a.params.window_radius},
         {"tilts", a.params.tilts},
         {"tail_tolerance", a.params.tail_tolerance},
         {"tail_radius", a.params.tail_radius},
         {"delta", a.params.delta},
         {"eps0", a.params.eps0},
         {"samples", a.params.samples}}},
       {"truncation_error", a.truncation_error},
       {"records", recs}};
}

}  // namespace nlspread
