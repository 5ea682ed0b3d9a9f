#include "nlspread/reaction.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "nlspread/error.hpp"

namespace nlspread {

const char* to_string(ReactionShape s) {
  switch (s) {
    case ReactionShape::logistic: return "logistic";
    case ReactionShape::quadratic: return "quadratic";
  }
  return "?";
}

ReactionShape reaction_shape_from_string(const std::string& s) {
  if (s == "logistic") return ReactionShape::logistic;
  if (s == "quadratic") return ReactionShape::quadratic;
  throw InvalidInput("unknown reaction shape '" + s + "'");
}

ReactionKPP::ReactionKPP(CoefficientProfile slope, ReactionShape shape, double audit_half_width)
    : slope_(std::move(slope)), shape_(shape), audit_half_width_(audit_half_width) {
  const auto period = slope_.period();
  const double lo = period ? 0.0 : -audit_half_width_;
  const double width = period ? *period : 2.0 * audit_half_width_;
  constexpr int kLattice = 100;
  for (int ix = 0; ix < kLattice; ++ix) {
    const double x = lo + width * ix / (kLattice - 1);
    const double r = slope_(x);
    if (!(r > 0.0)) throw InvalidInput("ReactionKPP: f'_s(x,0) must be positive (fails at x=" + std::to_string(x) + ")");
    if (value_unchecked(r, 0.0) != 0.0 || value_unchecked(r, 1.0) != 0.0)
      throw InvalidInput("ReactionKPP: f(x,0) and f(x,1) must vanish");
    for (int is = 1; is < kLattice; ++is) {
      const double s = static_cast<double>(is) / kLattice;
      const double f = value_unchecked(r, s);
      if (!(f > 0.0) || f > r * s * (1.0 + 1e-15))
        throw InvalidInput("ReactionKPP: KPP condition 0 < f(x,s) <= f'_s(x,0) s violated");
    }
  }
}

double ReactionKPP::saturation(double s) const {
  switch (shape_) {
    case ReactionShape::logistic: return 1.0 - s;
    case ReactionShape::quadratic: return 1.0 - s * s;
  }
  return 0.0;
}

double ReactionKPP::lipschitz_factor() const {
  switch (shape_) {
    case ReactionShape::logistic: return 1.0;   // |1 - 2s|
    case ReactionShape::quadratic: return 2.0;  // |1 - 3s^2|
  }
  return 1.0;
}

ReactionKPP ReactionKPP::reflected() const { return ReactionKPP(slope_.reflected(), shape_, audit_half_width_); }

double evaluate_reaction(const ReactionKPP& r, double x, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidInput("evaluate_reaction: density must lie in [0,1]");
  return r.value_unchecked(r.slope(x), s);
}

double evaluate_slope(const ReactionKPP& r, double x) { return r.slope(x); }

void to_json(nlohmann::json& j, const ReactionKPP& r) {
  j = {{"slope", r.slope_profile()}, {"shape", to_string(r.shape())}};
}

ReactionKPP reaction_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("slope")) throw InvalidInput("reaction: expected object with 'slope'");
  return ReactionKPP(j.at("slope").get<CoefficientProfile>(),
                     reaction_shape_from_string(j.value("shape", std::string("logistic"))));
}

}  // namespace nlspread
