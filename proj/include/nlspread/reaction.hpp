#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "nlspread/profile.hpp"

namespace nlspread {

/// Saturating factor g in f(x,s) = r(x) s g(s).
enum class ReactionShape {
  logistic,   ///< g(s) = 1 - s
  quadratic,  ///< g(s) = 1 - s^2
};

const char* to_string(ReactionShape s);
ReactionShape reaction_shape_from_string(const std::string& s);

/// KPP reaction f(x,s) = r(x) s g(s) with r = f'_s(.,0) > 0.
///
/// The constructor audits f(x,0) = f(x,1) = 0, 0 < f(x,s) <= r(x) s on (0,1) and
/// inf r > 0 on a 100 x 100 lattice over one window (one period for periodic r,
/// [-audit_half_width, audit_half_width] otherwise) and rejects failures.
class ReactionKPP {
 public:
  explicit ReactionKPP(CoefficientProfile slope, ReactionShape shape = ReactionShape::logistic,
                       double audit_half_width = 10.0);

  const CoefficientProfile& slope_profile() const { return slope_; }
  ReactionShape shape() const { return shape_; }

  double slope(double x) const { return slope_(x); }
  double saturation(double s) const;
  /// f(x,s) without range checks (hot path for time stepping).
  double value_unchecked(double x_slope, double s) const { return x_slope * s * saturation(s); }
  /// sup_s |d/ds (s g(s))| on [0,1]: Lipschitz factor of f relative to r(x).
  double lipschitz_factor() const;

  ReactionKPP reflected() const;

 private:
  CoefficientProfile slope_;
  ReactionShape shape_;
  double audit_half_width_;
};

/// f(x,s); s must lie in [0,1].
double evaluate_reaction(const ReactionKPP& r, double x, double s);
/// f'_s(x,0).
double evaluate_slope(const ReactionKPP& r, double x);

void to_json(nlohmann::json& j, const ReactionKPP& r);
ReactionKPP reaction_from_json(const nlohmann::json& j);

}  // namespace nlspread
