#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nlspread/grid.hpp"

namespace nlspread {

/// Heterogeneous scalar coefficient x -> c(x): a(x), f'_s(x,0), kernel modulations.
///
/// Profiles are built constructively so that boundedness and (almost) periodicity are
/// known from the representation rather than guessed from samples. Immutable; copies
/// share the nested base of affine profiles.
class CoefficientProfile {
 public:
  struct Constant {
    double value = 0.0;
  };
  /// mean + sum_k cos_k cos(2 pi k x / L) + sin_k sin(2 pi k x / L), k = 1, 2, ...
  struct Periodic {
    double period = 1.0;
    double mean = 0.0;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
  };
  /// sum_j c_j sin(nu_j x + theta_j)
  struct QuasiPeriodic {
    std::vector<double> amplitudes;
    std::vector<double> frequencies;
    std::vector<double> phases;
  };
  /// Piecewise-linear samples; evaluation clamps to the end values outside the table.
  struct Tabulated {
    double x_min = 0.0;
    double dx = 1.0;
    std::vector<double> values;
  };
  /// offset + scale * base(x)
  struct Affine {
    double offset = 0.0;
    double scale = 1.0;
    std::shared_ptr<const CoefficientProfile> base;
  };
  using Kind = std::variant<Constant, Periodic, QuasiPeriodic, Tabulated, Affine>;

  CoefficientProfile() : kind_(Constant{0.0}) {}

  static CoefficientProfile constant(double value);
  static CoefficientProfile periodic(double period, double mean, std::vector<double> cos_coeffs,
                                     std::vector<double> sin_coeffs);
  static CoefficientProfile tabulated(double x_min, double dx, std::vector<double> values);
  static CoefficientProfile affine(double offset, double scale, CoefficientProfile base);

  double operator()(double x) const;

  /// Bound on sup|c| implied by the representation.
  double sup_bound() const;
  /// Exact period when the representation is periodic (a single quasi-periodic harmonic
  /// counts); empty for constants and aperiodic kinds.
  std::optional<double> period() const;
  bool is_constant() const;
  /// Constructive almost periodicity: constant, periodic and trigonometric-sum kinds.
  bool is_almost_periodic() const;
  /// True when c(-x) = c(x) follows from the representation.
  bool is_even() const;
  /// x -> c(-x), in the same representation family.
  CoefficientProfile reflected() const;

  /// Samples on a grid.
  Field sample(const SpatialGrid& grid) const;
  std::vector<double> sample(double x_min, double dx, std::size_t n) const;

  const Kind& kind() const { return kind_; }

 private:
  friend CoefficientProfile make_quasiperiodic(std::span<const double>, std::span<const double>,
                                               std::span<const double>);
  explicit CoefficientProfile(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Trigonometric sum sum_j c_j sin(nu_j x + theta_j). Requires equal lengths and nu_j > 0.
CoefficientProfile make_quasiperiodic(std::span<const double> amplitudes,
                                      std::span<const double> frequencies,
                                      std::span<const double> phases);

void to_json(nlohmann::json& j, const CoefficientProfile& p);
void from_json(const nlohmann::json& j, CoefficientProfile& p);

}  // namespace nlspread
