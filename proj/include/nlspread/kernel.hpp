#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nlspread/profile.hpp"

namespace nlspread {

/// One-dimensional dispersal density J(xi), xi = x - y (displacement of a jump from y to x).
struct Density {
  enum class Shape { uniform, gaussian, triangle, tabulated };

  Shape shape = Shape::uniform;
  double mass = 1.0;
  double shift = 0.0;       ///< J(xi) = J0(xi - shift)
  double half_width = 1.0;  ///< uniform / triangle support [-half_width, half_width]
  double sigma = 1.0;       ///< gaussian width
  double cutoff = 0.0;      ///< gaussian truncation |xi - shift| <= cutoff
  double table_x_min = 0.0;  ///< tabulated: J0 sampled at table_x_min + k*table_dx,
  double table_dx = 1.0;     ///< linear in between, zero outside
  std::vector<double> table;

  static Density uniform(double half_width, double mass = 1.0, double shift = 0.0);
  static Density triangle(double half_width, double mass = 1.0, double shift = 0.0);
  /// Gaussian truncated at `cutoff`; when cutoff <= 0 it is placed where the tilted
  /// integrand at |p| = p_max drops below 1e-14 of its peak.
  static Density gaussian(double sigma, double mass = 1.0, double shift = 0.0, double cutoff = 0.0,
                          double p_max = 4.0);
  static Density tabulated(double x_min, double dx, std::vector<double> values, double shift = 0.0);

  static double gaussian_cutoff_for(double sigma, double p_max);

  double operator()(double xi) const;
  /// Largest |xi| at which J can be nonzero.
  double support_radius() const;
  bool is_even() const;
  Density reflected() const;
  /// Points where J may fail to be smooth, sorted (used to split quadrature panels).
  std::vector<double> breakpoints() const;
  /// Natural panel width for composite quadrature.
  double panel_width() const;
};

/// Dirac atom: contributes weight * phi(x - shift) to K phi(x).
struct DiracAtom {
  double weight = 0.0;
  double shift = 0.0;
  bool operator==(const DiracAtom&) const = default;
};

/// Dispersal kernel K(x,y) in one of three representations.
class Kernel {
 public:
  struct Convolution {
    Density density;
  };
  /// K(x,y) = J(x-y) w(x) w(y), symmetric by construction (J must be even).
  struct Separable {
    Density density;
    CoefficientProfile modulation;
  };
  /// K phi(x) = sum_n a_n phi(x - q_n).
  struct DiracComb {
    std::vector<DiracAtom> atoms;
    /// User declaration that some q_n / L is irrational for the relevant period L;
    /// not decidable from floating-point data.
    bool irrational_shift_declared = false;
  };
  using Variant = std::variant<Convolution, Separable, DiracComb>;

  static Kernel convolution(Density density, std::optional<double> truncation_radius = std::nullopt);
  static Kernel separable(Density density, CoefficientProfile modulation,
                          std::optional<double> truncation_radius = std::nullopt);
  static Kernel dirac_comb(std::vector<DiracAtom> atoms, bool irrational_shift_declared = false,
                           std::optional<double> truncation_radius = std::nullopt);

  const Variant& variant() const { return variant_; }
  double truncation_radius() const { return truncation_radius_; }

  bool is_comb() const { return std::holds_alternative<DiracComb>(variant_); }
  bool is_translation_invariant() const { return !std::holds_alternative<Separable>(variant_); }
  /// K(x,y) = K(y,x).
  bool is_symmetric() const;

  /// Pointwise kernel value K(x, x - xi); zero beyond the truncation radius. Not
  /// defined for Dirac combs (throws).
  double value(double x, double xi) const;

 private:
  Kernel(Variant v, double r) : variant_(std::move(v)), truncation_radius_(r) {}
  Variant variant_;
  double truncation_radius_;
};

/// Largest |p| * truncation_radius accepted before exponentials are considered unsafe.
inline constexpr double kOverflowGuard = 700.0;

/// int K(x, x - xi) e^{-p xi} dxi (composite Gauss-Legendre; exact atom sum for combs).
double tilted_moment(const Kernel& k, double x, double p);
/// Same integral restricted to xi_lo <= xi <= xi_hi.
double tilted_moment_range(const Kernel& k, double x, double p, double xi_lo, double xi_hi);
/// b(x) = int K(x,y) dy; the same code path as tilted_moment at p = 0.
double kernel_mass(const Kernel& k, double x);
/// K^-(x,y) = K(-x,-y).
Kernel reflect_kernel(const Kernel& k);

void to_json(nlohmann::json& j, const Density& d);
void from_json(const nlohmann::json& j, Density& d);
void to_json(nlohmann::json& j, const Kernel& k);
Kernel kernel_from_json(const nlohmann::json& j);

}  // namespace nlspread
