#include "nlspread/tilted.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "nlspread/error.hpp"

namespace nlspread {

const char* to_string(EigenMethod m) {
  switch (m) {
    case EigenMethod::closed_form: return "closed_form";
    case EigenMethod::periodic_power: return "periodic_power";
    case EigenMethod::discount_limit: return "discount_limit";
    case EigenMethod::rayleigh: return "rayleigh";
  }
  return "rayleigh";
}

EigenMethod eigen_method_from_string(const std::string& s) {
  if (s == "closed_form") return EigenMethod::closed_form;
  if (s == "periodic_power") return EigenMethod::periodic_power;
  if (s == "discount_limit") return EigenMethod::discount_limit;
  if (s == "rayleigh") return EigenMethod::rayleigh;
  throw InvalidInput("unknown eigen method '" + s + "'");
}

DiscreteTilted::DiscreteTilted(const TiltedOperator& op, const SpatialGrid& grid, Extension ext)
    : kp_(DiscreteKernel(op.kernel, grid).tilted(op.p)), ext_(ext), a_(op.a.sample(grid.x_min, grid.dx, grid.n)) {
  moments_ = kp_.row_sums();
}

void DiscreteTilted::apply_kernel(std::span<const double> phi, std::span<double> out) const {
  kp_.apply(phi, out, ext_);
}

void DiscreteTilted::apply(std::span<const double> phi, std::span<double> out) const {
  kp_.apply(phi, out, ext_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= a_[i] * phi[i];
}

Field apply_tilted(const TiltedOperator& op, const Field& phi, Extension ext) {
  DiscreteTilted d(op, phi.grid(), ext);
  std::vector<double> out(phi.size());
  d.apply(phi.values(), out);
  Field result(phi.grid(), std::move(out));
  result.check_finite("eigen");
  return result;
}

EigenEstimate rayleigh_bounds(const DiscreteTilted& op, const Field& phi, const Window& window) {
  if (!(phi.grid() == op.grid())) throw InvalidInput("rayleigh_bounds: witness grid differs from operator grid");
  if (!(phi.min() > 0.0)) throw InvalidInput("rayleigh_bounds: witness is not bounded below away from 0");
  std::vector<double> lphi(phi.size());
  op.apply(phi.values(), lphi);
  EigenEstimate e;
  e.lambda_lower = std::numeric_limits<double>::infinity();
  e.lambda_upper = -std::numeric_limits<double>::infinity();
  const auto& g = phi.grid();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!window.contains(g.x(i))) continue;
    const double q = lphi[i] / phi[i];
    e.lambda_lower = std::min(e.lambda_lower, q);
    e.lambda_upper = std::max(e.lambda_upper, q);
  }
  if (!std::isfinite(e.lambda_lower) || !std::isfinite(e.lambda_upper))
    throw InvalidInput("rayleigh_bounds: window contains no grid node");
  e.central = 0.5 * (e.lambda_lower + e.lambda_upper);
  e.window_R = std::max(window.left, g.x_min);
  e.witness = phi;
  e.method = EigenMethod::rayleigh;
  return e;
}

EigenEstimate rayleigh_bounds(const TiltedOperator& op, const Field& phi, const Window& window, Extension ext) {
  return rayleigh_bounds(DiscreteTilted(op, phi.grid(), ext), phi, window);
}

EigenEstimate periodic_principal_eigen(const TiltedOperator& op, std::size_t cell_nodes, std::optional<double> period,
                                       const PowerOptions& opts) {
  if (cell_nodes < 2) throw InvalidInput("periodic_principal_eigen: need at least two cell nodes");
  if (!op.kernel.is_translation_invariant())
    throw InvalidInput("periodic_principal_eigen: kernel must be translation invariant");
  double L = 0.0;
  if (const auto own = op.a.period()) {
    L = *own;
    if (period) {
      const double ratio = *period / L;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0)
        throw InvalidInput("periodic_principal_eigen: cell length is not a multiple of the media period");
      L = *period;
    }
  } else if (op.a.is_constant()) {
    L = period.value_or(1.0);
  } else {
    throw InvalidInput("periodic_principal_eigen: media are not periodic");
  }
  const SpatialGrid cell(0.0, L / static_cast<double>(cell_nodes), cell_nodes);
  const DiscreteTilted m(op, cell, Extension::periodic);

  const auto a = m.a();
  const double shift = *std::max_element(a.begin(), a.end()) + 1.0;
  std::vector<double> phi(cell_nodes, 1.0), psi(cell_nodes);
  double rq_prev = std::numeric_limits<double>::quiet_NaN();
  double cw_lo = 0.0, cw_hi = 0.0, rq = 0.0;
  std::size_t it = 0;
  double last_increment = std::numeric_limits<double>::infinity();
  for (; it < opts.max_iterations; ++it) {
    m.apply(phi, psi);
    double num = 0.0, den = 0.0;
    cw_lo = std::numeric_limits<double>::infinity();
    cw_hi = -cw_lo;
    for (std::size_t i = 0; i < cell_nodes; ++i) {
      psi[i] += shift * phi[i];
      num += phi[i] * psi[i];
      den += phi[i] * phi[i];
      const double q = psi[i] / phi[i];
      cw_lo = std::min(cw_lo, q);
      cw_hi = std::max(cw_hi, q);
    }
    rq = num / den;
    last_increment = std::abs(rq - rq_prev);
    const double scale = std::max(1.0, std::abs(rq));
    if (last_increment < opts.increment_tol * scale && cw_hi - cw_lo < opts.pinch_tol * scale) break;
    rq_prev = rq;
    const double top = *std::max_element(psi.begin(), psi.end());
    if (!(top > 0.0) || !std::isfinite(top)) throw NumericalFailure("eigen", "power iteration lost positivity");
    for (std::size_t i = 0; i < cell_nodes; ++i) phi[i] = psi[i] / top;
  }
  if (it == opts.max_iterations)
    throw NumericalFailure("eigen", "power iteration did not converge; last increment " +
                                        std::to_string(last_increment));
  EigenEstimate e;
  e.lambda_lower = cw_lo - shift;
  e.lambda_upper = cw_hi - shift;
  e.central = std::clamp(rq - shift, e.lambda_lower, e.lambda_upper);
  e.window_R = -std::numeric_limits<double>::infinity();
  e.witness = Field(cell, std::move(phi));
  e.method = EigenMethod::periodic_power;
  e.iterations = it + 1;
  return e;
}

void to_json(nlohmann::json& j, const EigenEstimate& e) {
  j = {{"lambda_lower", e.lambda_lower}, {"lambda_upper", e.lambda_upper}, {"central", e.central},
       {"method", to_string(e.method)}, {"iterations", e.iterations}};
  if (std::isfinite(e.window_R))
    j["window_R"] = e.window_R;
  else
    j["window_R"] = "-inf";
}

}  // namespace nlspread
