#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nlspread/kernel.hpp"
#include "nlspread/reaction.hpp"
#include "nlspread/regularized.hpp"

namespace nlspread {

struct AuditParams {
  double window_radius = 0.0;  ///< R_audit; 0 picks max(10 r, 20)
  std::vector<double> tilts{-4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0};
  double tail_tolerance = 1e-6;
  double tail_radius = 0.0;  ///< 0 picks 6 sigma for Gaussians and the support radius otherwise
  double delta = 0.0;        ///< Delta of the lower kernel bound; 0 picks half the support
  double eps0 = 0.2;         ///< discount scale for the alpha_p surrogate
  int samples = 201;         ///< x samples per window
};

struct HypothesisRecord {
  std::string id;
  Verdict verdict = Verdict::unknown;
  double surrogate = 0.0;
  std::string note;
};

/// Finite-scale surrogates of the standing kernel and media hypotheses.
struct AssumptionAudit {
  AuditParams params;
  std::vector<HypothesisRecord> records;
  /// Tail mass of the Gaussian beyond its truncation at the largest audited tilt (0 for
  /// compactly supported kernels).
  double truncation_error = 0.0;

  const HypothesisRecord& at(const std::string& id) const;
};

AssumptionAudit audit_assumptions(const Kernel& k, const ReactionKPP& r, const AuditParams& params = {});

void to_json(nlohmann::json& j, const AssumptionAudit& a);

}  // namespace nlspread
