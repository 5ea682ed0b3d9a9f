#pragma once

#include <functional>

namespace nlspread {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of a unimodal f on [lo, hi], stopping when the
/// interval is shorter than rel_tol * |midpoint| (or abs_tol). Ties move left, so on a
/// plateau the leftmost minimizer is approached.
ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                             double abs_tol = 1e-14, int max_evaluations = 500);

}  // namespace nlspread
