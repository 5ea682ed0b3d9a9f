#include "nlspread/optimize.hpp"

#include <cmath>

#include "nlspread/error.hpp"

namespace nlspread {

ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                             double abs_tol, int max_evaluations) {
  if (!(lo < hi)) throw InvalidInput("golden_section: empty interval");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  while (b - a > std::max(abs_tol, rel_tol * std::abs(0.5 * (a + b))) && evals < max_evaluations) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc <= fd ? ScalarMinimum{c, fc, evals} : ScalarMinimum{d, fd, evals};
}

}  // namespace nlspread
