#include "grasseig/line_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "grasseig/errors.hpp"

namespace grasseig {

LineSearchResult scalar_minimize(const std::function<double(double)>& g,
                                 const LineSearchConfig& cfg,
                                 const std::function<double(double)>& dg) {
  if (!(cfg.tol > 0.0)) throw DomainError("line search tolerance must be positive");
  if (!(cfg.lo <= cfg.hi)) throw DomainError("line search interval is empty");

  LineSearchResult best;
  best.value = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto eval = [&](double t) {
    ++evals;
    return g(t);
  };
  auto consider = [&](double t, double v) {
    if (!std::isfinite(v)) return;
    if (v < best.value || (v == best.value && t < best.arg)) {
      best.arg = t;
      best.value = v;
    }
  };

  const double lo = cfg.lo;
  const double hi = cfg.hi;
  if (hi == lo) {
    best.arg = lo;
    consider(lo, eval(lo));
    best.evals = evals;
    return best;
  }

  // coarse grid, endpoints included
  const int m = std::max(2, cfg.grid);
  std::vector<double> ts(static_cast<std::size_t>(m + 1));
  std::vector<double> vs(ts.size());
  for (int i = 0; i <= m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    ts[k] = (i == m) ? hi : lo + (hi - lo) * static_cast<double>(i) / m;
    vs[k] = eval(ts[k]);
    consider(ts[k], vs[k]);
  }
  std::size_t ib = 0;
  for (std::size_t i = 1; i < vs.size(); ++i)
    if (vs[i] < vs[ib]) ib = i;

  // golden section on the two cells around the best grid point
  double a = ts[ib == 0 ? 0 : ib - 1];
  double b = ts[std::min(ib + 1, ts.size() - 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  consider(c, fc);
  consider(d, fd);
  while (b - a > cfg.tol) {
    if (evals >= cfg.max_evals) {
      best.hit_max_evals = true;
      break;
    }
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
      consider(d, fd);
    }
  }

  // derivative polish: secant steps on dg.  Near the minimizer function
  // values stop resolving the argument, so a polished point replaces the
  // incumbent when its value is within rounding and its slope is smaller.
  if (dg && cfg.polish_steps > 0 && best.arg > lo && best.arg < hi) {
    const double slack =
        8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(best.value));
    double x0 = best.arg;
    double x1 = std::min(hi, x0 + std::max(cfg.tol, 1e-8 * (hi - lo)));
    double d0 = dg(x0);
    double d1 = dg(x1);
    double best_slope = std::abs(d0);
    for (int s = 0; s < cfg.polish_steps; ++s) {
      if (evals >= cfg.max_evals) {
        best.hit_max_evals = true;
        break;
      }
      if (d1 == d0) break;
      const double x2 = x1 - d1 * (x1 - x0) / (d1 - d0);
      if (!std::isfinite(x2) || x2 <= lo || x2 >= hi) break;
      const double v = eval(x2);
      const double d2 = dg(x2);
      if (std::isfinite(v) && v <= best.value + slack && std::abs(d2) < best_slope) {
        best.arg = x2;
        best.value = v;
        best_slope = std::abs(d2);
      }
      x0 = x1;
      d0 = d1;
      x1 = x2;
      d1 = d2;
      if (std::abs(x1 - x0) <= 1e-15 * std::max(1.0, std::abs(x1))) break;
    }
  }

  best.evals = evals;
  return best;
}

}  // namespace grasseig
