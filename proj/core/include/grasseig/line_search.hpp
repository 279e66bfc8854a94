#pragma once

#include <functional>

namespace grasseig {

struct LineSearchConfig {
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-10;   // final bracket width
  int max_evals = 200;  // objective evaluations, grid included
  int grid = 32;        // uniform samples used to pick the basin before refinement
  int polish_steps = 5; // secant/Newton steps on the derivative
};

struct LineSearchResult {
  double arg = 0.0;
  double value = 0.0;
  int evals = 0;
  bool hit_max_evals = false;
};

/// Minimizes g on [cfg.lo, cfg.hi]: a coarse uniform grid selects the best
/// cell, golden-section search shrinks it to cfg.tol, then up to
/// cfg.polish_steps derivative steps refine when `dg` is given.  Endpoints are
/// always candidates; ties go to the smaller argument.
LineSearchResult scalar_minimize(const std::function<double(double)>& g,
                                 const LineSearchConfig& cfg = {},
                                 const std::function<double(double)>& dg = {});

}  // namespace grasseig
