#include <cmath>
#include <numbers>
#include <string>

#include "grasseig/errors.hpp"
#include "grasseig/solvers.hpp"

namespace grasseig {

namespace {

Matrix project(const SubspacePoint& x, const Matrix& m) {
  return m - x.rep() * (x.rep().transpose() * m);
}

}  // namespace

BaselineState baseline_init(const SymmetricOperator& a, const SubspacePoint& x0) {
  return {x0, a.apply_block(x0.rep())};
}

RetractionStep retraction_line_search(const SubspacePoint& y, const Matrix& ay, const Matrix& g,
                                      const Matrix& ag, const LineSearchConfig& cfg) {
  const double gs = spectral_norm(g);
  if (!(gs > 0.0)) return {0.0, f_from_product(y, ay), y, ay, false};

  // eta = tan(phi) / ||G||_2 covers the whole ray eta >= 0
  const RetractionRestriction rr = restrict_to_retraction(y, ay, g, ag);
  LineSearchConfig lc = cfg;
  lc.lo = 0.0;
  lc.hi = std::numbers::pi / 2 - 1e-6;
  auto eta_of = [gs](double phi) { return std::tan(phi) / gs; };
  const LineSearchResult r = scalar_minimize(
      [&](double phi) { return retraction_delta(rr, eta_of(phi)); }, lc,
      [&](double phi) {
        const double c = std::cos(phi);
        return retraction_deriv(rr, eta_of(phi)) / (c * c * gs);
      });

  const double eta = eta_of(r.arg);
  ThinQr qr = thin_qr(y.rep() - eta * g);
  Matrix ax = right_solve_upper(ay - eta * ag, qr.r);
  SubspacePoint x = SubspacePoint::trusted(std::move(qr.q));
  const double f = f_from_product(x, ax);
  return {eta, f, std::move(x), std::move(ax), r.hit_max_evals};
}

StepInfo steepest_descent_step(BaselineState& state, const SymmetricOperator& a,
                               const LineSearchConfig& cfg) {
  const Gradient gr = grad_from_product(state.x, state.ax);
  const Matrix& g = gr.grad.mat();
  const Matrix ag = a.apply_block(g);
  RetractionStep rs = retraction_line_search(state.x, state.ax, g, ag, cfg);
  StepInfo info;
  info.f_before = gr.f;
  info.f_after = rs.f_after;
  info.grad_norm = g.norm();
  info.step = rs.eta;
  state.x = std::move(rs.x);
  state.ax = std::move(rs.ax);
  return info;
}

SubspacePoint steepest_descent_step(const SymmetricOperator& a, const SubspacePoint& x,
                                    const LineSearchConfig& cfg) {
  BaselineState st = baseline_init(a, x);
  steepest_descent_step(st, a, cfg);
  return st.x;
}

SubspacePoint subspace_iteration_step(const SymmetricOperator& a, const SubspacePoint& x) {
  return SubspacePoint::trusted(qf(a.apply_block(x.rep())));
}

// ---------------------------------------------------------------------------

ChebyshevFilter chebyshev_filter(const SymmetricOperator& a, const SubspacePoint& x, int degree,
                                 double lo, double hi, const Matrix* ax) {
  if (degree < 1) throw ConfigurationError("Chebyshev degree must be >= 1");
  if (!(lo < hi)) throw ConfigurationError("Chebyshev interval needs lo < hi");
  const double c = 0.5 * (hi + lo);
  const double e = 0.5 * (hi - lo);
  const Index p = x.p();

  Vector scale = Vector::Ones(p);
  auto normalize = [&](Matrix& cur, Matrix* prev) {
    for (Index j = 0; j < p; ++j) {
      const double nrm = cur.col(j).norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) continue;
      cur.col(j) /= nrm;
      if (prev) prev->col(j) /= nrm;
      scale(j) *= nrm;
    }
  };

  Matrix prev = x.rep();
  Matrix cur = ((ax ? *ax : a.apply_block(x.rep())) - c * x.rep()) / e;
  for (int j = 1; j < degree; ++j) {
    normalize(cur, &prev);
    Matrix next = (2.0 / e) * (a.apply_block(cur) - c * cur) - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  normalize(cur, nullptr);
  return {std::move(cur), std::move(scale)};
}

SubspacePoint chebyshev_step(const SymmetricOperator& a, const SubspacePoint& x, int degree,
                             double lo, double hi, const Matrix* ax) {
  return SubspacePoint::trusted(qf(chebyshev_filter(a, x, degree, lo, hi, ax).block));
}

std::optional<std::string> chebyshev_interval_warning(double lo, double hi,
                                                      const SpectralParams& params) {
  if (hi >= params.lambdaP || lo >= params.lambdaP) {
    return "Chebyshev damping interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
           "] reaches the wanted eigenvalue lambda_p = " + std::to_string(params.lambdaP);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

double polak_ribiere(const Matrix& g, const Matrix& g_prev, double g_prev_norm2) {
  if (!(g_prev_norm2 > 0.0)) return 0.0;
  return (g.array() * (g - g_prev).array()).sum() / g_prev_norm2;
}

CgDirection cg_direction(const TangentVector& g, const Matrix* g_prev, const Matrix* d_prev,
                         std::optional<double> beta_override) {
  const TangentVector sd = g.scaled(-1.0);
  if (!g_prev || !d_prev) return {sd, 0.0, false};
  const double n2 = g_prev->squaredNorm();
  const double beta = beta_override ? *beta_override : polak_ribiere(g.mat(), *g_prev, n2);
  if (!(beta > 0.0)) return {sd, beta, true};
  Matrix d = -g.mat() + beta * *d_prev;
  if (!((d.array() * g.mat().array()).sum() < 0.0)) return {sd, beta, true};
  return {TangentVector::trusted(g.base(), std::move(d)), beta, false};
}

RcgState rcg_init(const SymmetricOperator& a, const SubspacePoint& x0) {
  return {x0, a.apply_block(x0.rep()), std::nullopt, std::nullopt};
}

StepInfo rcg_step(RcgState& state, const SymmetricOperator& a, const LineSearchConfig& cfg) {
  const Gradient gr = grad_from_product(state.x, state.ax);
  std::optional<Matrix> gp;
  std::optional<Matrix> dp;
  if (state.prev_grad && state.prev_dir) {
    gp = project(state.x, *state.prev_grad);
    dp = project(state.x, *state.prev_dir);
  }
  const CgDirection cd = cg_direction(gr.grad, gp ? &*gp : nullptr, dp ? &*dp : nullptr);

  const GeodesicCoeffs c = restrict_to_geodesic(a, cd.dir, &state.ax);
  double eta = 0.0;
  const double smax = c.sigma.size() ? c.sigma.maxCoeff() : 0.0;
  if (smax > 0.0) {
    LineSearchConfig lc = cfg;
    lc.lo = 0.0;
    lc.hi = (std::numbers::pi / 2) / smax;
    eta = scalar_minimize([&](double t) { return eval_along_delta(c, t); }, lc,
                          [&](double t) { return eval_along_deriv(c, t); })
              .arg;
  }
  GeodesicPoint np = point_along(c, eta);

  StepInfo info;
  info.f_before = gr.f;
  info.grad_norm = gr.grad.norm();
  info.step = eta;
  info.restarted = cd.restarted;
  info.beta_pr = cd.beta;
  info.f_after = f_from_product(np.y, np.ay);

  // the geodesic velocity at eta is the parallel transport of the direction
  state.prev_dir = right_solve_upper(geodesic_velocity(c, eta), np.r);
  state.prev_grad = gr.grad.mat();
  state.x = std::move(np.y);
  state.ax = std::move(np.ay);
  return info;
}

}  // namespace grasseig
