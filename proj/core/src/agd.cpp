#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "grasseig/errors.hpp"
#include "grasseig/solvers.hpp"

namespace grasseig {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

void require_gap(const SpectralParams& params) {
  if (params.degenerate || !(params.delta > 0.0)) {
    throw DegenerateGapError("spectral gap lambda_p - lambda_{p+1} is zero; the dominant subspace is not unique");
  }
  if (!(params.gamma > 0.0) || !(params.mu <= params.gamma)) {
    throw DomainError("spectral parameters violate 0 < mu <= gamma");
  }
}

struct ExpImage {
  SubspacePoint point;
  std::optional<Matrix> image;
};

// Exp_Y(T) and, when A Y and A T are known, A Exp_Y(T) without a product:
// Exp_Y(T) ~ Y W cos(S) W^T + T W sinc(S) W^T with T = U S W^T.
ExpImage exp_with_image(const SubspacePoint& y, const Matrix* ay, const Matrix& t, const Matrix* at,
                        const CompactSvd& svd) {
  Vector s = svd.sigma;
  if (s.size() == 0 || s.maxCoeff() == 0.0) {
    return {y, ay ? std::optional<Matrix>(*ay) : std::nullopt};
  }
  const double cut = kRotationCutoff * s.maxCoeff();
  Vector co(s.size());
  Vector sc(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) <= cut) s(i) = 0.0;
    co(i) = std::cos(s(i));
    sc(i) = s(i) == 0.0 ? 1.0 : std::sin(s(i)) / s(i);
  }
  const Matrix& w = svd.v;
  Matrix rep = (y.rep() * w * co.asDiagonal() + t * w * sc.asDiagonal()) * w.transpose();
  ThinQr qr = thin_qr(rep);
  std::optional<Matrix> image;
  if (ay && at) {
    Matrix arep = (*ay * w * co.asDiagonal() + *at * w * sc.asDiagonal()) * w.transpose();
    image = right_solve_upper(arep, qr.r);
  }
  return {SubspacePoint::trusted(std::move(qr.q)), std::move(image)};
}

}  // namespace

double shrink_beta(const SpectralParams& params) { return 0.2 * std::sqrt(params.mu / params.gamma); }

double gamma0_lower_bound(const SpectralParams& params) {
  const double b = shrink_beta(params);
  const double r = std::sqrt(b * b + (1.0 + b) * params.mu / params.gamma);
  return (r - b) / (r + b) * params.mu;
}

double gamma0_default(const SpectralParams& params) {
  const double b = shrink_beta(params);
  const double r = std::sqrt(b * b + b + 1.0);
  return (r - b) / (r + b) * params.gamma;
}

double alpha_solve(double gamma_k, double mu, double gamma_eff) {
  if (!(gamma_k > 0.0) || !(mu > 0.0) || !(gamma_eff > 0.0)) {
    throw DomainError("alpha_solve: gamma_k, mu and gamma must be positive");
  }
  if (!(mu <= gamma_eff)) throw DomainError("alpha_solve: mu exceeds gamma");
  // a^2 - b a - c/4 = 0
  const double b = (mu - gamma_k) / (4.0 * gamma_eff);
  const double c = gamma_k / gamma_eff;
  const double root = std::sqrt(b * b + c);
  if (b >= 0.0) return 0.5 * (b + root);
  return 0.5 * c / (root - b);
}

AgdState agd_init(const SubspacePoint& x0, const SpectralParams& params, const AgdOptions& options) {
  require_gap(params);
  double g0 = gamma0_default(params);
  if (options.gamma0) {
    const double lo = gamma0_lower_bound(params);
    const double v = *options.gamma0;
    if (!(v >= lo * (1.0 - 1e-12) && v <= params.gamma * (1.0 + 1e-12))) {
      throw ParameterError("gamma0 = " + std::to_string(v) + " outside [" + std::to_string(lo) +
                           ", " + std::to_string(params.gamma) + "]");
    }
    g0 = v;
  }
  return AgdState{x0, x0, std::nullopt, g0, shrink_beta(params), 0, params, options.variant};
}

GeodesicSearch geodesic_search(const SymmetricOperator& a, const SubspacePoint& v,
                               const SubspacePoint& x, const LineSearchConfig& cfg,
                               const Matrix* av) {
  TangentVector log_v = log_map(v, x);
  GeodesicCoeffs c = restrict_to_geodesic(a, log_v, av);

  double beta = 0.0;
  bool hit = false;
  if (c.sigma.size() > 0 && c.sigma.maxCoeff() > 0.0) {
    LineSearchConfig lc = cfg;
    lc.lo = 0.0;
    lc.hi = 1.0;
    const LineSearchResult r = scalar_minimize(
        [&](double t) { return eval_along_delta(c, t); }, lc,
        [&](double t) { return eval_along_deriv(c, t); });
    beta = r.arg;
    hit = r.hit_max_evals;
  }

  GeodesicPoint y = point_along(c, beta);
  const double fy = f_from_product(y.y, y.ay);
  const GeodesicPoint xe = point_along(c, 1.0);
  const Gradient gx = grad_from_product(xe.y, xe.ay);
  return GeodesicSearch{beta, std::move(c), std::move(y), std::move(log_v), gx.f, fy,
                        gx.grad.norm(), hit};
}

AgdIterationInfo agd_advance(AgdState& state, const SymmetricOperator& a,
                             const GeodesicSearch& search, const LineSearchConfig& cfg) {
  const SpectralParams& prm = state.params;
  const bool retr = state.variant == AgdVariant::Retraction;
  const SubspacePoint& y = search.y.y;
  const Matrix& ay = search.y.ay;

  AgdIterationInfo info;
  info.k = state.k;
  info.beta = search.beta;
  info.gammaK = state.gammaK;
  info.fx = search.fx;
  info.fy = search.fy;
  info.grad_norm_x = search.grad_norm_x;
  info.search_hit_max_evals = search.hit_max_evals;

  const Gradient gy = grad_from_product(y, ay);
  const Matrix& g = gy.grad.mat();
  info.grad_norm_y = g.norm();

  // Log_Y(V) = -beta * (velocity of the searched geodesic at beta), carried to
  // the orthonormal representative of Y.
  Matrix log_yv = right_solve_upper(geodesic_velocity(search.coeffs, search.beta), search.y.r);
  log_yv *= -search.beta;
  info.stationarity = (g.array() * log_yv.array()).sum();

  // gradient step
  const double gamma_eff = retr ? prm.gammaTilde : prm.gamma;
  const double alpha = alpha_solve(state.gammaK, prm.mu, gamma_eff);
  info.alpha = alpha;

  std::optional<Matrix> ag;
  std::optional<SubspacePoint> x_next;
  if (retr) {
    ag = a.apply_block(g);
    RetractionStep rs = retraction_line_search(y, ay, g, *ag, cfg);
    info.step = rs.eta;
    info.fxNext = rs.f_after;
    info.search_hit_max_evals = info.search_hit_max_evals || rs.hit_max_evals;
    x_next = std::move(rs.x);
  } else {
    const TangentVector step = gy.grad.scaled(-1.0 / prm.gamma);
    const double sn = step.spectral_norm();
    if (!(sn < kHalfPi)) {
      throw GeometryError("gradient step leaves the injectivity domain (||G||_2 = " +
                          std::to_string(sn) + ")");
    }
    info.step = 1.0 / prm.gamma;
    info.fxNext = std::numeric_limits<double>::quiet_NaN();
    x_next = exp_map(step);
  }

  // parameter updates
  const double gbar = (1.0 - alpha) * state.gammaK + alpha * prm.mu;
  const double gnext = gbar / (1.0 + state.shrinkBeta);
  info.gammaNext = gnext;
  if (gnext < 0.5 * prm.mu * (1.0 - 1e-12)) {
    throw ParameterError("gamma_{k+1} = " + std::to_string(gnext) + " fell below mu/2 = " +
                         std::to_string(0.5 * prm.mu));
  }

  // momentum: V_{k+1} = Exp_Y(c1 Log_Y(V_k) - c2 grad f(Y))
  const double c1 = (1.0 - alpha) * state.gammaK / gbar;
  const double c2 = 2.0 * alpha / gbar;
  Matrix t = c1 * log_yv - c2 * g;
  const CompactSvd tsvd = compact_svd(t);
  info.momentum_norm = tsvd.sigma.size() ? tsvd.sigma(0) : 0.0;
  if (!(info.momentum_norm < kHalfPi)) {
    throw GeometryError("momentum step leaves the injectivity domain (||T||_2 = " +
                        std::to_string(info.momentum_norm) + ")");
  }
  std::optional<Matrix> at;
  if (retr) {
    Matrix a_log = right_solve_upper(reuse_A_velocity(search.coeffs, search.beta), search.y.r);
    a_log *= -search.beta;
    at = c1 * a_log - c2 * *ag;
  }
  ExpImage vn = exp_with_image(y, retr ? &ay : nullptr, t, at ? &*at : nullptr, tsvd);

  state.x = std::move(*x_next);
  state.v = std::move(vn.point);
  state.av = std::move(vn.image);
  state.gammaK = gnext;
  ++state.k;
  return info;
}

AgdIterationInfo agd_step(AgdState& state, const SymmetricOperator& a, const LineSearchConfig& cfg) {
  const GeodesicSearch s =
      geodesic_search(a, state.v, state.x, cfg, state.av ? &*state.av : nullptr);
  return agd_advance(state, a, s, cfg);
}

}  // namespace grasseig
