#include "grasseig/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "grasseig/errors.hpp"
#include "grasseig/grassmann.hpp"
#include "grasseig/problems.hpp"
#include "grasseig/rayleigh.hpp"
#include "grasseig/solvers.hpp"

namespace grasseig {

namespace {

class Check {
 public:
  Check(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}
  void add(double violation) {
    ++samples_;
    if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
    worst_ = std::max(worst_, violation);
  }
  PropertyResult result() const {
    return {name_, samples_, worst_, tol_, samples_ > 0 && worst_ <= tol_};
  }

 private:
  std::string name_;
  double tol_;
  int samples_ = 0;
  double worst_ = -std::numeric_limits<double>::infinity();
};

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t i) {
  return seed * 0x9E3779B97F4A7C15ULL + i * 0xBF58476D1CE4E5B9ULL + 1;
}

Matrix random_orthogonal(Index p, std::uint64_t seed) { return random_point(p, p, seed).rep(); }

struct DiagonalProblem {
  SymmetricOperator op;
  SubspacePoint v_alpha;
  SpectralParams params;
};

DiagonalProblem diagonal_problem(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> lam(static_cast<std::size_t>(n));
  for (auto& l : lam) l = unif(rng);
  std::sort(lam.begin(), lam.end(), std::greater<>());
  // keep a visible gap after position p
  const auto up = static_cast<std::size_t>(p);
  const double gap = 0.05;
  for (std::size_t i = up; i < lam.size(); ++i) lam[i] = std::min(lam[i], lam[up - 1] - gap);
  for (auto& l : lam) l = std::max(l, 0.0);
  std::sort(lam.begin(), lam.end(), std::greater<>());
  Vector d = Eigen::Map<Vector>(lam.data(), n);
  SymmetricOperator op = SymmetricOperator::diagonal(d);
  Matrix v = Matrix::Identity(n, p);
  return {op, SubspacePoint::trusted(std::move(v)), derive_params(lam, p)};
}

double uniform(std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// random tangent vector at x with prescribed spectral norm
TangentVector tangent_with_spectral_norm(const SubspacePoint& x, double s, std::uint64_t seed) {
  TangentVector g = random_tangent(x, 1.0, seed);
  const double sn = g.spectral_norm();
  return sn > 0.0 ? g.scaled(s / sn) : g;
}

}  // namespace

std::vector<PropertyResult> verify_geometry(std::uint64_t seed) {
  const std::pair<Index, Index> shapes[] = {{10, 2}, {30, 5}, {100, 10}};
  Check roundtrip("exp_log_roundtrip", 1e-8);
  Check dist_log("distance_equals_log_norm", 1e-8);
  Check unit_speed("geodesic_unit_speed", 1e-8);
  Check invariance("representative_invariance", 1e-10);
  Check retraction("retraction_second_order_agreement", 0.0);
  Check curv_nonneg("nonnegative_curvature_log_bound", 1e-10);
  Check curv_bounded("bounded_curvature_log_comparison", 1e-10);

  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto [n, p] = shapes[i % 3];
    const SubspacePoint x = random_point(n, p, sub_seed(seed, 10 * i));
    const double s = uniform(sub_seed(seed, 10 * i + 1), 0.0, 1.4);
    const TangentVector g = tangent_with_spectral_norm(x, s, sub_seed(seed, 10 * i + 2));
    const SubspacePoint y = exp_map(g);
    const TangentVector back = log_map(x, y);
    roundtrip.add((back.mat() - g.mat()).norm() / std::max(1.0, g.norm()));
    dist_log.add(std::abs(distance(x, y) - back.norm()));

    if (i < 50) {
      const TangentVector u = random_tangent(x, 1.0, sub_seed(seed, 10 * i + 3));
      for (double t : {0.1, 0.7, 1.4}) unit_speed.add(std::abs(distance(x, exp_map(u.scaled(t))) - t));

      const Matrix q1 = random_orthogonal(p, sub_seed(seed, 10 * i + 4));
      const Matrix q2 = random_orthogonal(p, sub_seed(seed, 10 * i + 5));
      const SubspacePoint xq = SubspacePoint::trusted(x.rep() * q1);
      const SubspacePoint yq = SubspacePoint::trusted(y.rep() * q2);
      invariance.add(std::abs(distance(xq, yq) - distance(x, y)));
      invariance.add((log_map(xq, yq).mat() - back.mat() * q1).norm());
      const double f1 = -(x.rep().transpose() * y.rep()).squaredNorm();
      const double f2 = -(xq.rep().transpose() * yq.rep()).squaredNorm();
      invariance.add(std::abs(f1 - f2));
    }
    if (i < 20) {
      const TangentVector u = random_tangent(x, 1.0, sub_seed(seed, 10 * i + 6));
      const double d1 = distance(retract_qr(u.scaled(1e-2)), exp_map(u.scaled(1e-2)));
      const double d2 = distance(retract_qr(u.scaled(1e-3)), exp_map(u.scaled(1e-3)));
      // dist / t^2 must not grow as t shrinks (absolute slack for rounding)
      retraction.add(d2 / 1e-6 - 1.1 * d1 / 1e-4 - 1e-4);
    }
  }

  const double r1 = 1.0 / (4.0 * std::sqrt(2.0));
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto [n, p] = shapes[i % 3];
    const SubspacePoint center = random_point(n, p, sub_seed(seed, 5000 + 10 * i));

    // three points within pi/8 of a center are pairwise closer than pi/4
    auto near = [&](std::uint64_t k, double rmax) {
      const double r = uniform(sub_seed(seed, 7000 + 10 * i + k), 0.0, rmax);
      return perturb_within(center, r, sub_seed(seed, 9000 + 10 * i + k));
    };
    {
      const SubspacePoint a = near(0, std::numbers::pi / 8);
      const SubspacePoint b = near(1, std::numbers::pi / 8);
      const SubspacePoint c = near(2, std::numbers::pi / 8);
      const double lhs = distance(a, b);
      const double rhs = (log_map(c, a).mat() - log_map(c, b).mat()).norm();
      curv_nonneg.add(lhs - rhs);
    }
    {
      const SubspacePoint& a = center;
      const SubspacePoint b = near(3, r1);
      const SubspacePoint c = near(4, r1);
      const SubspacePoint d = near(5, r1);
      const double m = std::max(distance(c, a), distance(d, a));
      const double lhs = (log_map(d, a).mat() - log_map(d, b).mat()).squaredNorm();
      const double rhs =
          (1.0 + 5.0 * 2.0 * m * m) * (log_map(c, a).mat() - log_map(c, b).mat()).squaredNorm();
      curv_bounded.add(lhs - rhs);
    }
  }

  return {roundtrip.result(), dist_log.result(), unit_speed.result(), invariance.result(),
          retraction.result(), curv_nonneg.result(), curv_bounded.result()};
}

std::vector<PropertyResult> verify_convexity(std::uint64_t seed) {
  Check growth("quadratic_growth", 1e-10);
  Check weak("weak_strong_convexity", 1e-10);
  Check hess("hessian_upper_bound", 1e-8);
  Check upper("quadratic_upper_bound", 1e-10);
  Check desc_exp("descent_exp_step", 1e-10);
  Check desc_retr("descent_retraction_line_search", 1e-10);

  for (std::uint64_t i = 0; i < 100; ++i) {
    const DiagonalProblem pr = diagonal_problem(20, 3, sub_seed(seed, 20 * i));
    const double r = uniform(sub_seed(seed, 20 * i + 1), 0.0, 1.0);
    const SubspacePoint x = perturb_within(pr.v_alpha, r, sub_seed(seed, 20 * i + 2));
    growth.add(-quadratic_growth_gap(pr.op, x, pr.v_alpha, pr.params));
    weak.add(-weak_strong_gap(pr.op, x, pr.v_alpha, pr.params));

    const SubspacePoint z = random_point(20, 3, sub_seed(seed, 20 * i + 3));
    const TangentVector g = random_tangent(z, uniform(sub_seed(seed, 20 * i + 4), 0.1, 2.0),
                                           sub_seed(seed, 20 * i + 5));
    hess.add(std::abs(hessian_quadform(pr.op, g)) - pr.params.gamma * g.mat().squaredNorm());

    const SubspacePoint w = perturb_within(z, uniform(sub_seed(seed, 20 * i + 6), 0.0, 1.0),
                                           sub_seed(seed, 20 * i + 7));
    const Gradient gz = grad(pr.op, z);
    const double fw = f_value(pr.op, w);
    const TangentVector lzw = log_map(z, w);
    const double dzw = distance(z, w);
    upper.add(fw - (gz.f + inner(gz.grad, lzw) + 0.5 * pr.params.gamma * dzw * dzw));

    if (i < 50) {
      const double gn2 = gz.grad.mat().squaredNorm();
      const SubspacePoint xe = exp_map(gz.grad.scaled(-1.0 / pr.params.gamma));
      desc_exp.add(f_value(pr.op, xe) - (gz.f - gn2 / (2.0 * pr.params.gamma)));
      const Matrix ag = pr.op.apply_block(gz.grad.mat());
      const RetractionStep rs = retraction_line_search(z, gz.ax, gz.grad.mat(), ag);
      desc_retr.add(f_value(pr.op, rs.x) - (gz.f - 2.0 * gn2 / (5.0 * pr.params.gamma)));
    }
  }
  return {growth.result(), weak.result(), hess.result(), upper.result(), desc_exp.result(),
          desc_retr.result()};
}

std::vector<PropertyResult> verify_solvers(std::uint64_t seed) {
  Check alpha("alpha_solve_matches_bisection", 1e-12);
  Check floor("agd_gamma_floor", 0.0);
  Check mono("agd_monotone_f", 1e-10);
  Check envelope("agd_contraction_envelope", 0.0);
  Check budget("block_product_budget", 0.0);
  Check shift("shift_invariance", 1e-8);

  std::mt19937_64 rng(sub_seed(seed, 1));
  std::uniform_real_distribution<double> logu(-6.0, 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double gamma = std::pow(10.0, logu(rng) + 3.0);
    const double mu = gamma * std::pow(10.0, logu(rng));
    const double gk = std::max(mu, gamma * std::pow(10.0, logu(rng)));
    const double a = alpha_solve(gk, mu, gamma);
    auto h = [&](double t) { return 4.0 * t * t * gamma - ((1.0 - t) * gk + t * mu); };
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (h(mid) > 0.0 ? hi : lo) = mid;
    }
    alpha.add(std::abs(a - 0.5 * (lo + hi)) / std::max(a, 1e-300));
  }

  for (AgdVariant variant : {AgdVariant::Retraction, AgdVariant::Exp}) {
    PlantedGapSpec spec;
    spec.n = 120;
    spec.p = 4;
    spec.delta = planted_gap_delta_for_ratio(1e-2, spec.lambda_n);
    spec.seed = sub_seed(seed, 2);
    const PlantedGapProblem prob = make_planted_gap(spec);
    const SpectralParams prm = derive_params(prob.spectrum, spec.p);
    const Reference ref = make_reference(prob.spectrum, spec.p);
    const double radius = 0.125 * std::sqrt(kCQ) * std::pow(prm.delta / prm.gamma, 0.75);
    const SubspacePoint x0 = perturb_within(ref.v_alpha, radius, sub_seed(seed, 3));

    SolverConfig cfg;
    cfg.max_iters = 150;
    cfg.grad_tol = std::numeric_limits<double>::infinity();
    cfg.agd.variant = variant;
    const SolverTrace tr = run(SolverKind::Agd, prob.op, x0, prm, cfg, &ref);
    floor.add(tr.failure ? 1.0 : 0.0);
    for (const auto& it : tr.agd) floor.add(0.5 * prm.mu - it.gammaNext);
    for (std::size_t k = 1; k < tr.rows.size(); ++k) mono.add(tr.rows[k].fval - tr.rows[k - 1].fval);
    const double rate = 1.0 - 0.4 * std::sqrt(prm.mu / prm.gamma);
    const double d0 = *tr.rows.front().dist;
    const double e0 = *tr.rows.front().subopt + 0.5 * tr.gamma0 * d0 * d0;
    for (const auto& row : tr.rows) {
      envelope.add(*row.subopt - std::pow(rate, static_cast<double>(row.iter)) * e0);
      budget.add(std::abs(static_cast<double>(row.block_matvecs) - (2.0 * row.iter + 2.0)));
    }

    if (variant == AgdVariant::Retraction) {
      SolverConfig sc;
      sc.max_iters = 30;
      sc.grad_tol = std::numeric_limits<double>::infinity();
      sc.keep_iterates = true;
      const SymmetricOperator shifted = prob.op.shifted(10.0);
      SpectralParams sprm = prm;
      sprm.lambda1 += 10.0;
      sprm.lambdaP += 10.0;
      sprm.lambdaP1 += 10.0;
      sprm.lambdaN += 10.0;
      for (SolverKind kind : {SolverKind::Agd, SolverKind::SteepestDescent, SolverKind::Rcg}) {
        const SolverTrace t1 = run(kind, prob.op, x0, prm, sc);
        const SolverTrace t2 = run(kind, shifted, x0, sprm, sc);
        const std::size_t m = std::min(t1.iterates.size(), t2.iterates.size());
        if (m == 0 || t1.failure || t2.failure) shift.add(1.0);
        for (std::size_t k = 0; k < m; ++k) shift.add(distance(t1.iterates[k], t2.iterates[k]));
      }
    }
  }

  {
    const SymmetricOperator a = build_fd3d({6, 5, 4});
    const std::vector<double> ev = analytic_fd3d_eigenvalues({6, 5, 4});
    const SpectralParams prm = derive_params(ev, 3);
    const SubspacePoint x0 = random_point(a.size(), 3, sub_seed(seed, 4));
    SolverConfig cfg;
    cfg.max_iters = 20;
    cfg.grad_tol = std::numeric_limits<double>::infinity();
    cfg.cheb_degree = 5;
    const struct {
      SolverKind kind;
      double per_iter;
      double setup;
    } budgets[] = {{SolverKind::SteepestDescent, 1, 1},
                   {SolverKind::SubspaceIteration, 1, 1},
                   {SolverKind::Rcg, 1, 1},
                   {SolverKind::Chebyshev, 5, 1},
                   {SolverKind::Agd, 2, 2}};
    for (const auto& b : budgets) {
      const SolverTrace tr = run(b.kind, a, x0, prm, cfg);
      if (tr.failure) budget.add(1.0);
      for (const auto& row : tr.rows) {
        budget.add(std::abs(static_cast<double>(row.block_matvecs) -
                            (b.per_iter * static_cast<double>(row.iter) + b.setup)));
      }
    }
  }

  return {alpha.result(), floor.result(), mono.result(), envelope.result(), budget.result(),
          shift.result()};
}

std::vector<PropertyResult> verify_suite(const std::string& selector, std::uint64_t seed) {
  if (selector == "geometry") return verify_geometry(seed);
  if (selector == "convexity") return verify_convexity(seed);
  if (selector == "solvers") return verify_solvers(seed);
  if (!selector.empty() && selector != "all") {
    throw ConfigurationError("unknown verify suite '" + selector +
                             "' (expected geometry, convexity, solvers)");
  }
  std::vector<PropertyResult> out = verify_geometry(seed);
  for (auto& r : verify_convexity(seed)) out.push_back(std::move(r));
  for (auto& r : verify_solvers(seed)) out.push_back(std::move(r));
  return out;
}

}  // namespace grasseig
