#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "grasseig/errors.hpp"
#include "grasseig/solvers.hpp"

namespace grasseig {

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Agd: return "agd";
    case SolverKind::SteepestDescent: return "sd";
    case SolverKind::SubspaceIteration: return "subspace";
    case SolverKind::Chebyshev: return "cheb";
    case SolverKind::Rcg: return "rcg";
  }
  return "unknown";
}

SolverKind parse_solver(const std::string& name) {
  if (name == "agd") return SolverKind::Agd;
  if (name == "sd") return SolverKind::SteepestDescent;
  if (name == "subspace") return SolverKind::SubspaceIteration;
  if (name == "cheb") return SolverKind::Chebyshev;
  if (name == "rcg") return SolverKind::Rcg;
  throw ConfigurationError("unknown solver '" + name + "' (expected agd, sd, subspace, cheb, rcg)");
}

Reference make_reference(const DenseSpectrum& spectrum, Index p) {
  if (p < 1 || p >= spectrum.eigenvalues.size()) throw DomainError("reference needs 1 <= p < n");
  Vector lam = spectrum.eigenvalues.head(p);
  return {SubspacePoint::trusted(spectrum.eigenvectors.leftCols(p)), lam, -lam.sum()};
}

double suboptimality(const SymmetricOperator& a, const SubspacePoint& x, const Reference& ref) {
  // X = V C + Xp with Xp orthogonal to V.  Then
  //   f(X) - f* = Tr(Lambda (I - C C^T)) - Tr(Xp^T A Xp),
  // and I - C C^T = P (Xp^T Xp) P^T with P the polar factor of C.
  const SymmetricOperator op = a.fresh();
  const Matrix& v = ref.v_alpha.rep();
  const Matrix c = v.transpose() * x.rep();
  const Matrix xp = x.rep() - v * c;
  const Matrix pol = polar_factor(c);
  const Matrix k = pol * (xp.transpose() * xp) * pol.transpose();
  const double t1 = (ref.lambda_alpha.array() * k.diagonal().array()).sum();
  const double t2 = (xp.array() * op.apply_block(xp).array()).sum();
  return t1 - t2;
}

std::int64_t default_max_iters(const SpectralParams& params) {
  if (params.degenerate || !(params.delta > 0.0) || !(params.gamma > 0.0)) return 1000;
  const double it = std::ceil(std::sqrt(params.gamma / params.delta) * std::log(1e10));
  return 10 * static_cast<std::int64_t>(it);
}

namespace {

class Stopwatch {
 public:
  void start() { t0_ = clock::now(); }
  void stop() { acc_ += std::chrono::duration<double>(clock::now() - t0_).count(); }
  double seconds() const { return acc_; }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point t0_{};
  double acc_ = 0.0;
};

}  // namespace

SolverTrace run(SolverKind kind, const SymmetricOperator& a, const SubspacePoint& x0,
                const SpectralParams& params, const SolverConfig& config,
                const Reference* reference) {
  if (x0.n() != a.size()) throw ShapeError("run: starting point does not match the operator");
  if (config.record_every < 1) throw ConfigurationError("record_every must be >= 1");
  if ((config.dist_tol || config.subopt_tol) && !reference) {
    throw ConfigurationError("distance or suboptimality stopping requires a reference subspace");
  }
  const std::int64_t max_iters = config.max_iters.value_or(default_max_iters(params));
  if (max_iters < 0) throw ConfigurationError("max_iters must be >= 0");
  const double grad_tol = config.grad_tol.value_or(1e-8 * params.gamma);
  const bool grad_stop = std::isfinite(grad_tol);

  SolverTrace trace;
  trace.solver = solver_name(kind);
  SymmetricOperator op = a.fresh();
  Stopwatch clock;

  auto observe = [&](std::int64_t k, double f, double gnorm, const SubspacePoint& x) {
    clock.stop();
    TraceRow row;
    row.iter = k;
    row.block_matvecs = op.block_products();
    row.fval = f;
    row.grad_norm = gnorm;
    if (config.record_time) row.wall_time_s = clock.seconds();

    std::string reason;
    if (grad_stop && gnorm <= grad_tol) reason = "grad_tol";
    const bool need_ref =
        reference && (k % config.record_every == 0 || config.dist_tol || config.subopt_tol);
    if (need_ref) {
      row.dist = distance(x, reference->v_alpha);
      row.subopt = suboptimality(op, x, *reference);
      if (reason.empty() && config.subopt_tol && *row.subopt <= *config.subopt_tol) reason = "subopt_tol";
      if (reason.empty() && config.dist_tol && *row.dist <= *config.dist_tol) reason = "dist_tol";
    }
    if (reason.empty() && k >= max_iters) reason = "max_iters";
    if (!reason.empty() && reference && !row.subopt) {
      row.dist = distance(x, reference->v_alpha);
      row.subopt = suboptimality(op, x, *reference);
    }
    if (k % config.record_every == 0 || !reason.empty()) trace.rows.push_back(row);
    if (config.keep_iterates) trace.iterates.push_back(x);
    trace.iterations = k;
    trace.final_point = x;
    trace.stop_reason = reason;
    clock.start();
    return !reason.empty();
  };

  std::optional<std::string> search_warning;
  auto note_search = [&](bool hit) {
    if (hit && !search_warning) {
      search_warning = "line search reached max_evals; best point so far was used";
      trace.warnings.push_back(*search_warning);
    }
  };

  std::optional<AgdState> agd;
  if (kind == SolverKind::Agd) {
    agd = agd_init(x0, params, config.agd);
    trace.gamma0 = agd->gammaK;
  }
  double cheb_lo = 0.0;
  double cheb_hi = 0.0;
  if (kind == SolverKind::Chebyshev) {
    cheb_lo = config.cheb_lo.value_or(params.lambdaN);
    cheb_hi = config.cheb_hi.value_or(params.lambdaP1);
    if (!(cheb_lo < cheb_hi)) throw ConfigurationError("Chebyshev interval needs lo < hi");
    if (config.cheb_degree < 1) throw ConfigurationError("Chebyshev degree must be >= 1");
    if (auto w = chebyshev_interval_warning(cheb_lo, cheb_hi, params)) trace.warnings.push_back(*w);
  }

  clock.start();
  try {
    switch (kind) {
      case SolverKind::Agd: {
        for (std::int64_t k = 0;; ++k) {
          const GeodesicSearch s = geodesic_search(op, agd->v, agd->x, config.search,
                                                   agd->av ? &*agd->av : nullptr);
          note_search(s.hit_max_evals);
          if (k == 0) trace.setup_products = op.block_products();
          if (observe(k, s.fx, s.grad_norm_x, agd->x)) break;
          trace.agd.push_back(agd_advance(*agd, op, s, config.search));
          note_search(trace.agd.back().search_hit_max_evals);
        }
        break;
      }
      case SolverKind::SteepestDescent: {
        BaselineState st = baseline_init(op, x0);
        trace.setup_products = 1;
        for (std::int64_t k = 0;; ++k) {
          const Gradient g = grad_from_product(st.x, st.ax);
          if (observe(k, g.f, g.grad.norm(), st.x)) break;
          steepest_descent_step(st, op, config.search);
        }
        break;
      }
      case SolverKind::SubspaceIteration: {
        SubspacePoint x = x0;
        trace.setup_products = 1;
        for (std::int64_t k = 0;; ++k) {
          Matrix ax = op.apply_block(x.rep());
          const Gradient g = grad_from_product(x, ax);
          if (observe(k, g.f, g.grad.norm(), x)) break;
          x = SubspacePoint::trusted(qf(g.ax));
        }
        break;
      }
      case SolverKind::Chebyshev: {
        SubspacePoint x = x0;
        Matrix ax = op.apply_block(x.rep());
        trace.setup_products = 1;
        for (std::int64_t k = 0;; ++k) {
          const Gradient g = grad_from_product(x, ax);
          if (observe(k, g.f, g.grad.norm(), x)) break;
          x = chebyshev_step(op, x, config.cheb_degree, cheb_lo, cheb_hi, &ax);
          ax = op.apply_block(x.rep());
        }
        break;
      }
      case SolverKind::Rcg: {
        RcgState st = rcg_init(op, x0);
        trace.setup_products = 1;
        for (std::int64_t k = 0;; ++k) {
          const Gradient g = grad_from_product(st.x, st.ax);
          if (observe(k, g.f, g.grad.norm(), st.x)) break;
          rcg_step(st, op, config.search);
        }
        break;
      }
    }
  } catch (const Error& e) {
    trace.failure = e.what();
    trace.stop_reason = "error";
  }
  clock.stop();
  return trace;
}

}  // namespace grasseig
