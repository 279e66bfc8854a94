#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grasseig/grassmann.hpp"
#include "grasseig/line_search.hpp"
#include "grasseig/matops.hpp"
#include "grasseig/rayleigh.hpp"

namespace grasseig {

// ---------------------------------------------------------------------------
// Accelerated gradient descent with geodesic search and momentum

enum class AgdVariant {
  Exp,         // X_{k+1} = Exp_Y(-grad f(Y) / gamma)
  Retraction,  // X_{k+1} = qf(Y - eta* grad f(Y)), exact line search, gamma~ in the alpha equation
};

struct AgdOptions {
  AgdVariant variant = AgdVariant::Retraction;
  /// Explicit gamma_0; must lie in [gamma0_lower_bound, gamma].
  std::optional<double> gamma0;
};

/// (sqrt(b^2 + (1+b) mu/gamma) - b) / (sqrt(b^2 + (1+b) mu/gamma) + b) * mu.
double gamma0_lower_bound(const SpectralParams& params);
/// Lower bound with mu over-approximated by gamma.
double gamma0_default(const SpectralParams& params);
/// (1/5) sqrt(mu / gamma).
double shrink_beta(const SpectralParams& params);

/// Positive root of 4 a^2 = ((1 - a) gamma_k + a mu) / gamma_eff.
double alpha_solve(double gamma_k, double mu, double gamma_eff);

struct AgdState {
  SubspacePoint x;
  SubspacePoint v;
  std::optional<Matrix> av;  // A V when known without a new product
  double gammaK = 0.0;
  double shrinkBeta = 0.0;
  std::int64_t k = 0;
  SpectralParams params;
  AgdVariant variant = AgdVariant::Retraction;
};

/// X_0 = V_0 = x0.  Throws DegenerateGapError when delta = 0.
AgdState agd_init(const SubspacePoint& x0, const SpectralParams& params,
                  const AgdOptions& options = {});

struct GeodesicSearch {
  double beta = 0.0;
  GeodesicCoeffs coeffs;
  GeodesicPoint y;
  TangentVector log_v;  // Log_V(X) the search direction, at V
  double fx = 0.0;      // f(X)
  double fy = 0.0;      // f(Y)
  double grad_norm_x = 0.0;
  bool hit_max_evals = false;
};

/// Minimizes f along Exp_V(t Log_V(X)) over t in [0, 1].  Consumes one block
/// product, plus one more when A V is not supplied.  Throws GeometryError if
/// V and X are not joined by a unique minimizing geodesic.
GeodesicSearch geodesic_search(const SymmetricOperator& a, const SubspacePoint& v,
                               const SubspacePoint& x, const LineSearchConfig& cfg = {},
                               const Matrix* av = nullptr);

struct AgdIterationInfo {
  std::int64_t k = 0;
  double beta = 0.0;          // geodesic search parameter
  double alpha = 0.0;
  double gammaK = 0.0;
  double gammaNext = 0.0;
  double fx = 0.0;            // f(X_k)
  double fy = 0.0;            // f(Y_k)
  double fxNext = 0.0;        // f(X_{k+1}); NaN for the exp variant
  double grad_norm_x = 0.0;
  double grad_norm_y = 0.0;
  double step = 0.0;          // gradient step length applied to grad f(Y_k)
  double stationarity = 0.0;  // <grad f(Y_k), Log_Y(V_k)>
  double momentum_norm = 0.0; // spectral norm of the tangent vector moving V
  bool search_hit_max_evals = false;
};

/// Remainder of one iteration after the geodesic search.  `search` must come
/// from geodesic_search on (state.v, state.x).
AgdIterationInfo agd_advance(AgdState& state, const SymmetricOperator& a,
                             const GeodesicSearch& search, const LineSearchConfig& cfg = {});

/// geodesic_search followed by agd_advance.
AgdIterationInfo agd_step(AgdState& state, const SymmetricOperator& a,
                          const LineSearchConfig& cfg = {});

// ---------------------------------------------------------------------------
// Baselines

struct BaselineState {
  SubspacePoint x;
  Matrix ax;
};

BaselineState baseline_init(const SymmetricOperator& a, const SubspacePoint& x0);

struct StepInfo {
  double f_before = 0.0;
  double f_after = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  bool restarted = false;
  double beta_pr = 0.0;
};

/// Exact minimizer of eta -> f(qf(Y - eta G)) over eta >= 0 together with the
/// new point and its image under A.  G, A G are supplied by the caller.
struct RetractionStep {
  double eta = 0.0;
  double f_after = 0.0;
  SubspacePoint x;
  Matrix ax;
  bool hit_max_evals = false;
};
RetractionStep retraction_line_search(const SubspacePoint& y, const Matrix& ay, const Matrix& g,
                                      const Matrix& ag, const LineSearchConfig& cfg = {});

/// Riemannian steepest descent with QR retraction and exact line search; one
/// block product (A G) per step, A X is carried along.
StepInfo steepest_descent_step(BaselineState& state, const SymmetricOperator& a,
                               const LineSearchConfig& cfg = {});
SubspacePoint steepest_descent_step(const SymmetricOperator& a, const SubspacePoint& x,
                                    const LineSearchConfig& cfg = {});

/// qf(A X); one block product.
SubspacePoint subspace_iteration_step(const SymmetricOperator& a, const SubspacePoint& x);

/// T_d(L) X with L = (A - c I) / e mapping [lo, hi] to [-1, 1].  Columns are
/// rescaled at every recurrence step; block * diag(scale) equals T_d(L) X.
struct ChebyshevFilter {
  Matrix block;
  Vector scale;
};
/// d - 1 block products when A X is supplied, d otherwise.
ChebyshevFilter chebyshev_filter(const SymmetricOperator& a, const SubspacePoint& x, int degree,
                                 double lo, double hi, const Matrix* ax = nullptr);
/// qf(chebyshev_filter(...).block).  Throws ConfigurationError if lo >= hi or
/// degree < 1.
SubspacePoint chebyshev_step(const SymmetricOperator& a, const SubspacePoint& x, int degree,
                             double lo, double hi, const Matrix* ax = nullptr);
/// Warning text when the damped interval reaches the wanted eigenvalues.
std::optional<std::string> chebyshev_interval_warning(double lo, double hi,
                                                      const SpectralParams& params);

/// Polak-Ribiere coefficient <g, g - g_prev> / ||g_prev||^2 (g_prev already
/// projected onto the current tangent space).
double polak_ribiere(const Matrix& g, const Matrix& g_prev, double g_prev_norm2);

struct CgDirection {
  TangentVector dir;
  double beta = 0.0;
  bool restarted = false;
};
/// -g + max(beta, 0) * d_prev, falling back to -g when beta <= 0 or the
/// result is not a descent direction.
CgDirection cg_direction(const TangentVector& g, const Matrix* g_prev, const Matrix* d_prev,
                         std::optional<double> beta_override = std::nullopt);

struct RcgState {
  SubspacePoint x;
  Matrix ax;
  std::optional<Matrix> prev_grad;  // at the previous iterate
  std::optional<Matrix> prev_dir;
};

RcgState rcg_init(const SymmetricOperator& a, const SubspacePoint& x0);
/// One conjugate-gradient step with exact geodesic line search; one block
/// product (A U) per step.
StepInfo rcg_step(RcgState& state, const SymmetricOperator& a, const LineSearchConfig& cfg = {});

// ---------------------------------------------------------------------------
// Driver

enum class SolverKind { Agd, SteepestDescent, SubspaceIteration, Chebyshev, Rcg };

std::string solver_name(SolverKind kind);
/// Accepts agd, sd, subspace, cheb, rcg.
SolverKind parse_solver(const std::string& name);

struct SolverConfig {
  std::optional<std::int64_t> max_iters;  // default 10 ceil(sqrt(gamma/delta) ln 1e10)
  std::optional<double> grad_tol;         // default 1e-8 gamma; +inf disables
  std::optional<double> dist_tol;         // needs a reference
  std::optional<double> subopt_tol;       // needs a reference
  std::int64_t record_every = 1;
  bool record_time = true;
  bool keep_iterates = false;
  AgdOptions agd;
  LineSearchConfig search;
  int cheb_degree = 10;
  std::optional<double> cheb_lo;  // default lambda_n
  std::optional<double> cheb_hi;  // default lambda_{p+1}
};

/// Dominant subspace of the operator used for suboptimality and distance.
struct Reference {
  SubspacePoint v_alpha;
  Vector lambda_alpha;
  double fstar = 0.0;
};
Reference make_reference(const DenseSpectrum& spectrum, Index p);

/// f(X) - f* evaluated without cancellation against f*.  One block product on
/// a private copy of the operator.
double suboptimality(const SymmetricOperator& a, const SubspacePoint& x, const Reference& ref);

struct TraceRow {
  std::int64_t iter = 0;
  std::uint64_t block_matvecs = 0;
  double fval = 0.0;
  std::optional<double> subopt;
  std::optional<double> dist;
  double grad_norm = 0.0;
  std::optional<double> wall_time_s;
};

struct SolverTrace {
  std::string solver;
  std::vector<TraceRow> rows;
  std::vector<std::string> warnings;
  std::optional<std::string> failure;
  std::string stop_reason;
  std::int64_t iterations = 0;
  std::uint64_t setup_products = 0;
  std::optional<SubspacePoint> final_point;
  std::vector<SubspacePoint> iterates;  // X_0, X_1, ... when keep_iterates
  std::vector<AgdIterationInfo> agd;    // AGD only
  double gamma0 = 0.0;                  // AGD only
};

std::int64_t default_max_iters(const SpectralParams& params);

/// Runs a solver from x0 until a stopping rule fires.  Row k describes X_k.
/// Solver errors are caught and reported in `failure` with the partial trace.
SolverTrace run(SolverKind kind, const SymmetricOperator& a, const SubspacePoint& x0,
                const SpectralParams& params, const SolverConfig& config = {},
                const Reference* reference = nullptr);

}  // namespace grasseig
