#pragma once

#include "l0pdas/core.hpp"
#include "l0pdas/lsq.hpp"
#include "l0pdas/problem_model.hpp"
#include "l0pdas/sensing_operator.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace l0pdas {

// ---------------------------------------------------------------------------
// Pointwise pieces of the l0-regularized objective
//   J(x) = 1/2 ||Psi x - y||^2 + lambda ||x||_0
// ---------------------------------------------------------------------------

/// sqrt(2 lambda), the magnitude below which J prefers a zero coordinate.
inline double threshold_level(double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  return std::sqrt(2.0 * lambda);
}

/// Hard thresholding: v if |v| > sqrt(2 lambda), otherwise 0. The tie
/// |v| = sqrt(2 lambda) resolves to 0, matching the strict inequality used to
/// build active sets.
inline double hard_threshold(double v, double lambda) {
  return std::abs(v) > threshold_level(lambda) ? v : 0.0;
}

/// {i : |v_i| > sqrt(2 lambda)}.
inline IndexSet threshold_set(const Vector& v, double lambda) {
  const double level = threshold_level(lambda);
  IndexSet out;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > level) out.push_back(i);
  }
  return out;
}

inline double objective(const SensingOperator& op, const Vector& y, const Vector& x,
                        double lambda) {
  if (x.size() != op.cols() || y.size() != op.rows()) {
    throw DimensionError("objective: dimension mismatch");
  }
  const IndexSet s = support_of(x);
  const Vector r = op.apply_restricted(s, restrict_to(x, s)) - y;
  return 0.5 * r.squaredNorm() + lambda * static_cast<double>(s.size());
}

enum class CwViolation { ActiveBelowThreshold, DualAboveThreshold, ActiveDualNonzero };

inline std::string to_string(CwViolation v) {
  switch (v) {
    case CwViolation::ActiveBelowThreshold: return "active_below_threshold";
    case CwViolation::DualAboveThreshold: return "dual_above_threshold";
    case CwViolation::ActiveDualNonzero: return "active_dual_nonzero";
  }
  return "unknown";
}

struct CoordinatewiseCheck {
  struct Item {
    Index index;
    CwViolation kind;
    double value;  ///< |x_i| or |d_i|
    double bound;
  };
  bool ok = true;
  std::vector<Item> violations;
  double level = 0.0;  ///< sqrt(2 lambda)
};

/// Coordinatewise-minimizer test with A = supp(x), d = Psi^t (y - Psi x):
///   min_{i in A} |x_i| >= sqrt(2 lambda) - tol,
///   ||d||_inf <= sqrt(2 lambda) + tol,
///   ||d_A||_inf <= tol.
inline CoordinatewiseCheck check_coordinatewise_min(const SensingOperator& op,
                                                    const Vector& y, const Vector& x,
                                                    double lambda, double tol) {
  if (x.size() != op.cols() || y.size() != op.rows()) {
    throw DimensionError("check_coordinatewise_min: dimension mismatch");
  }
  CoordinatewiseCheck out;
  out.level = threshold_level(lambda);
  const IndexSet active = support_of(x);
  const Vector d = op.adjoint_apply(y - op.apply_restricted(active, restrict_to(x, active)));
  for (Index i = 0; i < x.size(); ++i) {
    const bool on = x[i] != 0.0;
    if (on && std::abs(x[i]) < out.level - tol) {
      out.violations.push_back({i, CwViolation::ActiveBelowThreshold, std::abs(x[i]),
                                out.level - tol});
    }
    if (std::abs(d[i]) > out.level + tol) {
      out.violations.push_back({i, CwViolation::DualAboveThreshold, std::abs(d[i]),
                                out.level + tol});
    }
    if (on && std::abs(d[i]) > tol) {
      out.violations.push_back({i, CwViolation::ActiveDualNonzero, std::abs(d[i]), tol});
    }
  }
  out.ok = out.violations.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Continuation grid
// ---------------------------------------------------------------------------

struct ContinuationGrid {
  std::vector<double> lambdas;  ///< lambda_0 .. lambda_N, strictly decreasing
  double rho = 0.0;             ///< lambda_{k+1} / lambda_k
};

/// lambda_k = lambda_0 (lambda_min / lambda_0)^{k/N}, k = 0..N: N subintervals
/// of [lambda_min, lambda_0], equal in log scale.
inline ContinuationGrid continuation_grid(double lambda0, double lambda_min, int n) {
  if (!(lambda0 > lambda_min) || !(lambda_min > 0.0) || !std::isfinite(lambda0)) {
    throw ParameterError("continuation grid requires lambda0 > lambda_min > 0");
  }
  if (n < 1) throw ParameterError("continuation grid requires N >= 1");
  ContinuationGrid g;
  const double ratio = lambda_min / lambda0;
  g.rho = std::pow(ratio, 1.0 / n);
  g.lambdas.resize(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    g.lambdas[k] = lambda0 * std::pow(ratio, static_cast<double>(k) / n);
  }
  g.lambdas[n] = lambda_min;
  return g;
}

// ---------------------------------------------------------------------------
// Solver state and configuration
// ---------------------------------------------------------------------------

struct SolverConfig {
  std::optional<double> lambda0;  ///< default 1/2 ||Psi^t y||_inf^2
  double lambda_min_ratio = 1e-15;  ///< lambda_min = ratio * lambda0
  int grid_size = 100;              ///< N
  int max_inner = 5;                ///< J_max
  std::optional<double> discrepancy;  ///< epsilon-bar; defaults to instance eps
  LsqOptions lsq;
  int max_singular_skips = 3;

  /// Grid whose decay factor is exactly `rho`: N is the smallest count with
  /// rho^N <= floor_ratio, and lambda_min = rho^N lambda0.
  static SolverConfig with_decay(double rho, int max_inner = 5,
                                 double floor_ratio = 1e-15) {
    if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("decay factor must be in (0,1)");
    SolverConfig c;
    c.grid_size = static_cast<int>(std::ceil(std::log(floor_ratio) / std::log(rho)));
    c.grid_size = std::max(c.grid_size, 1);
    c.lambda_min_ratio = std::pow(rho, c.grid_size);
    c.max_inner = max_inner;
    return c;
  }

  void validate() const {
    if (grid_size < 1) throw ParameterError("N must be >= 1");
    if (max_inner < 1) throw ParameterError("J_max must be >= 1");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0)) {
      throw ParameterError("lambda_min must lie strictly between 0 and lambda0");
    }
    if (lambda0 && !(*lambda0 > 0.0)) throw ParameterError("lambda0 must be positive");
    if (discrepancy && !(*discrepancy >= 0.0)) {
      throw ParameterError("discrepancy level must be >= 0");
    }
    if (max_singular_skips < 1) throw ParameterError("max_singular_skips must be >= 1");
  }
};

/// Primal/dual pair at one lambda.
struct SolverState {
  double lambda = 0.0;
  Vector x;         ///< zero off `support`
  Vector d;         ///< Psi^t (y - Psi x)
  IndexSet active;  ///< {i : |x_i + d_i| > sqrt(2 lambda)}
  IndexSet support; ///< set on which x was last solved
  double residual_norm = 0.0;
  int inner_iters = 0;

  /// x = 0, d = Psi^t y.
  static SolverState zero(const SensingOperator& op, const Vector& y) {
    SolverState s;
    s.x = Vector::Zero(op.cols());
    s.d = op.adjoint_apply(y);
    s.residual_norm = y.norm();
    return s;
  }

  /// State after an exact solve on `set`, with `active` = `set`.
  static SolverState from_set(const SensingOperator& op, const Vector& y,
                              const IndexSet& set) {
    const RestrictedLsqSolution sol = solve_direct(op, set, y);
    SolverState s;
    s.x = embed(op.cols(), set, sol.x_active);
    s.d = sol.dual;
    s.active = set;
    s.support = set;
    s.residual_norm = sol.residual_norm();
    return s;
  }
};

enum class InnerStatus { FixedPoint, CapHit };

inline std::string to_string(InnerStatus s) {
  return s == InnerStatus::FixedPoint ? "fixed_point" : "cap_hit";
}

struct PdasInnerResult {
  SolverState state;
  InnerStatus status = InnerStatus::CapHit;
  /// Active set in effect at the start of each inner iteration j = 1..J:
  /// visited[0] is the warm-start set A_0, visited[j-1] is A_{j-1}.
  std::vector<IndexSet> visited;
};

/// Primal-dual active set iterations at a fixed lambda, warm-started from
/// `start` (x, d, active):
///
///   A_j = {i : |x_i + d_i| > sqrt(2 lambda)}
///   stop if A_j == A_{j-1}                        (FixedPoint)
///   x_{A_j} = argmin ||Psi_{A_j} z - y||, x = 0 elsewhere
///   d = Psi^t (y - Psi x)
///
/// for at most `max_inner` iterations (CapHit). The returned `active` set is
/// recomputed from the last (x, d) pair. A FixedPoint is only declared when x
/// was actually solved on the repeated set, so the returned x always matches
/// its support. If |A_j| would exceed n the loop stops as CapHit without
/// solving.
inline PdasInnerResult pdas_inner(const SensingOperator& op, const Vector& y, double lambda,
                                  const SolverState& start, int max_inner,
                                  const LsqOptions& lsq = {}, double eps = 0.0) {
  const double level = threshold_level(lambda);
  if (max_inner < 1) throw ParameterError("J_max must be >= 1");
  if (start.x.size() != op.cols() || start.d.size() != op.cols()) {
    throw DimensionError("pdas_inner: state has wrong dimension");
  }

  PdasInnerResult out;
  out.state = start;
  out.state.lambda = lambda;
  out.state.inner_iters = 0;
  SolverState& st = out.state;

  auto merit_set = [&](const SolverState& s) {
    IndexSet a;
    for (Index i = 0; i < s.x.size(); ++i) {
      if (std::abs(s.x[i] + s.d[i]) > level) a.push_back(i);
    }
    return a;
  };

  IndexSet previous = start.active;
  for (int j = 1; j <= max_inner; ++j) {
    out.visited.push_back(previous);
    IndexSet next = merit_set(st);
    st.inner_iters = j;
    if (next == previous && next == st.support) {
      out.status = InnerStatus::FixedPoint;
      break;
    }
    if (static_cast<Index>(next.size()) > op.rows()) {
      out.status = InnerStatus::CapHit;
      break;
    }
    const Vector warm = restrict_to(st.x, next);
    RestrictedLsqSolution sol;
    try {
      sol = solve_restricted(op, next, y, warm, eps, lsq);
    } catch (const SingularGramError& e) {
      throw e.with_lambda(lambda);
    }
    st.x = embed(op.cols(), next, sol.x_active);
    st.d = std::move(sol.dual);
    st.residual_norm = sol.residual.norm();
    st.support = next;
    previous = std::move(next);
  }
  st.active = merit_set(st);
  return out;
}

// ---------------------------------------------------------------------------
// Continuation driver
// ---------------------------------------------------------------------------

enum class SolveStatus { Converged, GridExhausted, SingularGramAbort, MaxIterations };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::GridExhausted: return "grid_exhausted";
    case SolveStatus::SingularGramAbort: return "singular_gram_abort";
    case SolveStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

/// One outer step: a lambda_k problem for PDASC, one iteration for the
/// greedy baselines (which carry no lambda).
struct PathRecord {
  int k = 0;
  std::optional<double> lambda;
  IndexSet active;   ///< A(lambda_k) for PDASC; current support for greedy methods
  IndexSet support;  ///< support of x after this step
  int inner_iters = 0;
  std::optional<InnerStatus> inner_status;
  double residual = 0.0;  ///< ||Psi x - y||
  bool skipped = false;   ///< lambda_k abandoned after a singular Gram matrix
};

struct SolveReport {
  std::string solver;
  Vector x;
  IndexSet support;
  std::optional<double> lambda_final;
  std::optional<double> rho;
  std::vector<PathRecord> path;
  SolveStatus status = SolveStatus::GridExhausted;
  double discrepancy = 0.0;

  double final_residual() const { return path.empty() ? 0.0 : path.back().residual; }
};

/// Primal-dual active set with continuation.
///
/// Starts from x = 0, d = Psi^t y at lambda_0 and walks the geometric grid
/// lambda_k = rho^k lambda_0, k = 1..N, warm-starting each PDAS solve from the
/// previous (x, d, A). Stops at the first k with ||Psi x(lambda_k) - y|| <=
/// epsilon-bar (discrepancy principle).
///
/// A singular restricted Gram matrix abandons lambda_k and carries the
/// previous state forward; `max_singular_skips` consecutive failures abort.
inline SolveReport pdasc(const SensingOperator& op, const Vector& y,
                         const SolverConfig& config) {
  config.validate();
  if (y.size() != op.rows()) throw DimensionError("pdasc: y must have length n");
  if (!config.discrepancy) {
    throw ParameterError("pdasc: discrepancy level must be supplied when eps is unknown");
  }
  const double eps_bar = *config.discrepancy;

  SolverState state = SolverState::zero(op, y);
  const double dmax = state.d.cwiseAbs().maxCoeff();
  const double lambda0 = config.lambda0.value_or(0.5 * dmax * dmax);

  SolveReport report;
  report.solver = "pdasc";
  report.discrepancy = eps_bar;
  report.x = state.x;

  if (!(lambda0 > 0.0)) {
    // y is orthogonal to every column: x = 0 is the only sensible output.
    PathRecord rec;
    rec.k = 1;
    rec.residual = state.residual_norm;
    report.path.push_back(rec);
    report.status = rec.residual <= eps_bar ? SolveStatus::Converged
                                            : SolveStatus::GridExhausted;
    return report;
  }

  const ContinuationGrid grid =
      continuation_grid(lambda0, config.lambda_min_ratio * lambda0, config.grid_size);
  report.rho = grid.rho;
  state.lambda = lambda0;

  int consecutive_failures = 0;
  for (int k = 1; k <= config.grid_size; ++k) {
    const double lambda = grid.lambdas[k];
    PathRecord rec;
    rec.k = k;
    rec.lambda = lambda;
    try {
      PdasInnerResult inner =
          pdas_inner(op, y, lambda, state, config.max_inner, config.lsq, eps_bar);
      state = std::move(inner.state);
      rec.inner_status = inner.status;
      consecutive_failures = 0;
    } catch (const SingularGramError&) {
      rec.skipped = true;
      if (++consecutive_failures >= config.max_singular_skips) {
        rec.active = state.active;
        rec.support = state.support;
        rec.residual = state.residual_norm;
        report.path.push_back(std::move(rec));
        report.status = SolveStatus::SingularGramAbort;
        break;
      }
    }
    rec.active = state.active;
    rec.support = state.support;
    rec.inner_iters = rec.skipped ? 0 : state.inner_iters;
    rec.residual = state.residual_norm;
    report.path.push_back(std::move(rec));
    report.lambda_final = lambda;
    if (!report.path.back().skipped && state.residual_norm <= eps_bar) {
      report.status = SolveStatus::Converged;
      break;
    }
  }

  report.x = state.x;
  report.support = support_of(state.x);
  return report;
}

/// Runs pdasc on an instance; epsilon-bar defaults to the instance's eps.
inline SolveReport pdasc(const ProblemInstance& inst, SolverConfig config) {
  if (!config.discrepancy) config.discrepancy = inst.eps;
  return pdasc(inst.op, inst.y, config);
}

}  // namespace l0pdas
