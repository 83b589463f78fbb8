#pragma once

// Greedy sparse-recovery baselines: OMP, HTP, IHT (plain and accelerated) and
// CoSaMP. All of them are told the target sparsity T and report through the
// same SolveReport type as pdasc; path records carry no lambda.

#include "l0pdas/core.hpp"
#include "l0pdas/lsq.hpp"
#include "l0pdas/sensing_operator.hpp"
#include "l0pdas/solver.hpp"

#include <cmath>
#include <optional>

namespace l0pdas {

struct GreedyConfig {
  Index sparsity = 1;       ///< target T
  int max_iters = 100;
  double tol = 0.0;         ///< stop once ||Psi x - y|| <= tol
  double step = 1.0;        ///< IHT / HTP step mu
  bool accelerated = false; ///< IHT: adaptive step with backtracking acceptance

  void validate(const SensingOperator& op) const {
    if (sparsity < 1) throw ParameterError("greedy methods need T >= 1");
    if (sparsity > op.rows()) throw ParameterError("greedy methods need T <= n");
    if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
    if (!(step > 0.0)) throw ParameterError("step must be positive");
    if (!(tol >= 0.0)) throw ParameterError("tol must be >= 0");
  }
};

namespace detail {
inline PathRecord greedy_record(int k, const IndexSet& support, double residual) {
  PathRecord r;
  r.k = k;
  r.active = support;
  r.support = support;
  r.inner_iters = 1;
  r.residual = residual;
  return r;
}

inline void finish(SolveReport& rep, Vector x, double tol) {
  rep.x = std::move(x);
  rep.support = support_of(rep.x);
  rep.discrepancy = tol;
}

inline double residual_of(const SensingOperator& op, const Vector& y, const Vector& x) {
  const IndexSet s = support_of(x);
  return (y - op.apply_restricted(s, restrict_to(x, s))).norm();
}

/// Best T-term approximation: keeps the T largest |v_i|.
inline Vector keep_largest(const Vector& v, Index count) {
  Vector out = Vector::Zero(v.size());
  for (Index i : top_k_abs(v, static_cast<std::size_t>(count))) out[i] = v[i];
  return out;
}
}  // namespace detail

/// Orthogonal matching pursuit: add argmax_{i not in S} |psi_i^t r| to S,
/// refit by least squares on S, repeat until |S| = T. The Cholesky factor of
/// the Gram matrix on S is updated by one row per step.
inline SolveReport omp(const SensingOperator& op, const Vector& y, const GreedyConfig& cfg) {
  cfg.validate(op);
  if (y.size() != op.rows()) throw DimensionError("omp: y must have length n");
  const Index n = op.rows();
  const Index t = cfg.sparsity;

  SolveReport rep;
  rep.solver = "omp";
  IndexSet order;  // selection order
  Matrix psi_s(n, t);
  Matrix chol = Matrix::Zero(t, t);  // lower-triangular factor of Psi_S^t Psi_S
  Vector rhs(t);                     // Psi_S^t y
  Vector x_s;
  Vector r = y;
  std::vector<char> chosen(static_cast<std::size_t>(op.cols()), 0);

  for (Index k = 0; k < t; ++k) {
    if (r.norm() <= cfg.tol) break;
    const Vector c = op.adjoint_apply(r);
    Index best = -1;
    double best_val = -1.0;
    for (Index i = 0; i < c.size(); ++i) {
      if (!chosen[i] && std::abs(c[i]) > best_val) {
        best_val = std::abs(c[i]);
        best = i;
      }
    }
    const Vector col = op.column(best);
    const Vector cross = psi_s.leftCols(k).transpose() * col;
    const Vector w = chol.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(cross);
    const double pivot = col.squaredNorm() - w.squaredNorm();
    if (!(pivot > kSingularPivot)) {
      IndexSet s = order;
      s.push_back(best);
      throw SingularGramError(make_index_set(std::move(s)), pivot);
    }
    chol.block(k, 0, 1, k) = w.transpose();
    chol(k, k) = std::sqrt(pivot);
    psi_s.col(k) = col;
    rhs[k] = col.dot(y);
    chosen[best] = 1;
    order.push_back(best);

    const auto l = chol.topLeftCorner(k + 1, k + 1).triangularView<Eigen::Lower>();
    x_s = l.transpose().solve(l.solve(rhs.head(k + 1)));
    r = y - psi_s.leftCols(k + 1) * x_s;
    rep.path.push_back(detail::greedy_record(static_cast<int>(k + 1), make_index_set(order),
                                             r.norm()));
  }

  Vector x = Vector::Zero(op.cols());
  for (std::size_t k = 0; k < order.size(); ++k) x[order[k]] = x_s[static_cast<Index>(k)];
  rep.status = SolveStatus::Converged;
  detail::finish(rep, std::move(x), cfg.tol);
  return rep;
}

/// Hard thresholding pursuit: A = T largest |x + mu d|, x = least-squares
/// fit on A, d = Psi^t (y - Psi x); stops at an active-set fixed point.
inline SolveReport htp(const SensingOperator& op, const Vector& y, const GreedyConfig& cfg,
                       const std::optional<Vector>& warm_start = std::nullopt) {
  cfg.validate(op);
  if (y.size() != op.rows()) throw DimensionError("htp: y must have length n");
  SolveReport rep;
  rep.solver = "htp";
  rep.status = SolveStatus::MaxIterations;

  Vector x = warm_start.value_or(Vector::Zero(op.cols()));
  if (x.size() != op.cols()) throw DimensionError("htp: warm start must have length p");
  IndexSet support = support_of(x);
  Vector d = op.adjoint_apply(y - op.apply_restricted(support, restrict_to(x, support)));

  for (int it = 1; it <= cfg.max_iters; ++it) {
    const IndexSet next = top_k_abs(x + cfg.step * d, static_cast<std::size_t>(cfg.sparsity));
    if (next == support) {
      rep.status = SolveStatus::Converged;
      break;
    }
    const RestrictedLsqSolution sol = solve_direct(op, next, y);
    x = embed(op.cols(), next, sol.x_active);
    d = sol.dual;
    support = next;
    rep.path.push_back(detail::greedy_record(it, support, sol.residual_norm()));
    if (sol.residual_norm() <= cfg.tol) {
      rep.status = SolveStatus::Converged;
      break;
    }
  }
  detail::finish(rep, std::move(x), cfg.tol);
  return rep;
}

/// Iterative hard thresholding x <- H_T(x + mu Psi^t (y - Psi x)).
///
/// Plain: fixed step `cfg.step`. Accelerated: the step is the exact line
/// search along the gradient restricted to the current support (or to the T
/// largest gradient entries when x = 0), halved until the thresholded update
/// does not increase the residual; no acceptable step means convergence.
inline SolveReport iht(const SensingOperator& op, const Vector& y, const GreedyConfig& cfg) {
  cfg.validate(op);
  if (y.size() != op.rows()) throw DimensionError("iht: y must have length n");
  SolveReport rep;
  rep.solver = cfg.accelerated ? "aiht" : "iht";
  rep.status = SolveStatus::MaxIterations;

  Vector x = Vector::Zero(op.cols());
  double res = y.norm();
  if (res <= cfg.tol) {
    rep.status = SolveStatus::Converged;
    detail::finish(rep, std::move(x), cfg.tol);
    return rep;
  }

  for (int it = 1; it <= cfg.max_iters; ++it) {
    const IndexSet s = support_of(x);
    const Vector g = op.adjoint_apply(y - op.apply_restricted(s, restrict_to(x, s)));
    Vector next;
    double next_res = 0.0;
    if (!cfg.accelerated) {
      next = detail::keep_largest(x + cfg.step * g, cfg.sparsity);
      next_res = detail::residual_of(op, y, next);
    } else {
      const IndexSet dir_set = s.empty() ? top_k_abs(g, static_cast<std::size_t>(cfg.sparsity)) : s;
      const Vector g_s = restrict_to(g, dir_set);
      const double denom = op.apply_restricted(dir_set, g_s).squaredNorm();
      double mu = denom > 0.0 ? g_s.squaredNorm() / denom : cfg.step;
      bool accepted = false;
      for (int bt = 0; bt < 30; ++bt, mu *= 0.5) {
        next = detail::keep_largest(x + mu * g, cfg.sparsity);
        next_res = detail::residual_of(op, y, next);
        if (next_res <= res) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        rep.status = SolveStatus::Converged;
        break;
      }
    }
    const double change = (next - x).norm();
    const double scale = std::max(next.norm(), 1e-300);
    x = std::move(next);
    res = next_res;
    rep.path.push_back(detail::greedy_record(it, support_of(x), res));
    if (res <= cfg.tol || change <= 1e-12 * scale) {
      rep.status = SolveStatus::Converged;
      break;
    }
  }
  detail::finish(rep, std::move(x), cfg.tol);
  return rep;
}

/// Compressive sampling matching pursuit: merge supp(x) with the 2T largest
/// entries of the proxy Psi^t r, least-squares fit on the merged set, prune to
/// the T largest coefficients.
inline SolveReport cosamp(const SensingOperator& op, const Vector& y, const GreedyConfig& cfg) {
  cfg.validate(op);
  if (y.size() != op.rows()) throw DimensionError("cosamp: y must have length n");
  SolveReport rep;
  rep.solver = "cosamp";
  rep.status = SolveStatus::MaxIterations;

  Vector x = Vector::Zero(op.cols());
  Vector r = y;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (r.norm() <= cfg.tol) {
      rep.status = SolveStatus::Converged;
      break;
    }
    const Vector proxy = op.adjoint_apply(r);
    IndexSet merged = set_union(top_k_abs(proxy, 2 * static_cast<std::size_t>(cfg.sparsity)),
                                support_of(x));
    if (static_cast<Index>(merged.size()) > op.rows()) {
      // Keep the strongest candidates so the fit stays overdetermined.
      Vector score = Vector::Zero(op.cols());
      for (Index i : merged) score[i] = std::abs(proxy[i]) + std::abs(x[i]);
      merged = top_k_abs(score, static_cast<std::size_t>(op.rows()));
    }
    const RestrictedLsqSolution sol = solve_direct(op, merged, y);
    Vector next = detail::keep_largest(embed(op.cols(), merged, sol.x_active), cfg.sparsity);
    const IndexSet s = support_of(next);
    const Vector r_next = y - op.apply_restricted(s, restrict_to(next, s));
    const double change = (next - x).norm();
    const double scale = std::max(next.norm(), 1e-300);
    x = std::move(next);
    r = r_next;
    rep.path.push_back(detail::greedy_record(it, s, r.norm()));
    if (r.norm() <= cfg.tol || change <= 1e-12 * scale) {
      rep.status = SolveStatus::Converged;
      break;
    }
  }
  detail::finish(rep, std::move(x), cfg.tol);
  return rep;
}

}  // namespace l0pdas
