#pragma once

#include "l0pdas/core.hpp"
#include "l0pdas/sensing_operator.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace l0pdas {

enum class LsqMethod { Direct, Iterative };

/// Solution of min ||Psi_A z - y|| together with the residual and the full
/// dual vector d = Psi^t (y - Psi_A z).
struct RestrictedLsqSolution {
  IndexSet active;
  Vector x_active;  ///< values on `active`, same order
  Vector residual;  ///< y - Psi_A x_active
  Vector dual;      ///< Psi^t residual, length p
  int iterations = 0;
  LsqMethod method = LsqMethod::Direct;
  /// Per-iteration norms for the iterative path: ||Psi_A^t r_k|| and ||r_k||,
  /// starting with the warm start (k = 0).
  std::vector<double> normal_residual_history;
  std::vector<double> residual_history;

  double residual_norm() const { return residual.norm(); }
};

struct CgOptions {
  int max_iters = 2;        ///< iteration cap
  double tol_factor = 1e-5; ///< stop once ||Psi_A^t r|| <= tol_factor * eps
};

struct LsqOptions {
  LsqMethod method = LsqMethod::Direct;
  CgOptions cg;
};

/// Smallest admissible Cholesky pivot of the restricted Gram matrix.
inline constexpr double kSingularPivot = 1e-12;

/// Exact solve of Psi_A^t Psi_A x_A = Psi_A^t y by Cholesky factorization of
/// the explicitly formed |A| x |A| Gram matrix, followed by one step of
/// iterative refinement. Throws SingularGramError when a pivot falls below
/// kSingularPivot.
inline RestrictedLsqSolution solve_direct(const SensingOperator& op,
                                          const IndexSet& active, const Vector& y) {
  if (y.size() != op.rows()) throw DimensionError("solve_direct: y must have length n");
  RestrictedLsqSolution sol;
  sol.active = active;
  sol.method = LsqMethod::Direct;
  if (active.empty()) {
    sol.x_active = Vector(0);
    sol.residual = y;
    sol.dual = op.adjoint_apply(y);
    return sol;
  }
  if (static_cast<Index>(active.size()) > op.rows()) {
    throw SingularGramError(active, 0.0);
  }

  const Matrix psi_a = op.columns(active);
  const Index k = psi_a.cols();
  Matrix gram = Matrix::Zero(k, k);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(psi_a.transpose());
  const Eigen::LLT<Matrix, Eigen::Lower> llt(gram);
  double min_pivot = 0.0;
  if (llt.info() == Eigen::Success) {
    const Matrix& l = llt.matrixLLT();
    min_pivot = l.diagonal().array().square().minCoeff();
  }
  if (llt.info() != Eigen::Success || !(min_pivot > kSingularPivot)) {
    throw SingularGramError(active, min_pivot);
  }

  Vector x = llt.solve(psi_a.transpose() * y);
  Vector r = y - psi_a * x;
  x += llt.solve(psi_a.transpose() * r);
  r = y - psi_a * x;

  sol.x_active = std::move(x);
  sol.dual = op.adjoint_apply(r);
  sol.residual = std::move(r);
  return sol;
}

/// Conjugate gradients on the restricted normal equations (CGLS form),
/// warm-started from `warm_start`. Stops once ||Psi_A^t r|| <= tol_factor*eps
/// or after `max_iters` iterations; hitting the cap is not an error.
inline RestrictedLsqSolution solve_cg(const SensingOperator& op, const IndexSet& active,
                                      const Vector& y, const Vector& warm_start,
                                      double eps, const CgOptions& options = {}) {
  if (y.size() != op.rows()) throw DimensionError("solve_cg: y must have length n");
  if (active.empty()) throw DimensionError("solve_cg: active set must be nonempty");
  if (warm_start.size() != static_cast<Index>(active.size())) {
    throw DimensionError("solve_cg: warm start must have length |A|");
  }
  if (options.max_iters < 0) throw ParameterError("solve_cg: max_iters must be >= 0");

  // Dense operators: gather Psi_A once; structured ones go through the
  // fast transform on every product.
  const Matrix* dense = op.dense_matrix();
  Matrix psi_a;
  if (dense) psi_a = op.columns(active);
  auto forward = [&](const Vector& z) -> Vector {
    return dense ? Vector(psi_a * z) : op.apply_restricted(active, z);
  };
  auto backward = [&](const Vector& r) -> Vector {
    return dense ? Vector(psi_a.transpose() * r) : op.adjoint_restricted(active, r);
  };

  Vector z = warm_start;
  Vector r = y - forward(z);
  Vector s = backward(r);
  Vector dir = s;
  double gamma = s.squaredNorm();
  // Past the rounding floor the recurrences lose conjugacy and the iterate
  // blows up, so never ask for less than that.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::sqrt(gamma), backward(y).norm());
  const double tol = std::max(options.tol_factor * eps, floor);

  RestrictedLsqSolution sol;
  sol.active = active;
  sol.method = LsqMethod::Iterative;
  sol.normal_residual_history.push_back(std::sqrt(gamma));
  sol.residual_history.push_back(r.norm());

  int it = 0;
  while (it < options.max_iters && std::sqrt(gamma) > tol) {
    const Vector q = forward(dir);
    const double qq = q.squaredNorm();
    if (!(qq > 0.0)) break;
    const double alpha = gamma / qq;
    z += alpha * dir;
    r -= alpha * q;
    s = backward(r);
    const double gamma_next = s.squaredNorm();
    dir = s + (gamma_next / gamma) * dir;
    gamma = gamma_next;
    ++it;
    sol.normal_residual_history.push_back(std::sqrt(gamma));
    sol.residual_history.push_back(r.norm());
  }

  sol.iterations = it;
  sol.x_active = std::move(z);
  // Recompute rather than trust the recurrence, which drifts.
  sol.residual = y - forward(sol.x_active);
  sol.dual = op.adjoint_apply(sol.residual);
  return sol;
}

/// Dispatches on `options.method`. `warm_start` (values on `active`) is used
/// only by the iterative path.
inline RestrictedLsqSolution solve_restricted(const SensingOperator& op,
                                              const IndexSet& active, const Vector& y,
                                              const Vector& warm_start, double eps,
                                              const LsqOptions& options) {
  if (options.method == LsqMethod::Direct || active.empty()) {
    return solve_direct(op, active, y);
  }
  return solve_cg(op, active, y, warm_start, eps, options.cg);
}

}  // namespace l0pdas
