#pragma once

#include "l0pdas/core.hpp"
#include "l0pdas/lsq.hpp"
#include "l0pdas/problem_model.hpp"
#include "l0pdas/sensing_operator.hpp"
#include "l0pdas/solver.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace l0pdas {

inline constexpr Index kCoherenceColumnCap = 5000;
inline constexpr double kEnumerationCap = 1e6;

// ---------------------------------------------------------------------------
// Combinatorics
// ---------------------------------------------------------------------------

/// C(p, k) as a double (exact for the sizes we enumerate, +inf on overflow).
inline double binomial(Index p, Index k) {
  if (k < 0 || k > p) return 0.0;
  k = std::min(k, p - k);
  double c = 1.0;
  for (Index i = 1; i <= k; ++i) {
    c = c * static_cast<double>(p - k + i) / static_cast<double>(i);
  }
  return std::round(c);
}

/// Calls fn(subset) for every size-k subset of {0..p-1} in lexicographic
/// order.
inline void for_each_subset(Index p, Index k, const std::function<void(const IndexSet&)>& fn) {
  if (k < 0 || k > p) return;
  IndexSet idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    Index i = k - 1;
    while (i >= 0 && idx[i] == p - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (Index j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// ---------------------------------------------------------------------------
// Mutual coherence and RIP constants
// ---------------------------------------------------------------------------

/// nu = max_{i != j} |psi_i^t psi_j| by an exact scan of all column pairs.
inline double mutual_coherence(const SensingOperator& op,
                               Index column_cap = kCoherenceColumnCap) {
  const Index p = op.cols();
  if (p < 2) throw DimensionError("mutual coherence needs at least two columns");
  if (p > column_cap) {
    throw CapacityError("mutual coherence: p=" + std::to_string(p) +
                        " exceeds the exact-scan cap " + std::to_string(column_cap));
  }
  Matrix materialized;
  const Matrix* m = op.dense_matrix();
  if (!m) {
    materialized = op.to_dense();
    m = &materialized;
  }
  // Blocked Gram so memory stays O(n p + p * block).
  constexpr Index block = 512;
  double nu = 0.0;
  for (Index start = 0; start < p; start += block) {
    const Index width = std::min(block, p - start);
    const Matrix g = m->transpose() * m->middleCols(start, width);
    for (Index c = 0; c < width; ++c) {
      for (Index r = 0; r < p; ++r) {
        if (r != start + c) nu = std::max(nu, std::abs(g(r, c)));
      }
    }
  }
  return nu;
}

/// Extreme eigenvalues of Psi_A^t Psi_A.
inline std::pair<double, double> gram_eigen_range(const Matrix& psi_a) {
  if (psi_a.cols() == 0) return {1.0, 1.0};
  const Matrix g = psi_a.transpose() * psi_a;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

/// delta_s = max over all s-subsets A of max(sigma_max(Psi_A)^2 - 1,
/// 1 - sigma_min(Psi_A)^2), by exhaustive enumeration.
inline double rip_constant_bruteforce(const SensingOperator& op, Index s,
                                      double subset_cap = kEnumerationCap) {
  if (s < 0 || s > op.cols()) throw ParameterError("RIP level must be in [0, p]");
  if (s == 0) return 0.0;
  if (binomial(op.cols(), s) > subset_cap) {
    throw CapacityError("RIP brute force: C(p,s) exceeds the enumeration cap");
  }
  const Matrix full = op.to_dense();
  double delta = 0.0;
  for_each_subset(op.cols(), s, [&](const IndexSet& a) {
    Matrix psi_a(full.rows(), s);
    for (Index k = 0; k < s; ++k) psi_a.col(k) = full.col(a[k]);
    const auto [lo, hi] = gram_eigen_range(psi_a);
    delta = std::max({delta, hi - 1.0, 1.0 - lo});
  });
  return delta;
}

/// delta_0 .. delta_{s_max}; delta_0 = 0.
struct RipTable {
  std::vector<double> delta;

  Index max_level() const { return static_cast<Index>(delta.size()) - 1; }
  double at(Index s) const {
    if (s < 0 || s > max_level()) throw CapacityError("RIP table does not cover level");
    return delta[static_cast<std::size_t>(s)];
  }
};

inline RipTable rip_table(const SensingOperator& op, Index s_max,
                          double subset_cap = kEnumerationCap) {
  RipTable t;
  t.delta.push_back(0.0);
  for (Index s = 1; s <= s_max; ++s) {
    t.delta.push_back(rip_constant_bruteforce(op, s, subset_cap));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Global-minimizer lambda window
// ---------------------------------------------------------------------------

/// Upper end xi of the lambda window (eps^2/2, xi) on which the oracle
/// solution is the unique global minimizer, under mutual coherence. Returns
/// nullopt when the hypotheses nu < (1-2beta)/(3T-1) and
/// beta <= (1 - 2(T-1)nu)/(T+3) (with 0 <= beta < 1/2) do not hold.
inline std::optional<double> xi_interval_mip(double nu, Index sparsity, double beta,
                                             double min_abs) {
  const double t = static_cast<double>(sparsity);
  if (sparsity < 1 || !(beta >= 0.0 && beta < 0.5)) return std::nullopt;
  if (!(nu < (1.0 - 2.0 * beta) / (3.0 * t - 1.0))) return std::nullopt;
  if (!(beta <= (1.0 - 2.0 * (t - 1.0) * nu) / (t + 3.0))) return std::nullopt;
  return (1.0 - 2.0 * (t - 1.0) * nu - 2.0 * beta - beta * beta) / (2.0 * t) * min_abs *
         min_abs;
}

/// Same window under the RIP with delta = delta_{2T}; hypotheses
/// delta <= (1-2beta)/(2 sqrt(T)+1) and beta <= (1 - 2delta - delta^2)/4.
inline std::optional<double> xi_interval_rip(double delta, Index sparsity, double beta,
                                             double min_abs) {
  const double t = static_cast<double>(sparsity);
  if (sparsity < 1 || !(beta >= 0.0 && beta < 0.5) || !(delta >= 0.0 && delta < 1.0)) {
    return std::nullopt;
  }
  if (!(delta <= (1.0 - 2.0 * beta) / (2.0 * std::sqrt(t) + 1.0))) return std::nullopt;
  if (!(beta <= (1.0 - 2.0 * delta - delta * delta) / 4.0)) return std::nullopt;
  return (0.5 * (1.0 - delta) - delta * delta / (1.0 - delta) - beta / std::sqrt(1.0 - delta) -
          0.5 * beta * beta) *
         min_abs * min_abs;
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

struct TheoryCertificate {
  double nu = 0.0;
  Index sparsity = 0;
  double eps = 0.0;
  double min_abs = 0.0;
  double beta = 0.0;            ///< eps / min |x*_i|
  bool noise_ok = false;        ///< 0 <= beta < 1/2
  bool mip_cwm_ok = false;      ///< nu < (1-2beta)/(3T-1)
  bool mip_conv_ok = false;     ///< nu < (1-2beta)/(2T-1)
  double rho_lower = 1.0;       ///< ((2T-1)nu + 2beta)^2; admissible rho in (rho_lower, 1)
  std::optional<double> rho;
  bool rho_admissible = false;
  std::optional<double> s1;
  std::optional<double> s2;
  std::optional<double> xi;
  std::optional<std::pair<double, double>> lambda_interval;  ///< (eps^2/2, xi)

  /// A decay factor inside the admissible interval (its midpoint).
  std::optional<double> suggested_rho() const {
    if (!noise_ok || !mip_conv_ok) return std::nullopt;
    return 0.5 * (rho_lower + 1.0);
  }
};

/// Evaluates every mutual-coherence hypothesis for given nu, T, eps and
/// min |x*_i|, plus the continuation factors s1 > s2 solving
///   s2 = 1 + (T nu - nu + beta) s1,  s2 / s1 = sqrt(rho)
/// when rho is admissible.
inline TheoryCertificate certify_values(double nu, Index sparsity, double eps,
                                        double min_abs, std::optional<double> rho) {
  if (sparsity < 1) throw ParameterError("certify: sparsity must be >= 1");
  if (!(eps >= 0.0)) throw ParameterError("certify: eps must be >= 0");
  if (!(min_abs > 0.0)) throw ParameterError("certify: min |x*| must be positive");
  TheoryCertificate c;
  c.nu = nu;
  c.sparsity = sparsity;
  c.eps = eps;
  c.min_abs = min_abs;
  c.beta = eps / min_abs;
  c.rho = rho;
  const double t = static_cast<double>(sparsity);
  c.noise_ok = c.beta < 0.5;
  if (c.noise_ok) {
    c.mip_cwm_ok = nu < (1.0 - 2.0 * c.beta) / (3.0 * t - 1.0);
    c.mip_conv_ok = nu < (1.0 - 2.0 * c.beta) / (2.0 * t - 1.0);
  }
  const double base = (2.0 * t - 1.0) * nu + 2.0 * c.beta;
  c.rho_lower = base * base;
  if (rho && c.noise_ok && c.mip_conv_ok) {
    c.rho_admissible = *rho > c.rho_lower && *rho < 1.0;
    if (c.rho_admissible) {
      const double root = std::sqrt(*rho);
      c.s1 = 1.0 / (root - (t - 1.0) * nu - c.beta);
      c.s2 = root * *c.s1;
    }
  }
  c.xi = xi_interval_mip(nu, sparsity, c.beta, min_abs);
  if (c.xi) c.lambda_interval = std::make_pair(0.5 * eps * eps, *c.xi);
  return c;
}

inline TheoryCertificate certify(const SensingOperator& op, const SparseSignal& truth,
                                 double eps, std::optional<double> rho = std::nullopt) {
  if (truth.p != op.cols()) throw DimensionError("certify: signal/operator mismatch");
  if (truth.sparsity() < 1) throw ParameterError("certify: signal has empty support");
  return certify_values(mutual_coherence(op), static_cast<Index>(truth.sparsity()), eps,
                        truth.min_abs(), rho);
}

// ---------------------------------------------------------------------------
// Oracle solution and exhaustive l0 minimization
// ---------------------------------------------------------------------------

/// Least-squares fit on the true support, embedded in R^p.
inline Vector oracle_solution(const SensingOperator& op, const IndexSet& true_support,
                              const Vector& y) {
  const RestrictedLsqSolution sol = solve_direct(op, true_support, y);
  return embed(op.cols(), true_support, sol.x_active);
}

struct L0Minimizer {
  IndexSet support;
  Vector x;
  double objective = 0.0;
  std::size_t candidates = 0;
};

/// Global minimizer of J_lambda over all supports of size <= k_max. Each
/// candidate support is fitted by least squares; ties go to the smaller
/// support, then the lexicographically first.
inline L0Minimizer bruteforce_l0_min(const SensingOperator& op, const Vector& y,
                                     double lambda, Index k_max,
                                     double subset_cap = kEnumerationCap) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  const Index p = op.cols();
  k_max = std::min(k_max, std::min(p, op.rows()));
  double total = 0.0;
  for (Index k = 0; k <= k_max; ++k) total += binomial(p, k);
  if (total > subset_cap) {
    throw CapacityError("l0 brute force: candidate count exceeds the enumeration cap");
  }
  L0Minimizer best;
  best.x = Vector::Zero(p);
  best.objective = std::numeric_limits<double>::infinity();
  for (Index k = 0; k <= k_max; ++k) {
    for_each_subset(p, k, [&](const IndexSet& a) {
      ++best.candidates;
      Vector x;
      try {
        x = embed(p, a, solve_direct(op, a, y).x_active);
      } catch (const SingularGramError&) {
        return;  // the same fit is reachable from a smaller support
      }
      const double j = objective(op, y, x, lambda);
      if (j < best.objective) {
        best.objective = j;
        best.x = std::move(x);
        best.support = support_of(best.x);
      }
    });
  }
  return best;
}

// ---------------------------------------------------------------------------
// Numerical checks of the one-step and basic estimates
// ---------------------------------------------------------------------------

struct BoundRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< >= 0 when the inequality holds
  bool pass = true;
};

struct BoundReport {
  bool applicable = true;
  std::string reason;  ///< why not applicable
  std::vector<BoundRow> rows;

  bool all_pass() const {
    for (const auto& r : rows) {
      if (!r.pass) return false;
    }
    return true;
  }
  double min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) m = std::min(m, r.margin);
    return m;
  }
  void upper(std::string name, double lhs, double rhs, double tol) {
    rows.push_back({std::move(name), lhs, rhs, rhs - lhs, lhs <= rhs + tol});
  }
  void lower(std::string name, double lhs, double rhs, double tol) {
    rows.push_back({std::move(name), lhs, rhs, lhs - rhs, lhs >= rhs - tol});
  }
  static BoundReport not_applicable(std::string why) {
    BoundReport r;
    r.applicable = false;
    r.reason = std::move(why);
    return r;
  }
};

namespace detail {
inline double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// One primal-dual step on A against known truth.
struct OneStep {
  IndexSet a, b, off;  // A, B = A* \ A, I* cap I
  Vector xbar;         // x_A - x*_A
  Vector d;
  Vector xstar_b;
};

inline OneStep one_step(const ProblemInstance& inst, const IndexSet& a) {
  const SparseSignal& truth = *inst.truth;
  const Index p = inst.op.cols();
  OneStep s;
  s.a = a;
  s.b = set_difference(truth.support, a);
  const Vector xstar = truth.dense();
  const RestrictedLsqSolution sol = solve_direct(inst.op, a, inst.y);
  s.xbar = sol.x_active - restrict_to(xstar, a);
  s.d = sol.dual;
  s.xstar_b = restrict_to(xstar, s.b);
  for (Index j = 0; j < p; ++j) {
    if (!contains(truth.support, j) && !contains(a, j)) s.off.push_back(j);
  }
  return s;
}
}  // namespace detail

/// One-step estimates under mutual coherence for x_A = Psi_A^+ y, x_I = 0,
/// d = Psi^t (y - Psi x), with B = A* \ A:
///   d_A = 0,
///   ||xbar_A||_inf <= (|B| nu ||x*_B||_inf + eps) / (1 - (|A|-1) nu),
///   |d_j| >= |x*_j| - ||x*_B||_inf (|B|-1) nu - eps - |A| nu ||xbar_A||_inf, j in B,
///   |d_j| <= |B| nu ||x*_B||_inf + eps + |A| nu ||xbar_A||_inf,             j in I* cap I.
/// The two dual rows report the worst coordinate.
inline BoundReport check_onestep_bounds_mip(const ProblemInstance& inst, const IndexSet& a,
                                            double nu, double tol = 1e-10) {
  if (!inst.truth) return BoundReport::not_applicable("instance has no ground truth");
  const Index t = static_cast<Index>(inst.truth->sparsity());
  if (static_cast<Index>(a.size()) > t) return BoundReport::not_applicable("|A| > T");
  if (t > 1 && !(nu < 1.0 / static_cast<double>(t - 1))) {
    return BoundReport::not_applicable("coherence gate nu < 1/(T-1) fails");
  }
  const detail::OneStep s = detail::one_step(inst, a);
  const double na = static_cast<double>(s.a.size());
  const double nb = static_cast<double>(s.b.size());
  const double xb_inf = detail::inf_norm(s.xstar_b);
  const double xbar_inf = detail::inf_norm(s.xbar);
  const double eps = inst.eps;

  BoundReport r;
  r.upper("dual_on_active_zero", detail::inf_norm(restrict_to(s.d, s.a)), 0.0, tol);
  r.upper("primal_error_inf", xbar_inf, (nb * nu * xb_inf + eps) / (1.0 - (na - 1.0) * nu),
          tol);
  if (!s.b.empty()) {
    double worst_lhs = 0.0, worst_rhs = 0.0, worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.b.size(); ++k) {
      const double lhs = std::abs(s.d[s.b[k]]);
      const double rhs = std::abs(s.xstar_b[static_cast<Index>(k)]) -
                         xb_inf * (nb - 1.0) * nu - eps - na * nu * xbar_inf;
      if (lhs - rhs < worst) {
        worst = lhs - rhs;
        worst_lhs = lhs;
        worst_rhs = rhs;
      }
    }
    r.lower("dual_lower_on_missed", worst_lhs, worst_rhs, tol);
  }
  if (!s.off.empty()) {
    double lhs = 0.0;
    for (Index j : s.off) lhs = std::max(lhs, std::abs(s.d[j]));
    r.upper("dual_upper_off_support", lhs, nb * nu * xb_inf + eps + na * nu * xbar_inf, tol);
  }
  return r;
}

/// RIP counterpart with brute-force constants:
///   ||xbar_A|| <= delta_{|A|+|B|}/(1-delta_{|A|}) ||x*_B|| + eps/sqrt(1-delta_{|A|}),
///   |d_j| >= |x*_j| - delta_{|B|} ||x*_B|| - eps - delta_{|A|+1} ||xbar_A||,  j in B,
///   |d_j| <= delta_{|B|+1} ||x*_B|| + eps + delta_{|A|+1} ||xbar_A||,        j in I* cap I.
inline BoundReport check_onestep_bounds_rip(const ProblemInstance& inst, const IndexSet& a,
                                            const RipTable& rip, double tol = 1e-10) {
  if (!inst.truth) return BoundReport::not_applicable("instance has no ground truth");
  const Index t = static_cast<Index>(inst.truth->sparsity());
  if (static_cast<Index>(a.size()) > t) return BoundReport::not_applicable("|A| > T");
  const Index nb_i = static_cast<Index>(set_difference(inst.truth->support, a).size());
  const Index na_i = static_cast<Index>(a.size());
  const Index level = std::max(na_i + nb_i, t + 1);
  if (level > rip.max_level()) return BoundReport::not_applicable("RIP table too short");
  if (!(rip.at(level) < 1.0)) return BoundReport::not_applicable("RIP fails at required level");

  const detail::OneStep s = detail::one_step(inst, a);
  const double xb = s.xstar_b.norm();
  const double xbar = s.xbar.norm();
  const double eps = inst.eps;
  const double da = rip.at(na_i);

  BoundReport r;
  r.upper("dual_on_active_zero", detail::inf_norm(restrict_to(s.d, s.a)), 0.0, tol);
  r.upper("primal_error_l2", xbar,
          rip.at(na_i + nb_i) / (1.0 - da) * xb + eps / std::sqrt(1.0 - da), tol);
  if (!s.b.empty()) {
    double worst_lhs = 0.0, worst_rhs = 0.0, worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.b.size(); ++k) {
      const double lhs = std::abs(s.d[s.b[k]]);
      const double rhs = std::abs(s.xstar_b[static_cast<Index>(k)]) - rip.at(nb_i) * xb - eps -
                         rip.at(na_i + 1) * xbar;
      if (lhs - rhs < worst) {
        worst = lhs - rhs;
        worst_lhs = lhs;
        worst_rhs = rhs;
      }
    }
    r.lower("dual_lower_on_missed", worst_lhs, worst_rhs, tol);
  }
  if (!s.off.empty()) {
    double lhs = 0.0;
    for (Index j : s.off) lhs = std::max(lhs, std::abs(s.d[j]));
    r.upper("dual_upper_off_support", lhs,
            rip.at(nb_i + 1) * xb + eps + rip.at(na_i + 1) * xbar, tol);
  }
  return r;
}

/// Basic coherence estimates for disjoint A, B:
///   ||Psi_A^t y||_inf <= ||y||,
///   ||Psi_B^t Psi_A x_A||_inf <= |A| nu ||x_A||_inf,
///   ||(Psi_A^t Psi_A)^{-1} x_A||_inf <= ||x_A||_inf / (1 - (|A|-1) nu)  if (|A|-1) nu < 1.
inline BoundReport check_coherence_bounds(const SensingOperator& op, double nu,
                                          const IndexSet& a, const IndexSet& b,
                                          const Vector& x_a, const Vector& y,
                                          double tol = 1e-10) {
  if (x_a.size() != static_cast<Index>(a.size())) throw DimensionError("x_A must have length |A|");
  if (intersection_size(a, b) != 0) throw ParameterError("A and B must be disjoint");
  BoundReport r;
  const double na = static_cast<double>(a.size());
  r.upper("adjoint_inf_vs_data", detail::inf_norm(op.adjoint_restricted(a, y)), y.norm(), tol);
  const Vector psi_x = op.apply_restricted(a, x_a);
  r.upper("cross_gram_inf", detail::inf_norm(op.adjoint_restricted(b, psi_x)),
          na * nu * detail::inf_norm(x_a), tol);
  if (!a.empty() && (na - 1.0) * nu < 1.0) {
    const Matrix psi_a = op.columns(a);
    const Matrix g = psi_a.transpose() * psi_a;
    const Vector z = g.ldlt().solve(x_a);
    r.upper("neumann_inverse_inf", detail::inf_norm(z),
            detail::inf_norm(x_a) / (1.0 - (na - 1.0) * nu), tol);
  }
  return r;
}

/// Basic RIP estimates for disjoint A, B with brute-force constants
/// (delta = delta_{|A|}):
///   (1 -/+ delta) ||x_A|| <=/>= ||Psi_A^t Psi_A x_A||,
///   ||x_A|| / (1 +/- delta) <=/>= ||(Psi_A^t Psi_A)^{-1} x_A||,
///   ||Psi_A^t Psi_B||_2 <= delta_{|A|+|B|},
///   ||Psi_A^+ y|| <= ||y|| / sqrt(1 - delta),
///   delta_s <= delta_{s'} for s < s'.
inline BoundReport check_rip_bounds(const SensingOperator& op, const RipTable& rip,
                                    const IndexSet& a, const IndexSet& b, const Vector& x_a,
                                    const Vector& y, double tol = 1e-10) {
  if (x_a.size() != static_cast<Index>(a.size())) throw DimensionError("x_A must have length |A|");
  if (intersection_size(a, b) != 0) throw ParameterError("A and B must be disjoint");
  const Index na = static_cast<Index>(a.size());
  const Index nb = static_cast<Index>(b.size());
  if (na + nb > rip.max_level()) return BoundReport::not_applicable("RIP table too short");
  BoundReport r;
  const double delta = rip.at(na);
  const Matrix psi_a = op.columns(a);
  const Matrix g = psi_a.transpose() * psi_a;
  const double xn = x_a.norm();
  const double gx = (g * x_a).norm();
  r.lower("gram_lower", gx, (1.0 - delta) * xn, tol);
  r.upper("gram_upper", gx, (1.0 + delta) * xn, tol);
  if (delta < 1.0 && na > 0) {
    const Vector z = g.ldlt().solve(x_a);
    r.lower("inverse_lower", z.norm(), xn / (1.0 + delta), tol);
    r.upper("inverse_upper", z.norm(), xn / (1.0 - delta), tol);
    const Vector pinv_y = g.ldlt().solve(psi_a.transpose() * y);
    r.upper("pseudoinverse_norm", pinv_y.norm(), y.norm() / std::sqrt(1.0 - delta), tol);
  }
  if (na > 0 && nb > 0) {
    const Matrix cross = psi_a.transpose() * op.columns(b);
    const Eigen::JacobiSVD<Matrix> svd(cross);
    r.upper("cross_spectral", svd.singularValues()(0), rip.at(na + nb), tol);
  }
  for (Index s = 1; s < rip.max_level(); ++s) {
    r.upper("monotone_delta_" + std::to_string(s), rip.at(s), rip.at(s + 1), tol);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Level sets
// ---------------------------------------------------------------------------

struct LevelSet {
  double lambda = 0.0;
  double s = 0.0;
  IndexSet members;  ///< {i : |x*_i| >= sqrt(2 lambda) s}
};

inline LevelSet level_set(const SparseSignal& truth, double lambda, double s) {
  if (!(s > 0.0)) throw ParameterError("level set scale must be positive");
  const double cut = threshold_level(lambda) * s;
  LevelSet g{lambda, s, {}};
  for (std::size_t k = 0; k < truth.support.size(); ++k) {
    if (std::abs(truth.values[static_cast<Index>(k)]) >= cut) g.members.push_back(truth.support[k]);
  }
  return g;
}

}  // namespace l0pdas
