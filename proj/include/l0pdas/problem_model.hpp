#pragma once

#include "l0pdas/core.hpp"
#include "l0pdas/rng.hpp"
#include "l0pdas/sensing_operator.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>

namespace l0pdas {

/// A T-sparse ground-truth signal x* in R^p.
struct SparseSignal {
  Index p = 0;
  IndexSet support;  ///< A*, sorted
  Vector values;     ///< nonzero values on `support`, same order

  std::size_t sparsity() const noexcept { return support.size(); }

  double min_abs() const { return support.empty() ? 0.0 : values.cwiseAbs().minCoeff(); }
  double max_abs() const { return support.empty() ? 0.0 : values.cwiseAbs().maxCoeff(); }
  /// R = M / m.
  double dynamic_range() const { return support.empty() ? 1.0 : max_abs() / min_abs(); }

  Vector dense() const { return embed(p, support, values); }
};

/// y = Psi x* + eta, with the noise realization and its norm when known.
struct ProblemInstance {
  SensingOperator op;
  Vector y;
  std::optional<SparseSignal> truth;
  std::optional<Vector> noise;
  double eps = 0.0;    ///< ||eta||_2
  double sigma = 0.0;  ///< per-entry noise standard deviation
  std::uint64_t seed = 0;
};

namespace detail {
inline void check_dims(Index n, Index p) {
  if (n < 1 || p < 1 || n > p) {
    throw DimensionError("sensing operator requires 0 < n <= p (got n=" +
                         std::to_string(n) + ", p=" + std::to_string(p) + ")");
  }
}

inline void normalize_columns(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (norm == 0.0) {
      throw DimensionError("cannot normalize a zero column");
    }
    m.col(j) /= norm;
  }
}

/// First `count` entries of a uniformly random permutation of 0..p-1.
inline IndexSet sample_without_replacement(Index p, Index count, Rng& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(p));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index k = 0; k < count; ++k) {
    std::uniform_int_distribution<Index> pick(k, p - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return make_index_set(std::move(pool));
}
}  // namespace detail

/// i.i.d. N(0,1) entries, each column scaled to unit norm.
inline SensingOperator gen_gaussian_operator(Index n, Index p, std::uint64_t seed) {
  detail::check_dims(n, p);
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) m(i, j) = normal(rng);
  }
  detail::normalize_columns(m);
  return SensingOperator::dense(std::move(m), true);
}

/// Entries +-1/sqrt(n) with equal probability; columns have unit norm.
inline SensingOperator gen_bernoulli_operator(Index n, Index p, std::uint64_t seed) {
  detail::check_dims(n, p);
  Rng rng = make_rng(seed);
  std::bernoulli_distribution coin(0.5);
  const double v = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix m(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) m(i, j) = coin(rng) ? v : -v;
  }
  return SensingOperator::dense(std::move(m), true);
}

/// n rows drawn uniformly without replacement from the p x p orthonormal
/// DCT-II matrix, columns rescaled to unit norm.
inline SensingOperator gen_partial_dct_operator(Index n, Index p, std::uint64_t seed) {
  detail::check_dims(n, p);
  Rng rng = make_rng(seed);
  return SensingOperator::partial_dct(p, detail::sample_without_replacement(p, n, rng));
}

/// Support uniform at random; signs uniform +-1; magnitudes log-uniform on
/// [1, R] with the minimum pinned to exactly 1 and (for T >= 2) the maximum
/// pinned to exactly R. A 1-sparse signal has magnitude 1.
inline SparseSignal gen_sparse_signal(Index p, Index sparsity, double range,
                                      std::uint64_t seed) {
  if (p < 1) throw DimensionError("signal dimension must be positive");
  if (sparsity < 1 || sparsity > p) {
    throw ParameterError("sparsity must satisfy 1 <= T <= p");
  }
  if (!(range >= 1.0) || !std::isfinite(range)) {
    throw ParameterError("dynamic range must be >= 1");
  }
  Rng rng = make_rng(seed);
  SparseSignal s;
  s.p = p;
  s.support = detail::sample_without_replacement(p, sparsity, rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const double log_range = std::log(range);
  Vector mags(sparsity);
  for (Index k = 0; k < sparsity; ++k) mags[k] = std::exp(unit(rng) * log_range);

  if (sparsity == 1) {
    mags[0] = 1.0;
  } else {
    std::uniform_int_distribution<Index> pick(0, sparsity - 1);
    const Index lo = pick(rng);
    Index hi = pick(rng);
    while (hi == lo) hi = pick(rng);
    mags[lo] = 1.0;
    mags[hi] = range;
  }
  s.values.resize(sparsity);
  for (Index k = 0; k < sparsity; ++k) s.values[k] = coin(rng) ? mags[k] : -mags[k];
  return s;
}

/// y = Psi x* + eta with eta_i ~ N(0, sigma^2); eps = ||eta||_2.
inline ProblemInstance synthesize_instance(const SensingOperator& op,
                                           const SparseSignal& truth, double sigma,
                                           std::uint64_t seed) {
  if (truth.p != op.cols()) {
    throw DimensionError("signal dimension does not match operator columns");
  }
  if (!(sigma >= 0.0)) throw ParameterError("noise std must be >= 0");
  ProblemInstance inst{op, op.apply_restricted(truth.support, truth.values),
                       truth, std::nullopt, 0.0, sigma, seed};
  Vector eta = Vector::Zero(op.rows());
  if (sigma > 0.0) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (Index i = 0; i < eta.size(); ++i) eta[i] = normal(rng);
  }
  inst.y += eta;
  inst.eps = eta.norm();
  inst.noise = std::move(eta);
  return inst;
}

/// Instance for real data: no ground truth, caller-supplied noise level.
inline ProblemInstance make_data_instance(const SensingOperator& op, Vector y,
                                          double eps) {
  if (y.size() != op.rows()) throw DimensionError("data length must equal n");
  return ProblemInstance{op, std::move(y), std::nullopt, std::nullopt, eps, 0.0, 0};
}

}  // namespace l0pdas
