#pragma once

#include "l0pdas/core.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

namespace l0pdas {

namespace detail {
// FFTW's planner is not re-entrant; plan creation and destruction must be
// serialized. Executing an existing plan on caller-owned buffers is safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Orthonormal DCT-II of length p and its inverse (the orthonormal DCT-III),
/// both O(p log p).
///
///   X_k = s_k * sum_j x_j cos(pi (2j+1) k / (2p)),  s_0 = sqrt(1/p),
///                                                   s_k = sqrt(2/p).
class OrthoDct {
 public:
  explicit OrthoDct(Index p) : p_(p) {
    if (p < 1) throw DimensionError("OrthoDct: length must be positive");
    std::vector<double> a(static_cast<std::size_t>(p)), b(a.size());
    const int n = static_cast<int>(p);
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_r2r_1d(n, a.data(), b.data(), FFTW_REDFT10,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    inverse_ = fftw_plan_r2r_1d(n, a.data(), b.data(), FFTW_REDFT01,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  }

  OrthoDct(const OrthoDct&) = delete;
  OrthoDct& operator=(const OrthoDct&) = delete;

  ~OrthoDct() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  Index size() const noexcept { return p_; }

  double scale(Index k) const noexcept {
    return k == 0 ? std::sqrt(1.0 / static_cast<double>(p_))
                  : std::sqrt(2.0 / static_cast<double>(p_));
  }

  /// Entry (k, j) of the orthonormal DCT-II matrix.
  double entry(Index k, Index j) const noexcept {
    const double pi = 3.14159265358979323846;
    return scale(k) * std::cos(pi * static_cast<double>((2 * j + 1) * k) /
                               (2.0 * static_cast<double>(p_)));
  }

  Vector forward(const Vector& x) const {
    check(x);
    Vector in = x;
    Vector out(p_);
    fftw_execute_r2r(forward_, in.data(), out.data());
    // FFTW's REDFT10 carries a factor 2 relative to the cosine sum.
    for (Index k = 0; k < p_; ++k) out[k] *= 0.5 * scale(k);
    return out;
  }

  Vector inverse(const Vector& coeffs) const {
    check(coeffs);
    Vector in(p_);
    in[0] = coeffs[0] * scale(0);
    for (Index k = 1; k < p_; ++k) in[k] = 0.5 * coeffs[k] * scale(k);
    Vector out(p_);
    fftw_execute_r2r(inverse_, in.data(), out.data());
    return out;
  }

 private:
  void check(const Vector& v) const {
    if (v.size() != p_) throw DimensionError("OrthoDct: length mismatch");
  }

  Index p_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace l0pdas
