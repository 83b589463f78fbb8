#pragma once

#include "l0pdas/core.hpp"
#include "l0pdas/dct.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>

namespace l0pdas {

enum class OperatorKind { Dense, PartialDct, Custom };

inline std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Dense: return "dense";
    case OperatorKind::PartialDct: return "partial-dct";
    case OperatorKind::Custom: return "custom";
  }
  return "unknown";
}

/// The measurement map Psi : R^p -> R^n.
///
/// A SensingOperator is an immutable handle: copies share the underlying
/// representation, and every member function is const and safe to call
/// concurrently. Three representations exist:
///
///  - dense: an explicit column-major n x p matrix;
///  - partial DCT: n rows of the p x p orthonormal DCT-II matrix, columns
///    rescaled to unit norm, applied in O(p log p);
///  - custom: user-supplied apply/adjoint callbacks.
class SensingOperator {
 public:
  using ApplyFn = std::function<Vector(const Vector&)>;

  static SensingOperator dense(Matrix m, bool columns_normalized) {
    if (m.rows() < 1 || m.cols() < 1) {
      throw DimensionError("dense operator needs positive dimensions");
    }
    return SensingOperator(std::make_shared<const Repr>(
        Repr{m.rows(), m.cols(), columns_normalized, DenseRepr{std::move(m)}}));
  }

  /// `rows` selects which DCT-II frequencies are observed (sorted, distinct,
  /// each < p). Columns are rescaled to unit norm.
  static SensingOperator partial_dct(Index p, IndexSet rows) {
    rows = make_index_set(std::move(rows));
    if (rows.empty() || static_cast<Index>(rows.size()) > p ||
        rows.back() >= p || rows.front() < 0) {
      throw DimensionError("partial DCT: invalid row selection");
    }
    auto dct = std::make_shared<const OrthoDct>(p);
    Vector inv_norm(p);
    for (Index j = 0; j < p; ++j) {
      double s = 0.0;
      for (Index k : rows) {
        const double e = dct->entry(k, j);
        s += e * e;
      }
      if (s <= 0.0) {
        throw DimensionError("partial DCT: zero column for the given rows");
      }
      inv_norm[j] = 1.0 / std::sqrt(s);
    }
    const Index n = static_cast<Index>(rows.size());
    return SensingOperator(std::make_shared<const Repr>(Repr{
        n, p, true, DctRepr{std::move(dct), std::move(rows), std::move(inv_norm)}}));
  }

  static SensingOperator custom(Index n, Index p, ApplyFn apply,
                                ApplyFn adjoint, bool columns_normalized) {
    if (n < 1 || p < 1 || !apply || !adjoint) {
      throw DimensionError("custom operator: invalid dimensions or callbacks");
    }
    return SensingOperator(std::make_shared<const Repr>(
        Repr{n, p, columns_normalized,
             CustomRepr{std::move(apply), std::move(adjoint)}}));
  }

  OperatorKind kind() const {
    return std::visit(
        [](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, DenseRepr>) return OperatorKind::Dense;
          else if constexpr (std::is_same_v<T, DctRepr>) return OperatorKind::PartialDct;
          else return OperatorKind::Custom;
        },
        repr_->body);
  }

  Index rows() const noexcept { return repr_->n; }
  Index cols() const noexcept { return repr_->p; }
  bool columns_normalized() const noexcept { return repr_->normalized; }

  /// Non-null only for dense operators.
  const Matrix* dense_matrix() const noexcept {
    const auto* d = std::get_if<DenseRepr>(&repr_->body);
    return d ? &d->m : nullptr;
  }

  /// Row indices of a partial DCT operator (empty for other kinds).
  const IndexSet& dct_rows() const {
    static const IndexSet empty;
    const auto* d = std::get_if<DctRepr>(&repr_->body);
    return d ? d->rows : empty;
  }

  Vector apply(const Vector& x) const {
    if (x.size() != cols()) throw DimensionError("apply: expected length p");
    return std::visit([&](const auto& r) { return apply_impl(r, x); },
                      repr_->body);
  }

  Vector adjoint_apply(const Vector& r) const {
    if (r.size() != rows()) throw DimensionError("adjoint: expected length n");
    return std::visit([&](const auto& b) { return adjoint_impl(b, r); },
                      repr_->body);
  }

  Vector column(Index i) const {
    if (i < 0 || i >= cols()) throw DimensionError("column index out of range");
    if (const auto* d = std::get_if<DenseRepr>(&repr_->body)) return d->m.col(i);
    if (const auto* d = std::get_if<DctRepr>(&repr_->body)) {
      Vector c(rows());
      for (std::size_t k = 0; k < d->rows.size(); ++k) {
        c[static_cast<Index>(k)] = d->dct->entry(d->rows[k], i) * d->inv_norm[i];
      }
      return c;
    }
    Vector e = Vector::Zero(cols());
    e[i] = 1.0;
    return apply(e);
  }

  /// Psi_A as an explicit n x |A| matrix.
  Matrix columns(const IndexSet& set) const {
    Matrix out(rows(), static_cast<Index>(set.size()));
    if (const auto* d = std::get_if<DenseRepr>(&repr_->body)) {
      for (std::size_t k = 0; k < set.size(); ++k) {
        out.col(static_cast<Index>(k)) = d->m.col(set[k]);
      }
    } else {
      for (std::size_t k = 0; k < set.size(); ++k) {
        out.col(static_cast<Index>(k)) = column(set[k]);
      }
    }
    return out;
  }

  /// Psi_A x_A without forming the full p-vector for dense operators.
  Vector apply_restricted(const IndexSet& set, const Vector& values) const {
    if (values.size() != static_cast<Index>(set.size())) {
      throw DimensionError("apply_restricted: size mismatch");
    }
    if (const auto* d = std::get_if<DenseRepr>(&repr_->body)) {
      Vector out = Vector::Zero(rows());
      for (std::size_t k = 0; k < set.size(); ++k) {
        out.noalias() += values[static_cast<Index>(k)] * d->m.col(set[k]);
      }
      return out;
    }
    return apply(embed(cols(), set, values));
  }

  /// Psi_A^t r.
  Vector adjoint_restricted(const IndexSet& set, const Vector& r) const {
    if (r.size() != rows()) throw DimensionError("adjoint_restricted: expected length n");
    Vector out(static_cast<Index>(set.size()));
    if (const auto* d = std::get_if<DenseRepr>(&repr_->body)) {
      for (std::size_t k = 0; k < set.size(); ++k) {
        out[static_cast<Index>(k)] = d->m.col(set[k]).dot(r);
      }
      return out;
    }
    return restrict_to(adjoint_apply(r), set);
  }

  /// Materializes the full n x p matrix.
  Matrix to_dense() const {
    if (const Matrix* m = dense_matrix()) return *m;
    Matrix out(rows(), cols());
    for (Index i = 0; i < cols(); ++i) out.col(i) = column(i);
    return out;
  }

 private:
  struct DenseRepr {
    Matrix m;
  };
  struct DctRepr {
    std::shared_ptr<const OrthoDct> dct;
    IndexSet rows;
    Vector inv_norm;
  };
  struct CustomRepr {
    ApplyFn apply;
    ApplyFn adjoint;
  };
  struct Repr {
    Index n;
    Index p;
    bool normalized;
    std::variant<DenseRepr, DctRepr, CustomRepr> body;
  };

  explicit SensingOperator(std::shared_ptr<const Repr> repr)
      : repr_(std::move(repr)) {}

  static Vector apply_impl(const DenseRepr& r, const Vector& x) { return r.m * x; }
  static Vector adjoint_impl(const DenseRepr& r, const Vector& v) {
    return r.m.transpose() * v;
  }

  static Vector apply_impl(const DctRepr& r, const Vector& x) {
    const Vector full = r.dct->forward(x.cwiseProduct(r.inv_norm));
    Vector out(static_cast<Index>(r.rows.size()));
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
      out[static_cast<Index>(k)] = full[r.rows[k]];
    }
    return out;
  }
  static Vector adjoint_impl(const DctRepr& r, const Vector& v) {
    Vector scattered = Vector::Zero(r.dct->size());
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
      scattered[r.rows[k]] = v[static_cast<Index>(k)];
    }
    return r.dct->inverse(scattered).cwiseProduct(r.inv_norm);
  }

  static Vector apply_impl(const CustomRepr& r, const Vector& x) { return r.apply(x); }
  static Vector adjoint_impl(const CustomRepr& r, const Vector& v) {
    return r.adjoint(v);
  }

  std::shared_ptr<const Repr> repr_;
};

}  // namespace l0pdas
