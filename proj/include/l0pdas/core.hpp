#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace l0pdas {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sorted, duplicate-free list of column indices.
using IndexSet = std::vector<Index>;

// ---------------------------------------------------------------------------
// Errors. Every failure the library reports derives from l0pdas::Error so
// callers (the CLI in particular) can map categories onto exit codes.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree or a size is out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter violates its documented domain (lambda <= 0, N < 1, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive computation would exceed its configured enumeration cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The restricted Gram matrix Psi_A^t Psi_A is numerically singular.
class SingularGramError : public Error {
 public:
  SingularGramError(IndexSet active, double min_pivot,
                    std::optional<double> lambda = std::nullopt)
      : Error(describe(active.size(), min_pivot, lambda)),
        active_(std::move(active)),
        min_pivot_(min_pivot),
        lambda_(lambda) {}

  const IndexSet& active() const noexcept { return active_; }
  std::size_t set_size() const noexcept { return active_.size(); }
  double min_pivot() const noexcept { return min_pivot_; }
  std::optional<double> lambda() const noexcept { return lambda_; }

  SingularGramError with_lambda(double lambda) const {
    return SingularGramError(active_, min_pivot_, lambda);
  }

 private:
  static std::string describe(std::size_t size, double pivot,
                              std::optional<double> lambda) {
    std::string msg = "singular Gram matrix on active set of size " +
                      std::to_string(size) + " (min pivot " +
                      std::to_string(pivot) + ")";
    if (lambda) msg += " at lambda=" + std::to_string(*lambda);
    return msg;
  }

  IndexSet active_;
  double min_pivot_;
  std::optional<double> lambda_;
};

// ---------------------------------------------------------------------------
// Index-set helpers
// ---------------------------------------------------------------------------

inline IndexSet make_index_set(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline bool contains(const IndexSet& set, Index i) {
  return std::binary_search(set.begin(), set.end(), i);
}

inline bool is_subset(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline std::size_t intersection_size(const IndexSet& a, const IndexSet& b) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

/// Indices of the exact nonzeros of x.
inline IndexSet support_of(const Vector& x) {
  IndexSet s;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) s.push_back(i);
  }
  return s;
}

/// Copies x[set] into a dense |set| vector.
inline Vector restrict_to(const Vector& x, const IndexSet& set) {
  Vector out(static_cast<Index>(set.size()));
  for (std::size_t k = 0; k < set.size(); ++k) out[k] = x[set[k]];
  return out;
}

/// Embeds values on `set` into a zero vector of length p.
inline Vector embed(Index p, const IndexSet& set, const Vector& values) {
  if (values.size() != static_cast<Index>(set.size())) {
    throw DimensionError("embed: value count does not match set size");
  }
  Vector out = Vector::Zero(p);
  for (std::size_t k = 0; k < set.size(); ++k) out[set[k]] = values[k];
  return out;
}

/// Indices of the `count` largest entries of |v| (ties broken by smaller
/// index), returned sorted ascending.
inline IndexSet top_k_abs(const Vector& v, std::size_t count) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) order[i] = i;
  count = std::min<std::size_t>(count, order.size());
  std::partial_sort(order.begin(), order.begin() + count, order.end(),
                    [&](Index a, Index b) {
                      const double fa = std::abs(v[a]);
                      const double fb = std::abs(v[b]);
                      return fa > fb || (fa == fb && a < b);
                    });
  order.resize(count);
  return make_index_set(std::move(order));
}

inline std::string to_string(const IndexSet& set) {
  std::string s = "{";
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(set[k]);
  }
  return s + "}";
}

}  // namespace l0pdas
