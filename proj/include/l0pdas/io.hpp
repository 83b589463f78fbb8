#pragma once

// File formats.
//
// Operator binary (little-endian):
//   bytes 0..3  magic "L0OP"
//   u32         n (rows)
//   u32         p (columns)
//   f64 * n*p   entries, column-major
//
// Operator CSV: n lines of p comma-separated values.
//
// Signal / instance JSON: {"p", "support", "values", "sigma", "eps", "seed"},
// instances add "n", "kind" and "y".
//
// Solve report CSV: k,lambda,active_size,inner_iters,residual,overlap_true,
// excess_outside_true (last two empty without ground truth).

#include "l0pdas/core.hpp"
#include "l0pdas/problem_model.hpp"
#include "l0pdas/sensing_operator.hpp"
#include "l0pdas/solver.hpp"
#include "l0pdas/theory.hpp"

#include "json.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace l0pdas {

using Json = nlohmann::json;

/// Shortest round-trip decimal representation; "nan"/"inf"/"-inf" for
/// non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Operator binary / CSV
// ---------------------------------------------------------------------------

namespace detail {
template <typename T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw DimensionError("operator binary: truncated input");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

inline bool has_unit_columns(const Matrix& m, double tol = 1e-12) {
  for (Index j = 0; j < m.cols(); ++j) {
    if (std::abs(m.col(j).norm() - 1.0) > tol) return false;
  }
  return true;
}
}  // namespace detail

inline void write_operator_binary(std::ostream& os, const SensingOperator& op) {
  const Matrix m = op.to_dense();
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw DimensionError("operator binary: dimensions exceed u32");
  }
  os.write("L0OP", 4);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) detail::put_le<double>(os, m(i, j));
  }
}

inline SensingOperator read_operator_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "L0OP", 4) != 0) {
    throw DimensionError("operator binary: bad magic");
  }
  const auto n = detail::get_le<std::uint32_t>(is);
  const auto p = detail::get_le<std::uint32_t>(is);
  Matrix m(n, p);
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) m(i, j) = detail::get_le<double>(is);
  }
  const bool unit = detail::has_unit_columns(m);
  return SensingOperator::dense(std::move(m), unit);
}

inline void write_operator_csv(std::ostream& os, const SensingOperator& op) {
  const Matrix m = op.to_dense();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

inline SensingOperator read_operator_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionError("operator CSV: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DimensionError("operator CSV: empty input");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  const bool unit = detail::has_unit_columns(m);
  return SensingOperator::dense(std::move(m), unit);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {
inline Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}
inline Vector json_vector(const Json& a) {
  Vector v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].get<double>();
  return v;
}
inline Json opt_json(std::optional<double> v) {
  return v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}
}  // namespace detail

inline Json signal_to_json(const SparseSignal& s, double sigma = 0.0, double eps = 0.0,
                           std::uint64_t seed = 0) {
  return Json{{"p", s.p},
              {"support", s.support},
              {"values", detail::vector_json(s.values)},
              {"sigma", sigma},
              {"eps", eps},
              {"seed", seed}};
}

inline SparseSignal signal_from_json(const Json& j) {
  SparseSignal s;
  s.p = j.at("p").get<Index>();
  s.support = j.at("support").get<IndexSet>();
  s.values = detail::json_vector(j.at("values"));
  if (s.values.size() != static_cast<Index>(s.support.size())) {
    throw DimensionError("signal JSON: support/values length mismatch");
  }
  if (make_index_set(s.support) != s.support) {
    throw DimensionError("signal JSON: support must be sorted and distinct");
  }
  for (Index i = 0; i < s.values.size(); ++i) {
    if (s.values[i] == 0.0) throw DimensionError("signal JSON: zero value on support");
  }
  if (!s.support.empty() && (s.support.front() < 0 || s.support.back() >= s.p)) {
    throw DimensionError("signal JSON: support index out of range");
  }
  return s;
}

/// Instance JSON; the operator itself is stored separately.
inline Json instance_to_json(const ProblemInstance& inst) {
  Json j = inst.truth ? signal_to_json(*inst.truth, inst.sigma, inst.eps, inst.seed)
                      : Json{{"p", inst.op.cols()},
                             {"support", Json::array()},
                             {"values", Json::array()},
                             {"sigma", inst.sigma},
                             {"eps", inst.eps},
                             {"seed", inst.seed}};
  j["has_truth"] = inst.truth.has_value();
  j["n"] = inst.op.rows();
  j["kind"] = to_string(inst.op.kind());
  j["y"] = detail::vector_json(inst.y);
  return j;
}

inline ProblemInstance instance_from_json(const Json& j, const SensingOperator& op) {
  const Vector y = detail::json_vector(j.at("y"));
  if (y.size() != op.rows() || j.at("p").get<Index>() != op.cols()) {
    throw DimensionError("instance JSON does not match operator dimensions");
  }
  ProblemInstance inst = make_data_instance(op, y, j.value("eps", 0.0));
  inst.sigma = j.value("sigma", 0.0);
  inst.seed = j.value("seed", std::uint64_t{0});
  if (j.value("has_truth", true) && !j.at("support").empty()) {
    inst.truth = signal_from_json(j);
  }
  return inst;
}

inline Json report_to_json(const SolveReport& r, const IndexSet* truth = nullptr) {
  Json path = Json::array();
  for (const PathRecord& rec : r.path) {
    Json e{{"k", rec.k},
           {"lambda", detail::opt_json(rec.lambda)},
           {"active_size", rec.active.size()},
           {"active", rec.active},
           {"inner_iters", rec.inner_iters},
           {"inner_status", rec.inner_status ? Json(to_string(*rec.inner_status)) : Json(nullptr)},
           {"residual", rec.residual},
           {"skipped", rec.skipped}};
    if (truth) {
      e["overlap_true"] = intersection_size(rec.active, *truth);
      e["excess_outside_true"] = rec.active.size() - intersection_size(rec.active, *truth);
    }
    path.push_back(std::move(e));
  }
  Json x_sparse = Json::object();
  for (Index i : r.support) x_sparse[std::to_string(i)] = r.x[i];
  return Json{{"solver", r.solver},
              {"status", to_string(r.status)},
              {"p", r.x.size()},
              {"support", r.support},
              {"values", detail::vector_json(restrict_to(r.x, r.support))},
              {"lambda_final", detail::opt_json(r.lambda_final)},
              {"rho", detail::opt_json(r.rho)},
              {"discrepancy", r.discrepancy},
              {"path", std::move(path)}};
}

inline void write_report_csv(std::ostream& os, const SolveReport& r,
                             const IndexSet* truth = nullptr) {
  os << "k,lambda,active_size,inner_iters,residual,overlap_true,excess_outside_true\n";
  for (const PathRecord& rec : r.path) {
    os << rec.k << ',' << (rec.lambda ? format_double(*rec.lambda) : "") << ','
       << rec.active.size() << ',' << rec.inner_iters << ',' << format_double(rec.residual)
       << ',';
    if (truth) {
      const std::size_t in = intersection_size(rec.active, *truth);
      os << in << ',' << rec.active.size() - in;
    } else {
      os << ',';
    }
    os << '\n';
  }
}

inline Json certificate_to_json(const TheoryCertificate& c) {
  Json j{{"nu", c.nu},
         {"T", c.sparsity},
         {"eps", c.eps},
         {"min_abs", c.min_abs},
         {"beta", c.beta},
         {"noise_ok", c.noise_ok},
         {"mip_cwm_ok", c.mip_cwm_ok},
         {"mip_conv_ok", c.mip_conv_ok},
         {"rho_interval", c.noise_ok && c.mip_conv_ok ? Json::array({c.rho_lower, 1.0})
                                                       : Json(nullptr)},
         {"rho", detail::opt_json(c.rho)},
         {"rho_admissible", c.rho_admissible},
         {"s1", detail::opt_json(c.s1)},
         {"s2", detail::opt_json(c.s2)},
         {"xi", detail::opt_json(c.xi)}};
  j["lambda_interval"] = c.lambda_interval
                             ? Json::array({c.lambda_interval->first, c.lambda_interval->second})
                             : Json(nullptr);
  return j;
}

inline void write_bound_report_csv(std::ostream& os, const BoundReport& r) {
  os << "name,lhs,rhs,margin,pass\n";
  for (const BoundRow& row : r.rows) {
    os << row.name << ',' << format_double(row.lhs) << ',' << format_double(row.rhs) << ','
       << format_double(row.margin) << ',' << (row.pass ? "true" : "false") << '\n';
  }
}

}  // namespace l0pdas
