#pragma once

// Batch experiment driver: recovery-probability sweeps, active-set traces and
// timing/error tables over synthetic instances.
//
// Config schema (JSON):
//   {
//     "matrix":  {"kind": "gaussian" | "bernoulli" | "partial-dct", "n": 500, "p": 1000},
//     "signal":  {"T": [50, 100] or 50, "R": [1000] or 1000},
//     "sigma":   1e-3,
//     "trials":  20,
//     "seed":    1,
//     "jobs":    1,
//     "timing":  true,
//     "solvers": [
//       {"name": "pdasc", "label": "pdasc(100,5)", "N": 100, "J_max": 5,
//        "lambda_min_ratio": 1e-15, "lsq": "direct" | "cg",
//        "cg_max_iters": 2, "cg_tol_factor": 1e-5, "discrepancy_floor": 1e-10},
//       {"name": "omp"}, {"name": "htp", "max_iters": 100, "step": 1.0},
//       {"name": "iht"}, {"name": "aiht"}, {"name": "cosamp"}, {"name": "oracle"}
//     ]
//   }
//
// Trial t of every (T, R) cell uses seed = seed + t; the operator, signal and
// noise draw from independent streams derived from it.

#include "l0pdas/baselines.hpp"
#include "l0pdas/core.hpp"
#include "l0pdas/io.hpp"
#include "l0pdas/problem_model.hpp"
#include "l0pdas/rng.hpp"
#include "l0pdas/sensing_operator.hpp"
#include "l0pdas/solver.hpp"
#include "l0pdas/theory.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace l0pdas {

enum class MatrixKind { Gaussian, Bernoulli, PartialDct };

inline std::string to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::Gaussian: return "gaussian";
    case MatrixKind::Bernoulli: return "bernoulli";
    case MatrixKind::PartialDct: return "partial-dct";
  }
  return "unknown";
}

inline MatrixKind parse_matrix_kind(const std::string& s) {
  if (s == "gaussian") return MatrixKind::Gaussian;
  if (s == "bernoulli") return MatrixKind::Bernoulli;
  if (s == "partial-dct" || s == "dct") return MatrixKind::PartialDct;
  throw ParameterError("unknown matrix kind '" + s + "'");
}

inline SensingOperator make_operator(MatrixKind kind, Index n, Index p, std::uint64_t seed) {
  switch (kind) {
    case MatrixKind::Gaussian: return gen_gaussian_operator(n, p, seed);
    case MatrixKind::Bernoulli: return gen_bernoulli_operator(n, p, seed);
    case MatrixKind::PartialDct: return gen_partial_dct_operator(n, p, seed);
  }
  throw ParameterError("unknown matrix kind");
}

/// One solver entry of an experiment.
struct SolverSpec {
  std::string name = "pdasc";  ///< pdasc, omp, htp, iht, aiht, cosamp or oracle
  std::string label;           ///< column value in the output; defaults to `name`
  SolverConfig pdasc;
  GreedyConfig greedy;
  /// PDASC stops at ||Psi x - y|| <= max(eps, discrepancy_floor * ||y||).
  double discrepancy_floor = 1e-10;

  const std::string& id() const { return label.empty() ? name : label; }
};

inline SolverSpec pdasc_spec(int grid_size, int max_inner) {
  SolverSpec s;
  s.name = "pdasc";
  s.label = "pdasc(" + std::to_string(grid_size) + "," + std::to_string(max_inner) + ")";
  s.pdasc.grid_size = grid_size;
  s.pdasc.max_inner = max_inner;
  return s;
}

inline SolverSpec baseline_spec(const std::string& name) {
  SolverSpec s;
  s.name = name;
  s.greedy.accelerated = name == "aiht";
  return s;
}

struct ExperimentConfig {
  MatrixKind matrix = MatrixKind::Gaussian;
  Index n = 0;
  Index p = 0;
  std::vector<Index> sparsity;  ///< T values
  std::vector<double> range;    ///< R values
  double sigma = 0.0;
  std::vector<SolverSpec> solvers;
  int trials = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool timing = true;  ///< false: time columns are left empty

  void validate() const {
    detail::check_dims(n, p);
    if (trials < 1) throw ParameterError("trials must be >= 1");
    if (jobs < 1) throw ParameterError("jobs must be >= 1");
    if (sparsity.empty()) throw ParameterError("at least one sparsity level T is required");
    if (range.empty()) throw ParameterError("at least one dynamic range R is required");
    for (Index t : sparsity) {
      if (t < 1 || t > n) throw ParameterError("every T must satisfy 1 <= T <= n");
    }
    for (double r : range) {
      if (!(r >= 1.0)) throw ParameterError("every R must be >= 1");
    }
    if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
    if (solvers.empty()) throw ParameterError("solver list is empty");
    for (const SolverSpec& s : solvers) {
      static const char* known[] = {"pdasc", "omp", "htp", "iht", "aiht", "cosamp", "oracle"};
      if (std::find(std::begin(known), std::end(known), s.name) == std::end(known)) {
        throw ParameterError("unknown solver '" + s.name + "'");
      }
      if (s.name == "pdasc") s.pdasc.validate();
    }
  }

  std::uint64_t trial_seed(int trial) const { return seed + static_cast<std::uint64_t>(trial); }
};

// ---------------------------------------------------------------------------
// Config JSON
// ---------------------------------------------------------------------------

namespace detail {
template <typename T>
std::vector<T> scalar_or_list(const Json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}
}  // namespace detail

inline SolverSpec solver_spec_from_json(const Json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    return name == "pdasc" ? pdasc_spec(100, 5) : baseline_spec(name);
  }
  SolverSpec s = baseline_spec(j.at("name").get<std::string>());
  s.pdasc.grid_size = j.value("N", s.pdasc.grid_size);
  s.pdasc.max_inner = j.value("J_max", s.pdasc.max_inner);
  s.pdasc.lambda_min_ratio = j.value("lambda_min_ratio", s.pdasc.lambda_min_ratio);
  if (j.contains("lambda0")) s.pdasc.lambda0 = j.at("lambda0").get<double>();
  if (j.contains("discrepancy")) s.pdasc.discrepancy = j.at("discrepancy").get<double>();
  const std::string lsq = j.value("lsq", std::string("direct"));
  if (lsq == "direct") {
    s.pdasc.lsq.method = LsqMethod::Direct;
  } else if (lsq == "cg") {
    s.pdasc.lsq.method = LsqMethod::Iterative;
  } else {
    throw ParameterError("lsq must be 'direct' or 'cg'");
  }
  s.pdasc.lsq.cg.max_iters = j.value("cg_max_iters", s.pdasc.lsq.cg.max_iters);
  s.pdasc.lsq.cg.tol_factor = j.value("cg_tol_factor", s.pdasc.lsq.cg.tol_factor);
  s.discrepancy_floor = j.value("discrepancy_floor", s.discrepancy_floor);
  s.greedy.max_iters = j.value("max_iters", s.greedy.max_iters);
  s.greedy.step = j.value("step", s.greedy.step);
  s.greedy.tol = j.value("tol", s.greedy.tol);
  s.label = j.value("label", std::string());
  if (s.label.empty() && s.name == "pdasc") {
    s.label = pdasc_spec(s.pdasc.grid_size, s.pdasc.max_inner).label;
  }
  return s;
}

inline ExperimentConfig experiment_from_json(const Json& j) {
  try {
    ExperimentConfig c;
    const Json& m = j.at("matrix");
    c.matrix = parse_matrix_kind(m.value("kind", std::string("gaussian")));
    c.n = m.at("n").get<Index>();
    c.p = m.at("p").get<Index>();
    const Json& sig = j.at("signal");
    c.sparsity = detail::scalar_or_list<Index>(sig.at("T"));
    c.range = detail::scalar_or_list<double>(sig.value("R", Json(1.0)));
    c.sigma = j.value("sigma", 0.0);
    c.trials = j.value("trials", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    c.jobs = j.value("jobs", 1);
    c.timing = j.value("timing", true);
    if (j.contains("solvers")) {
      for (const Json& s : j.at("solvers")) c.solvers.push_back(solver_spec_from_json(s));
    } else {
      c.solvers.push_back(pdasc_spec(100, 5));
    }
    return c;
  } catch (const Json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// 10 log10(V^2 / MSE) with V the largest magnitude over both vectors;
/// +infinity when the vectors are equal.
inline double psnr(const Vector& x_hat, const Vector& x_ref) {
  if (x_hat.size() != x_ref.size()) throw DimensionError("psnr: vectors differ in length");
  if (x_hat.size() == 0) throw DimensionError("psnr: empty vectors");
  const double mse = (x_hat - x_ref).squaredNorm() / static_cast<double>(x_hat.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  const double v = std::max(x_hat.cwiseAbs().maxCoeff(), x_ref.cwiseAbs().maxCoeff());
  return 10.0 * std::log10(v * v / mse);
}

struct MetricRow {
  std::string solver;
  Index sparsity = 0;
  double range = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string status;
  std::string error;  ///< non-empty when the solver threw
  double time_s = 0.0;
  double rel_l2 = std::numeric_limits<double>::quiet_NaN();
  double abs_linf = std::numeric_limits<double>::quiet_NaN();
  bool exact_support = false;
  double psnr = std::numeric_limits<double>::quiet_NaN();

  bool ok() const { return error.empty(); }
};

inline void fill_errors(MetricRow& row, const Vector& x_hat, const SparseSignal& truth) {
  const Vector x_true = truth.dense();
  const Vector diff = x_hat - x_true;
  const double ref = x_true.norm();
  row.rel_l2 = ref > 0.0 ? diff.norm() / ref : diff.norm();
  row.abs_linf = diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
  row.exact_support = support_of(x_hat) == truth.support;
  row.psnr = psnr(x_hat, x_true);
}

inline double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// ---------------------------------------------------------------------------
// Running solvers
// ---------------------------------------------------------------------------

/// Runs one configured solver. Greedy methods are given the true T when the
/// instance carries ground truth; PDASC never sees it.
inline SolveReport run_solver(const SolverSpec& spec, const ProblemInstance& inst) {
  if (spec.name == "pdasc") {
    SolverConfig cfg = spec.pdasc;
    if (!cfg.discrepancy) cfg.discrepancy = std::max(inst.eps, spec.discrepancy_floor * inst.y.norm());
    SolveReport r = pdasc(inst.op, inst.y, cfg);
    r.solver = spec.id();
    return r;
  }
  if (spec.name == "oracle") {
    if (!inst.truth) throw ParameterError("oracle solver needs ground truth");
    SolveReport r;
    r.solver = spec.id();
    r.x = oracle_solution(inst.op, inst.truth->support, inst.y);
    r.support = support_of(r.x);
    r.status = SolveStatus::Converged;
    PathRecord rec;
    rec.k = 1;
    rec.active = inst.truth->support;
    rec.support = r.support;
    rec.inner_iters = 1;
    rec.residual = (inst.y - inst.op.apply(r.x)).norm();
    r.path.push_back(rec);
    return r;
  }
  GreedyConfig g = spec.greedy;
  if (inst.truth) g.sparsity = static_cast<Index>(inst.truth->sparsity());
  SolveReport r;
  if (spec.name == "omp") {
    r = omp(inst.op, inst.y, g);
  } else if (spec.name == "htp") {
    r = htp(inst.op, inst.y, g);
  } else if (spec.name == "iht" || spec.name == "aiht") {
    g.accelerated = spec.name == "aiht" || g.accelerated;
    r = iht(inst.op, inst.y, g);
  } else if (spec.name == "cosamp") {
    r = cosamp(inst.op, inst.y, g);
  } else {
    throw ParameterError("unknown solver '" + spec.name + "'");
  }
  r.solver = spec.id();
  return r;
}

/// Instance for trial `trial` of cell (T, R).
inline ProblemInstance make_trial_instance(const ExperimentConfig& cfg, Index sparsity,
                                           double range, int trial) {
  const std::uint64_t s = cfg.trial_seed(trial);
  const SensingOperator op = make_operator(cfg.matrix, cfg.n, cfg.p, derive_seed(s, "operator"));
  const SparseSignal truth = gen_sparse_signal(cfg.p, sparsity, range, derive_seed(s, "signal"));
  ProblemInstance inst = synthesize_instance(op, truth, cfg.sigma, derive_seed(s, "noise"));
  inst.seed = s;
  return inst;
}

/// Called once per (instance, solver) run with the solver's report; `report`
/// is null when the solver threw. Calls are serialized.
using TrialObserver = std::function<void(const ProblemInstance&, const SolverSpec&,
                                         const SolveReport* report)>;

/// Runs `count` tasks on `jobs` worker threads; task i writes only its own
/// result slot, so output order never depends on scheduling.
template <typename Result, typename Task>
std::vector<Result> run_ordered(std::size_t count, int jobs, Task task) {
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

namespace detail {
struct CellTrial {
  Index sparsity;
  double range;
  int trial;
};

inline std::vector<CellTrial> enumerate_trials(const ExperimentConfig& cfg) {
  std::vector<CellTrial> out;
  for (Index t : cfg.sparsity) {
    for (double r : cfg.range) {
      for (int k = 0; k < cfg.trials; ++k) out.push_back({t, r, k});
    }
  }
  return out;
}

inline std::vector<MetricRow> run_one_trial(const ExperimentConfig& cfg, const CellTrial& ct,
                                            const TrialObserver& observer,
                                            std::mutex& observer_mutex) {
  const ProblemInstance inst = make_trial_instance(cfg, ct.sparsity, ct.range, ct.trial);
  std::vector<MetricRow> rows;
  for (const SolverSpec& spec : cfg.solvers) {
    MetricRow row;
    row.solver = spec.id();
    row.sparsity = ct.sparsity;
    row.range = ct.range;
    row.trial = ct.trial;
    row.seed = inst.seed;
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const SolveReport rep = run_solver(spec, inst);
      const auto t1 = std::chrono::steady_clock::now();
      row.time_s = cfg.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
      row.status = to_string(rep.status);
      fill_errors(row, rep.x, *inst.truth);
      if (observer) {
        std::lock_guard<std::mutex> lock(observer_mutex);
        observer(inst, spec, &rep);
      }
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
      if (row.error.empty()) row.error = "unknown error";
      if (observer) {
        std::lock_guard<std::mutex> lock(observer_mutex);
        observer(inst, spec, nullptr);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}
}  // namespace detail

/// Every (T, R, trial, solver) run, in that order.
inline std::vector<MetricRow> run_trials(const ExperimentConfig& cfg,
                                         const TrialObserver& observer = {}) {
  cfg.validate();
  const std::vector<detail::CellTrial> plan = detail::enumerate_trials(cfg);
  std::mutex observer_mutex;
  const auto per_trial = run_ordered<std::vector<MetricRow>>(
      plan.size(), cfg.jobs,
      [&](std::size_t i) { return detail::run_one_trial(cfg, plan[i], observer, observer_mutex); });
  std::vector<MetricRow> rows;
  for (const auto& block : per_trial) rows.insert(rows.end(), block.begin(), block.end());
  return rows;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepCell {
  std::string solver;
  Index sparsity = 0;
  double range = 0.0;
  double sigma = 0.0;
  int trials = 0;
  int errors = 0;
  double recovery_prob = 0.0;  ///< errored trials count as failures
  double med_rel_l2 = 0.0;
  double med_abs_linf = 0.0;
  double med_time_s = 0.0;
};

struct SweepResult {
  std::vector<MetricRow> rows;
  std::vector<SweepCell> cells;  ///< ordered by T, R, then solver list order
  bool timing = true;
};

inline std::vector<SweepCell> aggregate(const ExperimentConfig& cfg,
                                        const std::vector<MetricRow>& rows) {
  std::vector<SweepCell> cells;
  for (Index t : cfg.sparsity) {
    for (double r : cfg.range) {
      for (const SolverSpec& spec : cfg.solvers) {
        SweepCell c;
        c.solver = spec.id();
        c.sparsity = t;
        c.range = r;
        c.sigma = cfg.sigma;
        std::vector<double> rel, linf, time;
        int hits = 0;
        for (const MetricRow& row : rows) {
          if (row.solver != c.solver || row.sparsity != t || row.range != r) continue;
          ++c.trials;
          if (!row.ok()) {
            ++c.errors;
            continue;
          }
          hits += row.exact_support ? 1 : 0;
          rel.push_back(row.rel_l2);
          linf.push_back(row.abs_linf);
          time.push_back(row.time_s);
        }
        c.recovery_prob = c.trials ? static_cast<double>(hits) / c.trials : 0.0;
        c.med_rel_l2 = median(rel);
        c.med_abs_linf = median(linf);
        c.med_time_s = median(time);
        cells.push_back(c);
      }
    }
  }
  return cells;
}

inline SweepResult run_sweep(const ExperimentConfig& cfg, const TrialObserver& observer = {}) {
  SweepResult res;
  res.rows = run_trials(cfg, observer);
  res.cells = aggregate(cfg, res.rows);
  res.timing = cfg.timing;
  return res;
}

namespace detail {
inline std::string time_field(double t, bool timing) { return timing ? format_double(t) : ""; }
}  // namespace detail

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "solver,T,R,sigma,trials,recovery_prob,med_rel_l2,med_abs_linf,med_time_s\n";
  for (const SweepCell& c : r.cells) {
    os << c.solver << ',' << c.sparsity << ',' << format_double(c.range) << ','
       << format_double(c.sigma) << ',' << c.trials << ',' << format_double(c.recovery_prob)
       << ',' << format_double(c.med_rel_l2) << ',' << format_double(c.med_abs_linf) << ','
       << detail::time_field(c.med_time_s, r.timing) << '\n';
  }
}

/// Per-run rows: one line per (T, R, trial, solver).
inline void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& rows,
                              bool timing = true) {
  os << "solver,T,R,trial,seed,status,time_s,rel_l2,abs_linf,exact_support,psnr,error\n";
  for (const MetricRow& m : rows) {
    std::string err = m.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << m.solver << ',' << m.sparsity << ',' << format_double(m.range) << ',' << m.trial
       << ',' << m.seed << ',' << m.status << ',' << detail::time_field(m.time_s, timing) << ','
       << format_double(m.rel_l2) << ',' << format_double(m.abs_linf) << ','
       << (m.exact_support ? 1 : 0) << ',' << format_double(m.psnr) << ',' << err << '\n';
  }
}

// ---------------------------------------------------------------------------
// Bench
// ---------------------------------------------------------------------------

struct BenchRow {
  std::string solver;
  Index p = 0;
  Index n = 0;
  Index sparsity = 0;
  double range = 0.0;
  double med_time_s = 0.0;
  double med_rel_l2 = 0.0;
  double med_abs_linf = 0.0;
};

struct BenchResult {
  std::vector<MetricRow> rows;
  std::vector<BenchRow> table;
  bool timing = true;
};

inline BenchResult run_bench(const ExperimentConfig& cfg, const TrialObserver& observer = {}) {
  BenchResult res;
  res.rows = run_trials(cfg, observer);
  res.timing = cfg.timing;
  for (const SweepCell& c : aggregate(cfg, res.rows)) {
    res.table.push_back(
        {c.solver, cfg.p, cfg.n, c.sparsity, c.range, c.med_time_s, c.med_rel_l2, c.med_abs_linf});
  }
  return res;
}

inline void write_bench_csv(std::ostream& os, const BenchResult& r) {
  os << "solver,p,n,T,R,med_time_s,med_rel_l2,med_abs_linf\n";
  for (const BenchRow& b : r.table) {
    os << b.solver << ',' << b.p << ',' << b.n << ',' << b.sparsity << ','
       << format_double(b.range) << ',' << detail::time_field(b.med_time_s, r.timing) << ','
       << format_double(b.med_rel_l2) << ',' << format_double(b.med_abs_linf) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

struct TraceRow {
  int k = 0;
  std::optional<double> lambda;
  std::size_t in_true = 0;   ///< |A_k ∩ A*|
  std::size_t out_true = 0;  ///< |A_k \ A*|
  int inner_iters = 0;
  double residual = 0.0;
};

inline std::vector<TraceRow> trace_rows(const SolveReport& report, const IndexSet& truth) {
  std::vector<TraceRow> rows;
  for (const PathRecord& rec : report.path) {
    const std::size_t in = intersection_size(rec.active, truth);
    rows.push_back({rec.k, rec.lambda, in, rec.active.size() - in, rec.inner_iters, rec.residual});
  }
  return rows;
}

struct TraceResult {
  ProblemInstance instance;
  SolveReport report;
  std::vector<TraceRow> rows;
};

/// Active-set evolution of the first PDASC solver in `cfg` (default settings
/// if none is listed) on trial 0 of the first (T, R) cell.
inline TraceResult run_trace(const ExperimentConfig& cfg) {
  cfg.validate();
  SolverSpec spec = pdasc_spec(100, 5);
  for (const SolverSpec& s : cfg.solvers) {
    if (s.name == "pdasc") {
      spec = s;
      break;
    }
  }
  ProblemInstance inst = make_trial_instance(cfg, cfg.sparsity.front(), cfg.range.front(), 0);
  SolveReport rep = run_solver(spec, inst);
  std::vector<TraceRow> rows = trace_rows(rep, inst.truth->support);
  return {std::move(inst), std::move(rep), std::move(rows)};
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "k,lambda,in_true,out_true,inner_iters,residual\n";
  for (const TraceRow& r : rows) {
    os << r.k << ',' << (r.lambda ? format_double(*r.lambda) : "") << ',' << r.in_true << ','
       << r.out_true << ',' << r.inner_iters << ',' << format_double(r.residual) << '\n';
  }
}

}  // namespace l0pdas
