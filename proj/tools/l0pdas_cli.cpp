// Command-line front end: gen, solve, sweep, trace, bench, certify.
//
// Exit codes: 0 success, 2 configuration or parameter error, 3 capacity
// error, 1 anything else.

#include "l0pdas/l0pdas.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace l0pdas;

enum class Format { Csv, Json };

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;  // empty: stdout
  std::string format = "csv";
  std::string config;

  Format fmt() const { return format == "json" ? Format::Json : Format::Csv; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Base random seed");
  cmd->add_option("--out", c.out, "Output file (default: stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--config", c.config, "JSON experiment config");
}

/// Writes through `fn` to the --out file or stdout.
template <typename Fn>
void emit(const std::string& path, Fn fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParameterError("cannot open '" + path + "' for writing");
  fn(os);
  if (!os) throw Error("write to '" + path + "' failed");
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot open '" + path + "'");
  try {
    return Json::parse(is);
  } catch (const Json::exception& e) {
    throw ParameterError("'" + path + "': " + e.what());
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

SensingOperator read_operator_file(const std::string& path) {
  if (ends_with(path, ".csv")) {
    std::ifstream is(path);
    if (!is) throw ParameterError("cannot open '" + path + "'");
    return read_operator_csv(is);
  }
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParameterError("cannot open '" + path + "'");
  return read_operator_binary(is);
}

void write_operator_file(const std::string& path, const SensingOperator& op) {
  if (ends_with(path, ".csv")) {
    emit(path, [&](std::ostream& os) { write_operator_csv(os, op); });
  } else {
    emit(path, [&](std::ostream& os) { write_operator_binary(os, op); });
  }
}

// ---------------------------------------------------------------------------
// Experiment configs and flag overrides
// ---------------------------------------------------------------------------

struct ExperimentFlags {
  std::string matrix;
  std::optional<Index> n, p;
  std::vector<Index> sparsity;
  std::vector<double> range;
  std::optional<double> sigma;
  std::optional<int> trials, jobs;
  std::vector<std::string> solvers;
  bool no_timing = false;
  std::string metrics_out;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--matrix", f.matrix, "gaussian | bernoulli | partial-dct");
  cmd->add_option("--n", f.n, "Number of measurements");
  cmd->add_option("--p", f.p, "Signal dimension");
  cmd->add_option("--T", f.sparsity, "Sparsity level(s)");
  cmd->add_option("--R", f.range, "Dynamic range(s)");
  cmd->add_option("--sigma", f.sigma, "Noise standard deviation");
  cmd->add_option("--trials", f.trials, "Trials per cell");
  cmd->add_option("--jobs", f.jobs, "Worker threads");
  cmd->add_option("--solver", f.solvers,
                  "Solver(s): pdasc, omp, htp, iht, aiht, cosamp, oracle");
  cmd->add_flag("--no-timing", f.no_timing, "Leave wall-time columns empty");
  cmd->add_option("--metrics-out", f.metrics_out, "Also write per-trial rows to this CSV");
}

ExperimentConfig build_experiment(const Common& c, const ExperimentFlags& f) {
  ExperimentConfig cfg;
  if (!c.config.empty()) {
    cfg = experiment_from_json(read_json_file(c.config));
  } else {
    cfg.n = 128;
    cfg.p = 256;
    cfg.sparsity = {10};
    cfg.range = {10.0};
    cfg.trials = 10;
    cfg.solvers = {pdasc_spec(100, 5)};
  }
  if (!f.matrix.empty()) cfg.matrix = parse_matrix_kind(f.matrix);
  if (f.n) cfg.n = *f.n;
  if (f.p) cfg.p = *f.p;
  if (!f.sparsity.empty()) cfg.sparsity = f.sparsity;
  if (!f.range.empty()) cfg.range = f.range;
  if (f.sigma) cfg.sigma = *f.sigma;
  if (f.trials) cfg.trials = *f.trials;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (c.seed) cfg.seed = *c.seed;
  if (!f.solvers.empty()) {
    cfg.solvers.clear();
    for (const std::string& s : f.solvers) {
      cfg.solvers.push_back(s == "pdasc" ? pdasc_spec(100, 5) : baseline_spec(s));
    }
  }
  if (f.no_timing) cfg.timing = false;
  cfg.validate();
  return cfg;
}

Json metric_json(const MetricRow& m, bool timing) {
  Json j{{"solver", m.solver},     {"T", m.sparsity},         {"R", m.range},
         {"trial", m.trial},       {"seed", m.seed},          {"status", m.status},
         {"rel_l2", m.rel_l2},     {"abs_linf", m.abs_linf},  {"exact_support", m.exact_support},
         {"psnr", std::isfinite(m.psnr) ? Json(m.psnr) : Json(nullptr)}};
  j["time_s"] = timing ? Json(m.time_s) : Json(nullptr);
  if (!m.ok()) j["error"] = m.error;
  return j;
}

void maybe_write_metrics(const ExperimentFlags& f, const std::vector<MetricRow>& rows,
                         bool timing) {
  if (f.metrics_out.empty()) return;
  emit(f.metrics_out, [&](std::ostream& os) { write_metrics_csv(os, rows, timing); });
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string matrix = "gaussian";
  Index n = 64, p = 128, sparsity = 5;
  double range = 10.0, sigma = 0.0;
  std::string op_out;
};

int cmd_gen(const Common& c, const GenArgs& g) {
  ExperimentConfig cfg;
  if (!c.config.empty()) cfg = experiment_from_json(read_json_file(c.config));
  cfg.matrix = parse_matrix_kind(g.matrix);
  cfg.n = g.n;
  cfg.p = g.p;
  cfg.sparsity = {g.sparsity};
  cfg.range = {g.range};
  cfg.sigma = g.sigma;
  cfg.solvers = {pdasc_spec(100, 5)};
  cfg.seed = c.seed.value_or(cfg.seed);
  cfg.validate();
  const ProblemInstance inst = make_trial_instance(cfg, g.sparsity, g.range, 0);

  Json j = instance_to_json(inst);
  if (inst.op.kind() == OperatorKind::PartialDct) j["dct_rows"] = inst.op.dct_rows();
  if (!g.op_out.empty()) {
    write_operator_file(g.op_out, inst.op);
    j["operator_file"] = g.op_out;
  } else if (inst.op.kind() != OperatorKind::PartialDct) {
    const Matrix m = inst.op.to_dense();
    j["operator"] = std::vector<double>(m.data(), m.data() + m.size());
  }
  emit(c.out, [&](std::ostream& os) {
    if (c.fmt() == Format::Json) {
      os << j.dump(2) << '\n';
    } else {
      os << "index,value\n";
      for (std::size_t k = 0; k < inst.truth->support.size(); ++k) {
        os << inst.truth->support[k] << ',' << format_double(inst.truth->values[static_cast<Index>(k)])
           << '\n';
      }
    }
  });
  return 0;
}

// ---------------------------------------------------------------------------
// solve / certify: load an instance
// ---------------------------------------------------------------------------

struct InstanceArgs {
  std::string instance;
  std::string op_file;
};

void add_instance_flags(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("--instance", a.instance, "Instance JSON written by `gen`");
  cmd->add_option("--operator", a.op_file, "Operator file (binary, or .csv)");
}

ProblemInstance load_instance(const InstanceArgs& a) {
  if (a.instance.empty()) throw ParameterError("--instance is required");
  const Json j = read_json_file(a.instance);
  std::optional<SensingOperator> op;
  if (!a.op_file.empty()) {
    op = read_operator_file(a.op_file);
  } else if (j.contains("dct_rows")) {
    op = SensingOperator::partial_dct(j.at("p").get<Index>(), j.at("dct_rows").get<IndexSet>());
  } else if (j.contains("operator_file")) {
    op = read_operator_file(j.at("operator_file").get<std::string>());
  } else if (j.contains("operator")) {
    const auto data = j.at("operator").get<std::vector<double>>();
    const Index n = j.at("n").get<Index>(), p = j.at("p").get<Index>();
    if (static_cast<Index>(data.size()) != n * p) {
      throw DimensionError("embedded operator must hold n*p values");
    }
    Matrix m = Eigen::Map<const Matrix>(data.data(), n, p);
    const bool unit = detail::has_unit_columns(m);
    op = SensingOperator::dense(std::move(m), unit);
  } else {
    throw ParameterError("no operator: pass --operator");
  }
  return instance_from_json(j, *op);
}

struct SolveArgs {
  std::string solver = "pdasc";
  int grid_size = 100, max_inner = 5;
  std::optional<double> eps;
  std::optional<Index> sparsity;
  std::string lsq = "direct";
};

int cmd_solve(const Common& c, const InstanceArgs& ia, const SolveArgs& s) {
  ProblemInstance inst = load_instance(ia);
  if (s.eps) inst.eps = *s.eps;
  SolverSpec spec;
  if (!c.config.empty()) {
    spec = solver_spec_from_json(read_json_file(c.config));
  } else {
    spec = s.solver == "pdasc" ? pdasc_spec(s.grid_size, s.max_inner) : baseline_spec(s.solver);
    if (s.lsq == "cg") spec.pdasc.lsq.method = LsqMethod::Iterative;
  }
  if (s.sparsity) {
    spec.greedy.sparsity = *s.sparsity;
    if (spec.name != "pdasc") inst.truth.reset();  // use the given T, not the stored one
  }
  const IndexSet* truth = inst.truth ? &inst.truth->support : nullptr;
  const SolveReport rep = run_solver(spec, inst);
  emit(c.out, [&](std::ostream& os) {
    if (c.fmt() == Format::Json) {
      os << report_to_json(rep, truth).dump(2) << '\n';
    } else {
      write_report_csv(os, rep, truth);
    }
  });
  std::cerr << rep.solver << ": " << to_string(rep.status) << ", |supp| = " << rep.support.size()
            << ", residual = " << rep.final_residual() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// sweep / trace / bench
// ---------------------------------------------------------------------------

int cmd_sweep(const Common& c, const ExperimentFlags& f) {
  const ExperimentConfig cfg = build_experiment(c, f);
  const SweepResult res = run_sweep(cfg);
  maybe_write_metrics(f, res.rows, cfg.timing);
  emit(c.out, [&](std::ostream& os) {
    if (c.fmt() == Format::Json) {
      Json cells = Json::array();
      for (const SweepCell& s : res.cells) {
        cells.push_back({{"solver", s.solver},
                         {"T", s.sparsity},
                         {"R", s.range},
                         {"sigma", s.sigma},
                         {"trials", s.trials},
                         {"errors", s.errors},
                         {"recovery_prob", s.recovery_prob},
                         {"med_rel_l2", s.med_rel_l2},
                         {"med_abs_linf", s.med_abs_linf},
                         {"med_time_s", cfg.timing ? Json(s.med_time_s) : Json(nullptr)}});
      }
      Json rows = Json::array();
      for (const MetricRow& m : res.rows) rows.push_back(metric_json(m, cfg.timing));
      os << Json{{"cells", cells}, {"rows", rows}}.dump(2) << '\n';
    } else {
      write_sweep_csv(os, res);
    }
  });
  return 0;
}

int cmd_trace(const Common& c, const ExperimentFlags& f) {
  const ExperimentConfig cfg = build_experiment(c, f);
  const TraceResult res = run_trace(cfg);
  emit(c.out, [&](std::ostream& os) {
    if (c.fmt() == Format::Json) {
      Json rows = Json::array();
      for (const TraceRow& r : res.rows) {
        rows.push_back({{"k", r.k},
                        {"lambda", r.lambda ? Json(*r.lambda) : Json(nullptr)},
                        {"in_true", r.in_true},
                        {"out_true", r.out_true},
                        {"inner_iters", r.inner_iters},
                        {"residual", r.residual}});
      }
      os << Json{{"status", to_string(res.report.status)}, {"trace", rows}}.dump(2) << '\n';
    } else {
      write_trace_csv(os, res.rows);
    }
  });
  return 0;
}

int cmd_bench(const Common& c, const ExperimentFlags& f) {
  const ExperimentConfig cfg = build_experiment(c, f);
  const BenchResult res = run_bench(cfg);
  maybe_write_metrics(f, res.rows, cfg.timing);
  emit(c.out, [&](std::ostream& os) {
    if (c.fmt() == Format::Json) {
      Json rows = Json::array();
      for (const BenchRow& b : res.table) {
        rows.push_back({{"solver", b.solver},
                        {"p", b.p},
                        {"n", b.n},
                        {"T", b.sparsity},
                        {"R", b.range},
                        {"med_time_s", cfg.timing ? Json(b.med_time_s) : Json(nullptr)},
                        {"med_rel_l2", b.med_rel_l2},
                        {"med_abs_linf", b.med_abs_linf}});
      }
      os << rows.dump(2) << '\n';
    } else {
      write_bench_csv(os, res);
    }
  });
  return 0;
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::optional<double> rho;
  std::string bounds_out;
};

int cmd_certify(const Common& c, const InstanceArgs& ia, const ExperimentFlags& f,
                const CertifyArgs& a) {
  ProblemInstance inst = [&] {
    if (!ia.instance.empty()) return load_instance(ia);
    const ExperimentConfig cfg = build_experiment(c, f);
    return make_trial_instance(cfg, cfg.sparsity.front(), cfg.range.front(), 0);
  }();
  if (!inst.truth) throw ParameterError("certify needs an instance with ground truth");
  const TheoryCertificate cert = certify(inst.op, *inst.truth, inst.eps, a.rho);
  if (!a.bounds_out.empty()) {
    const BoundReport rep = check_onestep_bounds_mip(inst, {}, cert.nu, 1e-10);
    emit(a.bounds_out, [&](std::ostream& os) { write_bound_report_csv(os, rep); });
  }
  const Json j = certificate_to_json(cert);
  emit(c.out, [&](std::ostream& os) {
    if (c.fmt() == Format::Json) {
      os << j.dump(2) << '\n';
    } else {
      os << "field,value\n";
      for (auto it = j.begin(); it != j.end(); ++it) os << it.key() << ',' << it.value().dump() << '\n';
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse recovery by l0-regularized least squares (PDASC) and greedy baselines"};
  app.require_subcommand(1);

  Common common;
  GenArgs gen_args;
  InstanceArgs inst_args;
  SolveArgs solve_args;
  ExperimentFlags exp_flags;
  CertifyArgs cert_args;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  add_common(gen, common);
  gen->add_option("--matrix", gen_args.matrix, "gaussian | bernoulli | partial-dct");
  gen->add_option("--n", gen_args.n, "Number of measurements");
  gen->add_option("--p", gen_args.p, "Signal dimension");
  gen->add_option("--T", gen_args.sparsity, "Sparsity level");
  gen->add_option("--R", gen_args.range, "Dynamic range");
  gen->add_option("--sigma", gen_args.sigma, "Noise standard deviation");
  gen->add_option("--operator-out", gen_args.op_out, "Write the operator here (binary, or .csv)");

  auto* solve = app.add_subcommand("solve", "Solve one instance");
  add_common(solve, common);
  add_instance_flags(solve, inst_args);
  solve->add_option("--solver", solve_args.solver, "pdasc, omp, htp, iht, aiht, cosamp, oracle");
  solve->add_option("--N", solve_args.grid_size, "PDASC grid subintervals");
  solve->add_option("--J-max", solve_args.max_inner, "PDASC inner iteration cap");
  solve->add_option("--eps", solve_args.eps, "Noise level for the discrepancy stop");
  solve->add_option("--T", solve_args.sparsity, "Sparsity for greedy solvers");
  solve->add_option("--lsq", solve_args.lsq, "direct | cg")->check(CLI::IsMember({"direct", "cg"}));

  auto* sweep = app.add_subcommand("sweep", "Recovery-probability sweep");
  add_common(sweep, common);
  add_experiment_flags(sweep, exp_flags);

  auto* trace = app.add_subcommand("trace", "Active-set evolution along the path");
  add_common(trace, common);
  add_experiment_flags(trace, exp_flags);

  auto* bench = app.add_subcommand("bench", "Timing and error table");
  add_common(bench, common);
  add_experiment_flags(bench, exp_flags);

  auto* cert = app.add_subcommand("certify", "Evaluate coherence-based recovery conditions");
  add_common(cert, common);
  add_instance_flags(cert, inst_args);
  add_experiment_flags(cert, exp_flags);
  cert->add_option("--rho", cert_args.rho, "Decay factor to test");
  cert->add_option("--bounds-out", cert_args.bounds_out, "Write first-step bound checks (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) return cmd_gen(common, gen_args);
    if (*solve) return cmd_solve(common, inst_args, solve_args);
    if (*sweep) return cmd_sweep(common, exp_flags);
    if (*trace) return cmd_trace(common, exp_flags);
    if (*bench) return cmd_bench(common, exp_flags);
    if (*cert) return cmd_certify(common, inst_args, exp_flags, cert_args);
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return 3;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
