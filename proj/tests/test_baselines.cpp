#include "l0pdas/baselines.hpp"
#include "l0pdas/problem_model.hpp"
#include "l0pdas/theory.hpp"

#include <gtest/gtest.h>

using namespace l0pdas;

namespace {

Matrix random_orthogonal(Index n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) a(i, j) = g(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(n, n);
}

// Textbook OMP: full QR refit after every selection.
Vector naive_omp(const Matrix& m, const Vector& y, Index t, std::vector<Index>& order) {
  Vector r = y;
  Vector z;
  order.clear();
  for (Index k = 0; k < t; ++k) {
    const Vector c = m.transpose() * r;
    Index best = -1;
    double val = -1.0;
    for (Index i = 0; i < c.size(); ++i) {
      if (std::find(order.begin(), order.end(), i) == order.end() && std::abs(c[i]) > val) {
        val = std::abs(c[i]);
        best = i;
      }
    }
    order.push_back(best);
    Matrix sub(m.rows(), k + 1);
    for (Index j = 0; j <= k; ++j) sub.col(j) = m.col(order[j]);
    z = sub.colPivHouseholderQr().solve(y);
    r = y - sub * z;
  }
  Vector x = Vector::Zero(m.cols());
  for (Index j = 0; j < t; ++j) x[order[j]] = z[j];
  return x;
}

using Runner = SolveReport (*)(const SensingOperator&, const Vector&, const GreedyConfig&);

SolveReport run_htp(const SensingOperator& op, const Vector& y, const GreedyConfig& c) {
  return htp(op, y, c);
}
SolveReport run_aiht(const SensingOperator& op, const Vector& y, const GreedyConfig& c) {
  GreedyConfig a = c;
  a.accelerated = true;
  return iht(op, y, a);
}

const std::vector<std::pair<std::string, Runner>>& all_baselines() {
  static const std::vector<std::pair<std::string, Runner>> list{
      {"omp", &omp}, {"htp", &run_htp}, {"iht", &iht}, {"aiht", &run_aiht}, {"cosamp", &cosamp}};
  return list;
}

}  // namespace

TEST(Baselines, OutputIsAtMostTSparse) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SensingOperator op = gen_gaussian_operator(40, 100, seed);
    const ProblemInstance inst =
        synthesize_instance(op, gen_sparse_signal(100, 8, 100.0, seed + 10), 0.05, seed + 20);
    GreedyConfig cfg;
    cfg.sparsity = 8;
    for (const auto& [name, run] : all_baselines()) {
      const SolveReport r = run(op, inst.y, cfg);
      EXPECT_LE(r.support.size(), 8u) << name;
      EXPECT_EQ(r.support, support_of(r.x)) << name;
    }
  }
}

TEST(Baselines, OrthonormalNoiselessAgreeOnSupport) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SensingOperator op = SensingOperator::dense(random_orthogonal(16, seed), true);
    const SparseSignal s = gen_sparse_signal(16, 4, 10.0, seed + 30);
    const ProblemInstance inst = synthesize_instance(op, s, 0.0, 0);
    GreedyConfig cfg;
    cfg.sparsity = 4;
    for (const auto& [name, run] : all_baselines()) {
      const SolveReport r = run(op, inst.y, cfg);
      EXPECT_EQ(r.support, s.support) << name;
      EXPECT_LT((r.x - s.dense()).norm(), 1e-8) << name;
    }
  }
}

TEST(Baselines, IncoherentNoiselessRecovery) {
  int certified = 0;
  for (std::uint64_t seed = 0; seed < 40 && certified < 10; ++seed) {
    const SensingOperator op = gen_gaussian_operator(200, 220, seed);
    const SparseSignal s = gen_sparse_signal(220, 1, 1.0, seed + 7);
    if (!certify(op, s, 0.0).mip_conv_ok) continue;
    ++certified;
    const ProblemInstance inst = synthesize_instance(op, s, 0.0, 0);
    GreedyConfig cfg;
    cfg.sparsity = 1;
    for (const auto& [name, run] : all_baselines()) {
      EXPECT_EQ(run(op, inst.y, cfg).support, s.support) << name;
    }
  }
  EXPECT_GT(certified, 0);
}

TEST(Omp, SupportGrowsByOneAndMatchesTextbookVersion) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SensingOperator op = gen_gaussian_operator(50, 120, seed);
    const ProblemInstance inst =
        synthesize_instance(op, gen_sparse_signal(120, 10, 10.0, seed + 1), 0.01, seed + 2);
    GreedyConfig cfg;
    cfg.sparsity = 10;
    const SolveReport r = omp(op, inst.y, cfg);
    ASSERT_EQ(r.path.size(), 10u);
    for (std::size_t k = 0; k < r.path.size(); ++k) {
      EXPECT_EQ(r.path[k].active.size(), k + 1);
      if (k) EXPECT_TRUE(is_subset(r.path[k - 1].active, r.path[k].active));
    }
    std::vector<Index> order;
    const Vector ref = naive_omp(op.to_dense(), inst.y, 10, order);
    EXPECT_EQ(r.support, make_index_set(order));
    EXPECT_LT((r.x - ref).norm(), 1e-9 * ref.norm());
  }
}

TEST(Htp, TrueSupportWarmStartIsFixedPoint) {
  const SensingOperator op = gen_gaussian_operator(60, 120, 4);
  const SparseSignal s = gen_sparse_signal(120, 5, 10.0, 5);
  const ProblemInstance inst = synthesize_instance(op, s, 0.0, 0);
  GreedyConfig cfg;
  cfg.sparsity = 5;
  const SolveReport r = htp(op, inst.y, cfg, s.dense());
  EXPECT_EQ(r.status, SolveStatus::Converged);
  EXPECT_TRUE(r.path.empty());
  EXPECT_EQ(r.support, s.support);
}

TEST(Iht, ResidualNeverIncreasesWhenAccelerated) {
  const SensingOperator op = gen_gaussian_operator(80, 200, 6);
  const ProblemInstance inst =
      synthesize_instance(op, gen_sparse_signal(200, 10, 50.0, 7), 1e-3, 8);
  GreedyConfig cfg;
  cfg.sparsity = 10;
  cfg.accelerated = true;
  const SolveReport r = iht(op, inst.y, cfg);
  double prev = inst.y.norm();
  for (const PathRecord& rec : r.path) {
    EXPECT_LE(rec.residual, prev * (1 + 1e-12));
    prev = rec.residual;
  }
  EXPECT_EQ(r.solver, "aiht");
}

TEST(Baselines, RejectBadConfig) {
  const SensingOperator op = gen_gaussian_operator(10, 20, 1);
  GreedyConfig cfg;
  cfg.sparsity = 0;
  EXPECT_THROW(omp(op, Vector::Ones(10), cfg), ParameterError);
  cfg.sparsity = 11;
  EXPECT_THROW(cosamp(op, Vector::Ones(10), cfg), ParameterError);
  cfg.sparsity = 2;
  cfg.step = 0.0;
  EXPECT_THROW(iht(op, Vector::Ones(10), cfg), ParameterError);
  cfg.step = 1.0;
  EXPECT_THROW(htp(op, Vector::Ones(9), cfg), DimensionError);
}
