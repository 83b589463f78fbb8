#include "l0pdas/problem_model.hpp"
#include "l0pdas/solver.hpp"
#include "l0pdas/theory.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace l0pdas;

namespace {

double pairwise_coherence(const Matrix& m) {
  double nu = 0.0;
  for (Index i = 0; i < m.cols(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) nu = std::max(nu, std::abs(m.col(i).dot(m.col(j))));
  }
  return nu;
}

// Recursive subset walk with singular values from a Jacobi SVD.
void rip_walk(const Matrix& m, Index s, Index start, std::vector<Index>& cur, double& delta) {
  if (static_cast<Index>(cur.size()) == s) {
    Matrix sub(m.rows(), s);
    for (Index k = 0; k < s; ++k) sub.col(k) = m.col(cur[k]);
    const Eigen::JacobiSVD<Matrix> svd(sub);
    const auto& sv = svd.singularValues();
    const double smin = sub.rows() >= s ? sv(s - 1) : 0.0;
    delta = std::max({delta, sv(0) * sv(0) - 1.0, 1.0 - smin * smin});
    return;
  }
  for (Index i = start; i < m.cols(); ++i) {
    cur.push_back(i);
    rip_walk(m, s, i + 1, cur, delta);
    cur.pop_back();
  }
}

double rip_oracle(const Matrix& m, Index s) {
  std::vector<Index> cur;
  double delta = 0.0;
  rip_walk(m, s, 0, cur, delta);
  return delta;
}

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

SensingOperator example_pair(double mu) {
  const double s = 1.0 / std::sqrt(1.0 + mu * mu);
  Matrix m(2, 2);
  m << s, mu * s, mu * s, s;
  return SensingOperator::dense(m, true);
}

}  // namespace

// ---------------------------------------------------------------------------
// Coherence and RIP
// ---------------------------------------------------------------------------

TEST(MutualCoherence, HandValues) {
  EXPECT_NEAR(mutual_coherence(SensingOperator::dense(random_orthogonal(6, 1), true)), 0.0, 1e-14);
  Matrix m(2, 2);
  m << 1, 1 / std::sqrt(2.0), 0, 1 / std::sqrt(2.0);
  EXPECT_NEAR(mutual_coherence(SensingOperator::dense(m, true)), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(mutual_coherence(example_pair(-0.5)), 0.8, 1e-15);
}

TEST(MutualCoherence, MatchesPairScan) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SensingOperator op = gen_gaussian_operator(30, 700, s);  // crosses the block size
    EXPECT_NEAR(mutual_coherence(op), pairwise_coherence(op.to_dense()), 1e-14);
  }
  const SensingOperator dct = gen_partial_dct_operator(20, 64, 3);
  EXPECT_NEAR(mutual_coherence(dct), pairwise_coherence(dct.to_dense()), 1e-13);
}

TEST(MutualCoherence, CapacityGuard) {
  const SensingOperator op = gen_gaussian_operator(5, 50, 1);
  EXPECT_THROW(mutual_coherence(op, 40), CapacityError);
  EXPECT_THROW(mutual_coherence(gen_gaussian_operator(1, 1, 1)), DimensionError);
}

TEST(Rip, MatchesSvdEnumeration) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SensingOperator op = gen_gaussian_operator(8, 12, seed);
    const Matrix m = op.to_dense();
    for (Index s = 1; s <= 3; ++s) {
      EXPECT_NEAR(rip_constant_bruteforce(op, s), rip_oracle(m, s), 1e-12);
    }
  }
}

TEST(Rip, TrivialLevels) {
  const SensingOperator q = SensingOperator::dense(random_orthogonal(6, 3), true);
  for (Index s = 1; s <= 6; ++s) EXPECT_NEAR(rip_constant_bruteforce(q, s), 0.0, 1e-12);
  EXPECT_NEAR(rip_constant_bruteforce(gen_gaussian_operator(5, 9, 2), 1), 0.0, 1e-14);
}

TEST(Rip, NonDecreasingInLevel) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RipTable t = rip_table(gen_gaussian_operator(8, 12, 100 + seed), 4);
    for (Index s = 1; s < 4; ++s) EXPECT_LE(t.at(s), t.at(s + 1) + 1e-14);
  }
}

TEST(Rip, CapacityGuard) {
  EXPECT_THROW(rip_constant_bruteforce(gen_gaussian_operator(5, 40, 1), 5, 1000), CapacityError);
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

TEST(Certify, OrthonormalNoiseless) {
  const SensingOperator op = SensingOperator::dense(random_orthogonal(8, 4), true);
  const SparseSignal s = gen_sparse_signal(8, 2, 3.0, 5);
  const TheoryCertificate c = certify(op, s, 0.0, 0.5);
  EXPECT_NEAR(c.nu, 0.0, 1e-14);
  EXPECT_EQ(c.beta, 0.0);
  EXPECT_TRUE(c.noise_ok);
  EXPECT_TRUE(c.mip_cwm_ok);
  EXPECT_TRUE(c.mip_conv_ok);
  EXPECT_NEAR(c.rho_lower, 0.0, 1e-26);
  EXPECT_TRUE(c.rho_admissible);
}

TEST(Certify, ContinuationFactorsClosedForm) {
  const TheoryCertificate c = certify_values(0.1, 2, 0.0, 1.0, 0.25);
  ASSERT_TRUE(c.rho_admissible);
  EXPECT_NEAR(*c.s1, 2.5, 1e-12);
  EXPECT_NEAR(*c.s2, 1.25, 1e-12);
  EXPECT_LT(1.0 / 0.9, *c.s2);
  EXPECT_LT(*c.s1, 1.0 / 0.2);
}

TEST(Certify, CoherenceGateFails) {
  const TheoryCertificate c = certify_values(0.4, 2, 0.0, 1.0, 0.5);
  EXPECT_FALSE(c.mip_conv_ok);
  EXPECT_FALSE(c.s1.has_value());
  EXPECT_FALSE(c.suggested_rho().has_value());
}

TEST(Certify, LargeNoiseFailsAssumption) {
  const TheoryCertificate c = certify_values(0.01, 2, 0.6, 1.0, 0.5);
  EXPECT_FALSE(c.noise_ok);
  EXPECT_FALSE(c.s1.has_value());
  EXPECT_FALSE(c.s2.has_value());
}

TEST(Certify, FactorRelationsRoundTrip) {
  Rng rng = make_rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    const Index t = 1 + static_cast<Index>(u(rng) * 5);
    const double nu = 0.3 * u(rng) / t;
    const double beta = 0.2 * u(rng);
    const double rho = u(rng);
    const TheoryCertificate c = certify_values(nu, t, beta, 1.0, rho);
    if (!c.rho_admissible) continue;
    ++checked;
    const double s1 = *c.s1, s2 = *c.s2;
    EXPECT_NEAR(s2, 1.0 + (t * nu - nu + beta) * s1, 1e-12 * s1);
    EXPECT_NEAR(s2 / s1, std::sqrt(rho), 1e-12);
    EXPECT_LT(s1, 1.0 / (t * nu + beta));
    EXPECT_GT(s1, s2);
    EXPECT_GT(s2, 1.0 / (1.0 - t * nu + nu - beta));
  }
  EXPECT_GT(checked, 200);
}

TEST(Certify, SuggestedDecayIsAdmissible) {
  const TheoryCertificate c = certify_values(0.05, 3, 0.01, 1.0, std::nullopt);
  ASSERT_TRUE(c.suggested_rho().has_value());
  const TheoryCertificate d = certify_values(0.05, 3, 0.01, 1.0, c.suggested_rho());
  EXPECT_TRUE(d.rho_admissible);
}

// ---------------------------------------------------------------------------
// Lambda window
// ---------------------------------------------------------------------------

TEST(LambdaWindow, CoherenceForm) {
  EXPECT_NEAR(*xi_interval_mip(0.1, 2, 0.0, 1.0), 0.2, 1e-15);
  EXPECT_NEAR(*xi_interval_mip(0.0, 1, 0.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(*xi_interval_mip(0.0, 1, 0.0, 3.0), 4.5, 1e-14);
  EXPECT_FALSE(xi_interval_mip(0.3, 2, 0.0, 1.0).has_value());   // nu >= 1/5
  EXPECT_FALSE(xi_interval_mip(0.0, 2, 0.25, 1.0).has_value());  // beta > 1/5
}

TEST(LambdaWindow, RipForm) {
  EXPECT_NEAR(*xi_interval_rip(0.0, 2, 0.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(*xi_interval_rip(0.1, 2, 0.0, 1.0), 0.45 - 0.01 / 0.9, 1e-15);
  EXPECT_NEAR(*xi_interval_rip(0.1, 2, 0.0, 1.0), 0.43889, 1e-5);
  EXPECT_FALSE(xi_interval_rip(0.4, 2, 0.0, 1.0).has_value());
  EXPECT_FALSE(xi_interval_rip(0.0, 2, 0.3, 1.0).has_value());
}

TEST(LambdaWindow, ExceedsNoiseFloorWhenApplicable) {
  Rng rng = make_rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 2000; ++rep) {
    const Index t = 1 + static_cast<Index>(u(rng) * 4);
    const double nu = 0.5 * u(rng) / t, beta = 0.3 * u(rng), m = 0.5 + 2 * u(rng);
    const auto xi = xi_interval_mip(nu, t, beta, m);
    if (xi) EXPECT_GT(*xi, 0.5 * std::pow(beta * m, 2));
  }
}

// ---------------------------------------------------------------------------
// Oracle solution and exhaustive minimization
// ---------------------------------------------------------------------------

TEST(OracleSolution, NoiselessAndOrthonormal) {
  const SensingOperator op = gen_gaussian_operator(20, 40, 1);
  const SparseSignal s = gen_sparse_signal(40, 5, 10.0, 2);
  const ProblemInstance inst = synthesize_instance(op, s, 0.0, 3);
  EXPECT_LT((oracle_solution(op, s.support, inst.y) - s.dense()).norm(), 1e-10);

  const SensingOperator q = SensingOperator::dense(random_orthogonal(10, 4), true);
  Vector y = Vector::LinSpaced(10, -1.0, 1.0);
  const Vector xo = oracle_solution(q, {1, 4, 7}, y);
  const Vector c = q.adjoint_apply(y);
  for (Index i : {1, 4, 7}) EXPECT_NEAR(xo[i], c[i], 1e-12);
  EXPECT_EQ(support_of(xo), (IndexSet{1, 4, 7}));
}

TEST(OracleSolution, NoiseAmplificationBound) {
  const SensingOperator op = gen_gaussian_operator(40, 50, 6);
  const double delta3 = rip_constant_bruteforce(op, 3);
  ASSERT_LT(delta3, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SparseSignal s = gen_sparse_signal(50, 3, 10.0, 10 + seed);
    const ProblemInstance inst = synthesize_instance(op, s, 1e-2, 20 + seed);
    const double err = (oracle_solution(op, s.support, inst.y) - s.dense()).norm();
    EXPECT_LE(err, inst.eps / std::sqrt(1.0 - delta3) + 1e-12);
  }
}

TEST(BruteForceL0, OrthonormalIsHardThreshold) {
  const SensingOperator q = SensingOperator::dense(random_orthogonal(7, 8), true);
  Rng rng = make_rng(9);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 10; ++rep) {
    Vector y(7);
    for (Index i = 0; i < 7; ++i) y[i] = g(rng);
    const Vector c = q.adjoint_apply(y);
    const double lambda = 0.05 + 0.1 * rep;
    const L0Minimizer best = bruteforce_l0_min(q, y, lambda, 7);
    Vector expect = Vector::Zero(7);
    for (Index i = 0; i < 7; ++i) {
      if (std::abs(c[i]) > threshold_level(lambda)) expect[i] = c[i];
    }
    EXPECT_EQ(best.support, support_of(expect));
    EXPECT_LT((best.x - expect).norm(), 1e-10);
    EXPECT_EQ(best.candidates, 128u);
  }
}

TEST(BruteForceL0, ZeroAboveLambdaZero) {
  const SensingOperator q = SensingOperator::dense(random_orthogonal(6, 10), true);
  const Vector y = Vector::LinSpaced(6, 0.5, 2.0);
  const double dmax = q.adjoint_apply(y).cwiseAbs().maxCoeff();
  const L0Minimizer best = bruteforce_l0_min(q, y, 0.5 * dmax * dmax * 1.01, 6);
  EXPECT_TRUE(best.support.empty());
}

TEST(BruteForceL0, NoWorseThanPdascOrAnyCandidate) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SensingOperator op = gen_gaussian_operator(7, 9, seed);
    const ProblemInstance inst =
        synthesize_instance(op, gen_sparse_signal(9, 2, 3.0, seed + 40), 0.05, seed + 80);
    SolverConfig cfg;
    cfg.grid_size = 30;
    cfg.discrepancy = inst.eps;
    const SolveReport r = pdasc(op, inst.y, cfg);
    ASSERT_TRUE(r.lambda_final.has_value());
    const double lambda = *r.lambda_final;
    const L0Minimizer best = bruteforce_l0_min(op, inst.y, lambda, 7);
    EXPECT_LE(best.objective, objective(op, inst.y, r.x, lambda) + 1e-12);
    EXPECT_LE(best.objective, 0.5 * inst.y.squaredNorm() + 1e-12);
    // spot-check a few fixed supports
    for (const IndexSet& a : {IndexSet{0}, IndexSet{1, 2}, IndexSet{3, 5, 8}}) {
      const Matrix sub = op.columns(a);
      const Vector z = sub.colPivHouseholderQr().solve(inst.y);
      const double j = 0.5 * (sub * z - inst.y).squaredNorm() + lambda * a.size();
      EXPECT_LE(best.objective, j + 1e-12);
    }
  }
}

TEST(BruteForceL0, CapacityGuard) {
  const SensingOperator op = gen_gaussian_operator(10, 60, 1);
  EXPECT_THROW(bruteforce_l0_min(op, Vector::Ones(10), 0.1, 6), CapacityError);
}

// ---------------------------------------------------------------------------
// Bound checkers
// ---------------------------------------------------------------------------

TEST(OneStepBounds, TrueSupportNoiseless) {
  // [I, Q] with Q orthogonal: coherence is the largest entry of Q, below 1.
  Matrix m(30, 60);
  m.leftCols(30) = Matrix::Identity(30, 30);
  m.rightCols(30) = random_orthogonal(30, 2);
  const SensingOperator op = SensingOperator::dense(m, true);
  const SparseSignal s = gen_sparse_signal(60, 2, 5.0, 3);
  const ProblemInstance inst = synthesize_instance(op, s, 0.0, 4);
  const double nu = mutual_coherence(op);
  const BoundReport r = check_onestep_bounds_mip(inst, s.support, nu);
  ASSERT_TRUE(r.applicable);
  EXPECT_TRUE(r.all_pass());
  for (const BoundRow& row : r.rows) {
    if (row.name == "primal_error_inf") EXPECT_NEAR(row.lhs, 0.0, 1e-12);
  }
}

TEST(OneStepBounds, EmptyActiveSet) {
  const SensingOperator op = gen_gaussian_operator(30, 60, 5);
  const SparseSignal s = gen_sparse_signal(60, 2, 2.0, 6);
  const ProblemInstance inst = synthesize_instance(op, s, 1e-3, 7);
  const BoundReport r = check_onestep_bounds_mip(inst, {}, mutual_coherence(op));
  ASSERT_TRUE(r.applicable);
  for (const BoundRow& row : r.rows) {
    if (row.name == "primal_error_inf") EXPECT_EQ(row.lhs, 0.0);
  }
}

TEST(OneStepBounds, NotApplicableWithoutTruthOrGate) {
  const SensingOperator op = gen_gaussian_operator(10, 20, 1);
  const ProblemInstance data = make_data_instance(op, Vector::Ones(10), 0.0);
  EXPECT_FALSE(check_onestep_bounds_mip(data, {}, 0.1).applicable);
  const ProblemInstance inst = synthesize_instance(op, gen_sparse_signal(20, 3, 1.0, 2), 0.0, 3);
  EXPECT_FALSE(check_onestep_bounds_mip(inst, {}, 0.6).applicable);
}

TEST(OneStepBounds, RipVariantOnSmallInstances) {
  int applicable = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SensingOperator op = gen_gaussian_operator(20, 24, seed);
    const RipTable rip = rip_table(op, 3);
    const SparseSignal s = gen_sparse_signal(24, 2, 3.0, 50 + seed);
    const ProblemInstance inst = synthesize_instance(op, s, 1e-3, 90 + seed);
    for (const IndexSet& a : {IndexSet{}, IndexSet{s.support[0]}, s.support}) {
      const BoundReport r = check_onestep_bounds_rip(inst, a, rip);
      if (!r.applicable) continue;
      ++applicable;
      EXPECT_TRUE(r.all_pass()) << "seed " << seed;
    }
  }
  EXPECT_GT(applicable, 10);
}

TEST(BasicBounds, CoherenceEstimates) {
  Rng rng = make_rng(11);
  std::normal_distribution<double> g;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SensingOperator op = gen_gaussian_operator(30, 60, seed);
    const double nu = mutual_coherence(op);
    const IndexSet all = detail::sample_without_replacement(60, 5, rng);
    const IndexSet a(all.begin(), all.begin() + 2), b(all.begin() + 2, all.end());
    Vector x(2), y(30);
    for (Index i = 0; i < 2; ++i) x[i] = g(rng);
    for (Index i = 0; i < 30; ++i) y[i] = g(rng);
    const BoundReport r = check_coherence_bounds(op, nu, make_index_set(a), make_index_set(b), x, y);
    EXPECT_TRUE(r.all_pass());
  }
}

TEST(BasicBounds, RipEstimates) {
  Rng rng = make_rng(12);
  std::normal_distribution<double> g;
  const SensingOperator op = gen_gaussian_operator(8, 12, 3);
  const RipTable rip = rip_table(op, 3);
  for (int rep = 0; rep < 100; ++rep) {
    const IndexSet all = detail::sample_without_replacement(12, 3, rng);
    const IndexSet a{all[0], all[1]}, b{all[2]};
    Vector x(2), y(8);
    for (Index i = 0; i < 2; ++i) x[i] = g(rng);
    for (Index i = 0; i < 8; ++i) y[i] = g(rng);
    const BoundReport r = check_rip_bounds(op, rip, make_index_set(a), make_index_set(b), x, y);
    EXPECT_TRUE(r.all_pass());
  }
}

TEST(BasicBounds, RejectOverlappingSets) {
  const SensingOperator op = gen_gaussian_operator(8, 12, 3);
  EXPECT_THROW(check_coherence_bounds(op, 0.5, {1, 2}, {2}, Vector::Ones(2), Vector::Ones(8)),
               ParameterError);
}

// ---------------------------------------------------------------------------
// Level sets
// ---------------------------------------------------------------------------

TEST(LevelSets, HandExamples) {
  SparseSignal s;
  s.p = 5;
  s.support = {1, 3};
  s.values = Vector(2);
  s.values << 1.0, -3.0;
  EXPECT_TRUE(level_set(s, 1.0, 1e9).members.empty());
  EXPECT_EQ(level_set(s, 1e-12, 1.0).members, s.support);
  EXPECT_EQ(level_set(s, 2.0, 1.0).members, (IndexSet{3}));  // sqrt(2 lambda) s = 2
  EXPECT_THROW(level_set(s, 1.0, 0.0), ParameterError);
}

TEST(LevelSets, Monotone) {
  const SparseSignal s = gen_sparse_signal(100, 20, 100.0, 3);
  for (double lambda : {0.01, 0.5, 10.0}) {
    for (double sc : {0.5, 1.0, 2.0}) {
      EXPECT_TRUE(is_subset(level_set(s, lambda, 2 * sc).members, level_set(s, lambda, sc).members));
      EXPECT_TRUE(is_subset(level_set(s, 2 * lambda, sc).members, level_set(s, lambda, sc).members));
    }
  }
}
