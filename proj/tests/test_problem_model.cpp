#include "l0pdas/problem_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace l0pdas;

namespace {

// Orthonormal DCT-II entry, written out directly.
double dct2(Index k, Index j, Index p) {
  const double s = k == 0 ? std::sqrt(1.0 / p) : std::sqrt(2.0 / p);
  return s * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * p));
}

Vector random_vector(Index len, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> g;
  Vector v(len);
  for (Index i = 0; i < len; ++i) v[i] = g(rng);
  return v;
}

}  // namespace

TEST(Operators, GaussianColumnsAreUnitNorm) {
  const SensingOperator op = gen_gaussian_operator(20, 50, 1);
  ASSERT_EQ(op.rows(), 20);
  ASSERT_EQ(op.cols(), 50);
  EXPECT_TRUE(op.columns_normalized());
  const Matrix m = op.to_dense();
  for (Index j = 0; j < m.cols(); ++j) EXPECT_NEAR(m.col(j).norm(), 1.0, 1e-14);
}

TEST(Operators, BernoulliEntriesAreSigned) {
  const Matrix m = gen_bernoulli_operator(16, 40, 2).to_dense();
  for (Index j = 0; j < m.cols(); ++j) {
    EXPECT_NEAR(m.col(j).norm(), 1.0, 1e-14);
    for (Index i = 0; i < m.rows(); ++i) EXPECT_NEAR(std::abs(m(i, j)), 0.25, 1e-15);
  }
}

TEST(Operators, SameSeedSameMatrix) {
  EXPECT_EQ(gen_gaussian_operator(10, 30, 5).to_dense(), gen_gaussian_operator(10, 30, 5).to_dense());
  EXPECT_NE(gen_gaussian_operator(10, 30, 5).to_dense(), gen_gaussian_operator(10, 30, 6).to_dense());
}

TEST(Operators, RejectsBadDimensions) {
  EXPECT_THROW(gen_gaussian_operator(31, 30, 0), DimensionError);
  EXPECT_THROW(gen_gaussian_operator(0, 30, 0), DimensionError);
  EXPECT_THROW(gen_partial_dct_operator(40, 30, 0), DimensionError);
}

TEST(Operators, PartialDctMatchesExplicitMatrix) {
  const Index p = 24;
  const SensingOperator op = gen_partial_dct_operator(9, p, 11);
  const IndexSet& rows = op.dct_rows();
  ASSERT_EQ(rows.size(), 9u);

  Matrix expect(9, p);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Index j = 0; j < p; ++j) expect(static_cast<Index>(r), j) = dct2(rows[r], j, p);
  }
  for (Index j = 0; j < p; ++j) expect.col(j).normalize();

  EXPECT_LT((op.to_dense() - expect).cwiseAbs().maxCoeff(), 1e-12);

  const Vector x = random_vector(p, 3);
  const Vector v = random_vector(9, 4);
  EXPECT_LT((op.apply(x) - expect * x).norm(), 1e-12);
  EXPECT_LT((op.adjoint_apply(v) - expect.transpose() * v).norm(), 1e-12);
}

TEST(Operators, FullDctIsOrthogonal) {
  const Index p = 16;
  IndexSet all(p);
  for (Index i = 0; i < p; ++i) all[i] = i;
  const Matrix m = SensingOperator::partial_dct(p, all).to_dense();
  EXPECT_LT((m.transpose() * m - Matrix::Identity(p, p)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Operators, RestrictedProductsAgreeWithDense) {
  const SensingOperator op = gen_gaussian_operator(12, 30, 8);
  const Matrix m = op.to_dense();
  const IndexSet a{2, 7, 19};
  const Vector z = random_vector(3, 9);
  const Vector r = random_vector(12, 10);
  Vector full = Vector::Zero(30);
  for (std::size_t k = 0; k < a.size(); ++k) full[a[k]] = z[static_cast<Index>(k)];
  EXPECT_LT((op.apply_restricted(a, z) - m * full).norm(), 1e-13);
  const Vector back = op.adjoint_restricted(a, r);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(back[static_cast<Index>(k)], m.col(a[k]).dot(r), 1e-13);
  }
}

TEST(Operators, ApplyRejectsWrongLength) {
  const SensingOperator op = gen_gaussian_operator(5, 8, 1);
  EXPECT_THROW(op.apply(Vector::Zero(7)), DimensionError);
  EXPECT_THROW(op.adjoint_apply(Vector::Zero(8)), DimensionError);
}

TEST(Signals, SupportSizeSignsAndRange) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SparseSignal s = gen_sparse_signal(100, 7, 1000.0, seed);
    EXPECT_EQ(s.sparsity(), 7u);
    EXPECT_EQ(make_index_set(s.support), s.support);
    EXPECT_DOUBLE_EQ(s.min_abs(), 1.0);
    EXPECT_DOUBLE_EQ(s.max_abs(), 1000.0);
    EXPECT_DOUBLE_EQ(s.dynamic_range(), 1000.0);
    for (Index i = 0; i < s.values.size(); ++i) EXPECT_NE(s.values[i], 0.0);
  }
}

TEST(Signals, OneSparseHasUnitMagnitude) {
  const SparseSignal s = gen_sparse_signal(10, 1, 50.0, 3);
  ASSERT_EQ(s.sparsity(), 1u);
  EXPECT_DOUBLE_EQ(std::abs(s.values[0]), 1.0);
}

TEST(Signals, RejectsBadParameters) {
  EXPECT_THROW(gen_sparse_signal(10, 11, 2.0, 0), ParameterError);
  EXPECT_THROW(gen_sparse_signal(10, 0, 2.0, 0), ParameterError);
  EXPECT_THROW(gen_sparse_signal(10, 3, 0.5, 0), ParameterError);
}

TEST(Instances, NoiseLevelIsNormOfNoise) {
  const SensingOperator op = gen_gaussian_operator(40, 80, 1);
  const SparseSignal s = gen_sparse_signal(80, 4, 10.0, 2);
  const ProblemInstance inst = synthesize_instance(op, s, 0.01, 3);
  ASSERT_TRUE(inst.noise.has_value());
  EXPECT_DOUBLE_EQ(inst.eps, inst.noise->norm());
  EXPECT_LT((inst.y - op.apply(s.dense()) - *inst.noise).norm(), 1e-12);
  // ||eta||^2 / (n sigma^2) concentrates near 1.
  EXPECT_NEAR(inst.eps * inst.eps / (40 * 1e-4), 1.0, 0.6);
}

TEST(Instances, NoiselessMeansExactData) {
  const SensingOperator op = gen_gaussian_operator(10, 20, 1);
  const SparseSignal s = gen_sparse_signal(20, 3, 5.0, 2);
  const ProblemInstance inst = synthesize_instance(op, s, 0.0, 3);
  EXPECT_EQ(inst.eps, 0.0);
  EXPECT_LT((inst.y - op.apply(s.dense())).norm(), 1e-14);
}

TEST(Instances, RejectsMismatchedSignal) {
  const SensingOperator op = gen_gaussian_operator(10, 20, 1);
  const SparseSignal s = gen_sparse_signal(21, 3, 5.0, 2);
  EXPECT_THROW(synthesize_instance(op, s, 0.0, 3), DimensionError);
}

TEST(IndexSets, TopKBreaksTiesTowardSmallerIndex) {
  Vector v(5);
  v << 1.0, -3.0, 3.0, 0.5, -1.0;
  EXPECT_EQ(top_k_abs(v, 2), (IndexSet{1, 2}));
  EXPECT_EQ(top_k_abs(v, 3), (IndexSet{0, 1, 2}));
}

TEST(IndexSets, SetOperations) {
  const IndexSet a{1, 3, 5}, b{3, 4};
  EXPECT_EQ(set_union(a, b), (IndexSet{1, 3, 4, 5}));
  EXPECT_EQ(set_difference(a, b), (IndexSet{1, 5}));
  EXPECT_EQ(intersection_size(a, b), 1u);
  EXPECT_TRUE(is_subset(IndexSet{3, 5}, a));
  EXPECT_FALSE(is_subset(b, a));
}
