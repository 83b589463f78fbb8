// Recover a sparse spike train from noisy Gaussian measurements with PDASC
// and compare against OMP, which is told the true sparsity.

#include "l0pdas/l0pdas.hpp"

#include <iostream>

int main() {
  using namespace l0pdas;

  const Index n = 200, p = 500, t = 20;
  const SensingOperator op = gen_gaussian_operator(n, p, 7);
  const SparseSignal truth = gen_sparse_signal(p, t, 100.0, 8);
  const ProblemInstance inst = synthesize_instance(op, truth, 1e-3, 9);

  SolverConfig cfg;  // N = 100, J_max = 5, stop at ||Psi x - y|| <= eps
  const SolveReport pd = pdasc(inst, cfg);

  GreedyConfig g;
  g.sparsity = t;
  const SolveReport om = omp(op, inst.y, g);

  for (const SolveReport* r : {&pd, &om}) {
    const Vector err = r->x - truth.dense();
    std::cout << r->solver << ": status " << to_string(r->status) << ", support "
              << (r->support == truth.support ? "exact" : "wrong") << ", rel l2 error "
              << err.norm() / truth.dense().norm() << ", outer steps " << r->path.size()
              << '\n';
  }
  return 0;
}
