#pragma once

// Dense two-phase simplex for small equality-form LPs:
//   minimize c^T x  subject to  A x = b,  x >= 0.
// Free variables must be split (x = x+ - x-) by the caller. Bland's rule is
// used for every pivot, so the pivot sequence is fully deterministic.

#include <cstddef>
#include <vector>

namespace nspbound::lp {

struct LpProblem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> objective;  // size cols
  std::vector<double> a;          // rows x cols, row-major
  std::vector<double> rhs;        // size rows

  LpProblem() = default;
  LpProblem(std::size_t rows, std::size_t cols);

  double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  [[nodiscard]] double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double value = 0.0;
  std::vector<double> point;  // primal x, valid when Optimal
  std::vector<double> duals;  // y with A^T y <= c, valid when Optimal
  int iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-11;
  int max_iterations = 10000;
};

/// Throws UsageError on inconsistent dimensions.
LpSolution solve(const LpProblem& problem, const SimplexOptions& options = {});

const char* to_string(LpStatus status);

}  // namespace nspbound::lp
