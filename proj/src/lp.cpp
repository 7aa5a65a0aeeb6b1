#include "nspbound/lp.hpp"

#include <cmath>
#include <limits>

#include "nspbound/errors.hpp"

namespace nspbound::lp {

namespace {

// Tableau with rows 0..R-1 holding constraints and row R the reduced costs.
// Columns 0..N-1 are structural, N..N+R-1 artificial, N+R the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t structural)
      : rows_(rows), n_(structural), width_(structural + rows + 1),
        data_((rows + 1) * width_, 0.0), basis_(rows) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * width_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * width_ + c]; }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t structural() const { return n_; }
  [[nodiscard]] std::size_t rhs_col() const { return width_ - 1; }
  [[nodiscard]] std::size_t obj_row() const { return rows_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / (*this)(pr, pc);
    for (std::size_t c = 0; c < width_; ++c) (*this)(pr, c) *= inv;
    (*this)(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = (*this)(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) (*this)(r, c) -= f * (*this)(pr, c);
      (*this)(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

 private:
  std::size_t rows_;
  std::size_t n_;
  std::size_t width_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class RunResult { Optimal, Unbounded, IterationLimit };

// Bland's rule: lowest-index improving column, ties in the ratio test broken
// by the lowest basic variable index.
RunResult run_simplex(Tableau& t, std::size_t entering_limit, const SimplexOptions& opt,
                      int& iterations) {
  const std::size_t obj = t.obj_row();
  const std::size_t rhs = t.rhs_col();
  for (;;) {
    std::size_t enter = entering_limit;
    for (std::size_t j = 0; j < entering_limit; ++j) {
      if (t(obj, j) < -opt.feasibility_tol) {
        enter = j;
        break;
      }
    }
    if (enter == entering_limit) return RunResult::Optimal;
    if (iterations >= opt.max_iterations) return RunResult::IterationLimit;

    std::size_t leave = t.rows();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t(i, enter);
      if (a <= opt.pivot_tol) continue;
      const double ratio = std::max(t(i, rhs), 0.0) / a;
      if (leave == t.rows()) {
        best_ratio = ratio;
        leave = i;
        continue;
      }
      const double slack = 1e-12 * std::max(1.0, best_ratio);
      if (ratio < best_ratio - slack) {
        best_ratio = ratio;
        leave = i;
      } else if (ratio <= best_ratio + slack && t.basis()[i] < t.basis()[leave]) {
        best_ratio = std::min(best_ratio, ratio);
        leave = i;
      }
    }
    if (leave == t.rows()) return RunResult::Unbounded;
    t.pivot(leave, enter);
    ++iterations;
  }
}

}  // namespace

LpProblem::LpProblem(std::size_t r, std::size_t c)
    : rows(r), cols(c), objective(c, 0.0), a(r * c, 0.0), rhs(r, 0.0) {}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

LpSolution solve(const LpProblem& problem, const SimplexOptions& opt) {
  const std::size_t R = problem.rows;
  const std::size_t N = problem.cols;
  if (problem.objective.size() != N || problem.a.size() != R * N || problem.rhs.size() != R) {
    throw UsageError("lp::solve: inconsistent problem dimensions");
  }

  LpSolution sol;
  Tableau t(R, N);
  std::vector<double> row_sign(R, 1.0);
  double b_scale = 1.0;
  for (std::size_t i = 0; i < R; ++i) {
    row_sign[i] = problem.rhs[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < N; ++j) t(i, j) = row_sign[i] * problem.at(i, j);
    t(i, N + i) = 1.0;
    t(i, t.rhs_col()) = row_sign[i] * problem.rhs[i];
    t.basis()[i] = N + i;
    b_scale = std::max(b_scale, std::abs(problem.rhs[i]));
  }

  // Phase 1: minimize the sum of artificials.
  const std::size_t obj = t.obj_row();
  for (std::size_t j = 0; j <= t.rhs_col(); ++j) {
    if (j >= N && j < N + R) continue;
    double sum = 0.0;
    for (std::size_t i = 0; i < R; ++i) sum += t(i, j);
    t(obj, j) = -sum;
  }
  auto r1 = run_simplex(t, N, opt, sol.iterations);
  if (r1 == RunResult::IterationLimit) {
    sol.status = LpStatus::IterationLimit;
    return sol;
  }
  if (-t(obj, t.rhs_col()) > opt.feasibility_tol * b_scale) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }

  // Pivot remaining artificials out where possible. Rows with no usable
  // structural entry are redundant; their artificial stays basic at zero.
  for (std::size_t i = 0; i < R; ++i) {
    if (t.basis()[i] < N) continue;
    for (std::size_t j = 0; j < N; ++j) {
      if (std::abs(t(i, j)) > opt.pivot_tol) {
        t.pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 reduced costs (artificials carry cost 0 and never re-enter).
  for (std::size_t j = 0; j <= t.rhs_col(); ++j) {
    double v = (j < N) ? problem.objective[j] : 0.0;
    for (std::size_t i = 0; i < R; ++i) {
      const std::size_t b = t.basis()[i];
      const double cb = b < N ? problem.objective[b] : 0.0;
      v -= cb * t(i, j);
    }
    t(obj, j) = v;
  }
  auto r2 = run_simplex(t, N, opt, sol.iterations);
  if (r2 == RunResult::IterationLimit) {
    sol.status = LpStatus::IterationLimit;
    return sol;
  }
  if (r2 == RunResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.point.assign(N, 0.0);
  for (std::size_t i = 0; i < R; ++i) {
    if (t.basis()[i] < N) sol.point[t.basis()[i]] = std::max(t(i, t.rhs_col()), 0.0);
  }
  sol.value = 0.0;
  for (std::size_t j = 0; j < N; ++j) sol.value += problem.objective[j] * sol.point[j];
  // Reduced cost of artificial i is -y_i for the sign-normalized rows.
  sol.duals.resize(R);
  for (std::size_t i = 0; i < R; ++i) sol.duals[i] = -t(obj, N + i) * row_sign[i];
  return sol;
}

}  // namespace nspbound::lp
