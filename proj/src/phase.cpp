#include "nspbound/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nspbound/bounds.hpp"
#include "nspbound/errors.hpp"
#include "nspbound/parallel.hpp"
#include "nspbound/specfun.hpp"

namespace nspbound::phase {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;
constexpr int kBorneRGridPoints = 1000;
constexpr double kBorneRRhoMin = 1e-8;
constexpr double kBorneRRhoMax = 0.5;
constexpr int kPiGridPoints = 40;

std::vector<double> geometric_grid(double lo, double hi, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < count; ++i) {
    g[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i / (count - 1));
  }
  g.back() = hi;
  return g;
}

// Distinct integers spread geometrically over [1, hi].
std::vector<std::int64_t> integer_scan_grid(std::int64_t hi, int count) {
  std::vector<std::int64_t> g;
  if (hi < 1) return g;
  if (hi == 1) return {1};
  for (double x : geometric_grid(1.0, static_cast<double>(hi), count)) {
    const auto v = std::clamp<std::int64_t>(std::llround(x), 1, hi);
    if (g.empty() || v > g.back()) g.push_back(v);
  }
  if (g.back() != hi) g.push_back(hi);
  return g;
}

double lambert_profile(double delta, double B) { return std::exp(specfun::lambert_wm1(-B * delta)) / delta; }

struct ProfileFit {
  double A;
  double sse;
};

// For fixed B the model is f_i / A, so the best A solves a 1-D least squares.
ProfileFit best_a_for_b(std::span<const PhasePoint> pts, double B, double a_lo, double a_hi) {
  double ff = 0.0;
  double fr = 0.0;
  std::vector<double> f(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    f[i] = lambert_profile(pts[i].delta, B);
    ff += f[i] * f[i];
    fr += f[i] * pts[i].rho;
  }
  double A = fr > 0.0 ? ff / fr : a_hi;
  A = std::clamp(A, a_lo, a_hi);
  double sse = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = f[i] / A - pts[i].rho;
    sse += r * r;
  }
  return {A, sse};
}

double sse_at(std::span<const PhasePoint> pts, double A, double B) {
  double sse = 0.0;
  for (const auto& pt : pts) {
    const double r = lambert_rho(pt.delta, {A, B}) - pt.rho;
    sse += r * r;
  }
  return sse;
}

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 1) throw UsageError("uniform_grid: count must be >= 1");
  if (count == 1) return {lo};
  if (!(lo < hi)) throw UsageError("uniform_grid: require lo < hi");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  g.back() = hi;
  return g;
}

std::vector<double> default_delta_grid() { return uniform_grid(0.39, 0.99, 60); }

RhoSolution solve_rho_borne_r(double delta, double C, double tol) {
  if (!(delta >= bounds::kMinDelta)) {
    throw DomainError("solve_rho_borne_r: requires delta >= (1+pi/2)^-1 ~ 0.389, got " +
                      std::to_string(delta));
  }
  if (!(tol > 0.0)) throw UsageError("solve_rho_borne_r: tol must be > 0");
  RhoSolution sol;
  auto f = [&](double rho) {
    ++sol.evaluations;
    return bounds::borne_r_lhs(bounds::PhaseParams::make(rho, delta, C));
  };

  const auto grid = geometric_grid(kBorneRRhoMin, kBorneRRhoMax, kBorneRGridPoints);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);

  std::optional<std::size_t> upper;  // last feasible -> infeasible transition
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const bool a = vals[i] <= 0.0;
    const bool b = vals[i + 1] <= 0.0;
    if (a != b) sol.brackets.push_back({grid[i], grid[i + 1]});
    if (a && !b) upper = i;
  }
  if (!upper) {
    sol.note = vals.front() <= 0.0 ? "feasible on the whole scan range" : "no feasible rho on scan";
    return sol;
  }
  if (sol.brackets.size() > 1) sol.note = "multiple sign changes; returning the largest root";

  double lo = grid[*upper];
  double hi = grid[*upper + 1];
  double root = lo;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (v <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    root = lo;
    if (std::abs(v) <= tol) {
      root = mid;
      break;
    }
  }
  sol.rho = root;
  return sol;
}

RhoSolution solve_rho_pi(double delta, double C, std::int64_t n, double log_threshold) {
  if (n < 100) throw UsageError("solve_rho_pi: requires n >= 100");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("solve_rho_pi: requires 0 < delta < 1");
  if (std::isnan(log_threshold)) throw UsageError("solve_rho_pi: NaN threshold");
  RhoSolution sol;
  const auto p = static_cast<std::int64_t>(std::floor(static_cast<double>(n) / delta));
  if (p <= n) {
    sol.note = "degenerate discretization: p <= n";
    return sol;
  }
  if (log_threshold == specfun::kNegInf) {
    sol.note = "unattainable threshold";
    return sol;
  }
  const auto table = bounds::HalfLogGammaTable::for_p(p);
  auto passes = [&](std::int64_t s) {
    ++sol.evaluations;
    try {
      return bounds::log_pi(bounds::Params::make(C, s, n, p), table) <= log_threshold;
    } catch (const DomainError& e) {
      sol.note = e.what();
      return false;
    }
  };
  auto rho_of = [&](std::int64_t s) { return static_cast<double>(s) / static_cast<double>(n); };

  const auto grid = integer_scan_grid(n - 1, kPiGridPoints);
  std::vector<char> ok(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) ok[i] = passes(grid[i]) ? 1 : 0;

  std::optional<std::size_t> upper;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (ok[i] != ok[i + 1]) sol.brackets.push_back({rho_of(grid[i]), rho_of(grid[i + 1])});
    if (ok[i] && !ok[i + 1]) upper = i;
  }
  if (ok.back()) {
    sol.rho = rho_of(grid.back());
    sol.note = "bound passes up to s = n-1";
    return sol;
  }
  if (!upper) {
    sol.note = "no s passes on the scan grid";
    return sol;
  }
  if (sol.brackets.size() > 1) sol.note = "non-monotone scan; returning the largest passing s";

  std::int64_t lo = grid[*upper];
  std::int64_t hi = grid[*upper + 1];
  // Re-verify the bracket before bisecting; if it does not hold, scan it.
  if (!passes(lo) || passes(hi)) {
    sol.note = "invalid bracket; exhaustive scan";
    std::optional<std::int64_t> best;
    for (std::int64_t s = 1; s < n; ++s) {
      if (passes(s)) best = s;
    }
    if (best) sol.rho = rho_of(*best);
    return sol;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (passes(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  sol.rho = rho_of(lo);
  return sol;
}

double lambert_rho(double delta, const LambertCurveParams& params) {
  if (!(delta > 0.0)) throw DomainError("lambert_rho: requires delta > 0");
  if (!(params.A > 0.0)) throw DomainError("lambert_rho: requires A > 0");
  if (!(params.B > 0.0)) throw DomainError("lambert_rho: requires B > 0");
  double x = params.B * delta;
  if (x > kInvE * (1.0 + 1e-12)) {
    throw DomainError("lambert_rho: requires B*delta <= 1/e, got " + std::to_string(x));
  }
  x = std::min(x, kInvE);
  return std::exp(specfun::lambert_wm1(-x)) / (params.A * delta);
}

LambertFit fit_lambert(std::span<const PhasePoint> points) {
  if (points.size() < 3) throw UsageError("fit_lambert: need at least 3 points");
  double max_delta = 0.0;
  for (const auto& pt : points) {
    if (!(pt.rho > 0.0) || !(pt.delta > 0.0 && pt.delta < 1.0)) {
      throw UsageError("fit_lambert: points need rho > 0 and 0 < delta < 1");
    }
    max_delta = std::max(max_delta, pt.delta);
  }
  const bool degenerate = std::all_of(points.begin(), points.end(),
                                      [&](const PhasePoint& q) { return q.delta == points[0].delta; });
  if (degenerate) throw UsageError("fit_lambert: need at least two distinct delta values");

  constexpr double a_lo = 0.1;
  constexpr double a_hi = 10.0;
  constexpr int grid_n = 200;
  const double b_hi = kInvE / max_delta;

  // Coarse grid.
  double best_a = a_lo;
  double best_b = b_hi;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_n; ++i) {
    const double A = a_lo + (a_hi - a_lo) * i / (grid_n - 1);
    for (int j = 0; j < grid_n; ++j) {
      const double B = b_hi * (j + 1) / grid_n;
      const double v = sse_at(points, A, B);
      if (v < best) {
        best = v;
        best_a = A;
        best_b = B;
      }
    }
  }

  // Coordinate refinement: A is minimized exactly for each B, B by golden
  // section on a bracket of one grid step either side, shrinking until both
  // coordinates move less than the parameter tolerance.
  constexpr double kParamTol = 1e-6;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double step = b_hi / grid_n;
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double prev_a = best_a;
    const double prev_b = best_b;
    double lo = std::max(best_b - step, b_hi * 1e-9);
    double hi = std::min(best_b + step, b_hi);
    auto prof = [&](double B) { return best_a_for_b(points, B, a_lo, a_hi).sse; };
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = prof(x1);
    double f2 = prof(x2);
    while (hi - lo > 1e-13) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = prof(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = prof(x2);
      }
    }
    const double cand_b = 0.5 * (lo + hi);
    const auto fit = best_a_for_b(points, cand_b, a_lo, a_hi);
    if (fit.sse <= best) {
      best = fit.sse;
      best_b = cand_b;
      best_a = fit.A;
    }
    if (std::abs(best_a - prev_a) < kParamTol && std::abs(best_b - prev_b) < kParamTol) break;
    step = std::max(std::abs(best_b - prev_b) * 2.0, kParamTol);
  }
  return {{best_a, best_b}, std::sqrt(best / static_cast<double>(points.size()))};
}

std::vector<RatioPoint> compare_curves(const PhaseCurve& a, const PhaseCurve& b) {
  if (a.points.empty() || b.points.empty()) throw UsageError("compare_curves: empty curve");
  const double b_lo = b.points.front().delta;
  const double b_hi = b.points.back().delta;
  std::vector<RatioPoint> out;
  for (const auto& pt : a.points) {
    if (pt.delta < b_lo || pt.delta > b_hi) continue;
    auto it = std::lower_bound(b.points.begin(), b.points.end(), pt.delta,
                               [](const PhasePoint& q, double d) { return q.delta < d; });
    double rho_b;
    if (it->delta == pt.delta) {
      rho_b = it->rho;
    } else {
      const auto& right = *it;
      const auto& left = *(it - 1);
      const double w = (pt.delta - left.delta) / (right.delta - left.delta);
      rho_b = left.rho + w * (right.rho - left.rho);
    }
    out.push_back({pt.delta, rho_b / pt.rho});
  }
  if (out.empty()) throw UsageError("compare_curves: delta ranges do not overlap");
  return out;
}

namespace {

template <typename Solve>
PhaseCurve trace(std::span<const double> deltas, CurveSource source, unsigned threads, Solve&& solve) {
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (!(deltas[i] > deltas[i - 1])) throw UsageError("delta grid must be strictly increasing");
  }
  std::vector<PointDiagnostics> diags(deltas.size());
  parallel_for(deltas.size(), threads, [&](std::size_t i) {
    diags[i].delta = deltas[i];
    diags[i].solution = solve(deltas[i]);
  });
  PhaseCurve curve;
  curve.source = std::move(source);
  for (const auto& d : diags) {
    if (d.solution.rho && *d.solution.rho > 0.0 && *d.solution.rho < 1.0) {
      curve.points.push_back({d.delta, *d.solution.rho});
    }
  }
  curve.diagnostics = std::move(diags);
  return curve;
}

}  // namespace

PhaseCurve trace_borne_r(std::span<const double> deltas, double C, unsigned threads) {
  return trace(deltas, BorneRSource{C}, threads, [C](double d) { return solve_rho_borne_r(d, C); });
}

PhaseCurve trace_pi(std::span<const double> deltas, double C, std::int64_t n, double log_threshold,
                    unsigned threads) {
  return trace(deltas, PiBoundSource{n, C, log_threshold}, threads,
               [=](double d) { return solve_rho_pi(d, C, n, log_threshold); });
}

PhaseCurve trace_lambert(std::span<const double> deltas, const LambertCurveParams& params) {
  return trace(deltas, LambertSource{params.A, params.B}, 1, [&](double d) {
    RhoSolution sol;
    sol.evaluations = 1;
    sol.rho = lambert_rho(d, params);
    return sol;
  });
}

}  // namespace nspbound::phase
