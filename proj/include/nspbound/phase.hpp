#pragma once

// Phase-transition curves in the (delta, rho) plane: root finding in rho for
// the closed-form region and for the numerical bound, the Lambert-W threshold
// family exp(W_{-1}(-B delta)) / (A delta), and curve comparison.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nspbound::phase {

struct PhasePoint {
  double delta = 0.0;
  double rho = 0.0;
  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

struct PiBoundSource {
  std::int64_t n = 0;
  double C = 1.0;
  double log_threshold = 0.0;
};
struct BorneRSource {
  double C = 1.0;
};
struct LambertSource {
  double A = 0.0;
  double B = 0.0;
};
struct ExternalSource {
  std::string label;
};
using CurveSource = std::variant<PiBoundSource, BorneRSource, LambertSource, ExternalSource>;

/// Interval [lo, hi] of rho across which the sign of the tested quantity flips.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct RhoSolution {
  std::optional<double> rho;
  /// Every sign change seen on the scan grid, in increasing rho.
  std::vector<Bracket> brackets;
  int evaluations = 0;
  std::string note;
};

struct PointDiagnostics {
  double delta = 0.0;
  RhoSolution solution;
};

/// Points with no root are omitted from `points` but kept in `diagnostics`.
struct PhaseCurve {
  std::vector<PhasePoint> points;
  CurveSource source;
  std::vector<PointDiagnostics> diagnostics;
};

struct LambertCurveParams {
  double A = 1.0;
  double B = 0.0;
};

struct LambertFit {
  LambertCurveParams params;
  double rms_residual = 0.0;
};

/// 60 uniform points on [0.39, 0.99].
std::vector<double> default_delta_grid();
std::vector<double> uniform_grid(double lo, double hi, int count);

/// Upper boundary in rho of the closed-form region at this delta.
/// Throws DomainError when delta < (1 + pi/2)^-1.
RhoSolution solve_rho_borne_r(double delta, double C, double tol = 1e-12);

/// Largest rho = s/n with ln Pi(s, n, floor(n/delta), C) <= log_threshold.
RhoSolution solve_rho_pi(double delta, double C, std::int64_t n, double log_threshold);

/// exp(W_{-1}(-B delta)) / (A delta). Throws DomainError when B delta > 1/e.
double lambert_rho(double delta, const LambertCurveParams& params);

/// Least-squares (A, B) over A in [0.1, 10], B in (0, 1/(e max delta)].
LambertFit fit_lambert(std::span<const PhasePoint> points);

struct RatioPoint {
  double delta = 0.0;
  double ratio = 0.0;
};

/// b.rho / a.rho on a's delta grid, b linearly interpolated.
std::vector<RatioPoint> compare_curves(const PhaseCurve& a, const PhaseCurve& b);

// Curve tracing. `threads` = 0 picks hardware concurrency; the point order
// never depends on the thread count.
PhaseCurve trace_borne_r(std::span<const double> deltas, double C, unsigned threads = 0);
PhaseCurve trace_pi(std::span<const double> deltas, double C, std::int64_t n,
                    double log_threshold, unsigned threads = 0);
PhaseCurve trace_lambert(std::span<const double> deltas, const LambertCurveParams& params);

}  // namespace nspbound::phase
