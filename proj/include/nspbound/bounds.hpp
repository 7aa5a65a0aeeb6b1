#pragma once

// Closed-form, log-domain evaluation of the Kac-Rice upper bound on the
// probability that a uniformly distributed m-dimensional kernel in R^p fails
// the null-space property NSP(s, C), together with its ingredients and the
// asymptotic sufficient condition in the (rho, delta) plane.
//
// Notation: m = p - n, p_tilde(k) = (C^2 - 1) s + p - k,
// H_k = min(floor(pi p_tilde(k) / 2), m).

#include <cstdint>
#include <optional>
#include <vector>

namespace nspbound::bounds {

/// A validated problem instance 0 < s < n < p, C >= 1, m = p - n.
struct Params {
  double C = 1.0;
  std::int64_t s = 0;
  std::int64_t n = 0;
  std::int64_t p = 0;

  /// Throws DomainError naming the violated invariant.
  static Params make(double C, std::int64_t s, std::int64_t n, std::int64_t p);

  [[nodiscard]] std::int64_t m() const { return p - n; }
};

/// A point of the (rho, delta) plane with dilatation C.
struct PhaseParams {
  double rho = 0.0;
  double delta = 0.0;
  double C = 1.0;

  /// Throws DomainError unless 0 < rho < 1, 0 < delta < 1, C >= 1.
  static PhaseParams make(double rho, double delta, double C);

  /// s = floor(rho n), p = floor(n / delta). Throws DegenerateDiscretization
  /// when the result violates 0 < s < n < p.
  [[nodiscard]] Params discretize(std::int64_t n) const;
};

/// (1 + pi/2)^-1, the smallest delta covered by the closed-form region.
extern const double kMinDelta;

struct BoundTerm {
  std::int64_t k = 0;
  double log_term = 0.0;
};

struct BoundDiagnostics {
  /// Number of k >= 1 where H_k <= m - k + 1.
  std::int64_t h_assumption_violations = 0;
  std::optional<std::int64_t> first_h_violation;
  /// Number of k with log Q > 0 (only possible when H_k < m).
  std::int64_t positive_log_q = 0;
};

struct BoundReport {
  double log_pi = 0.0;
  std::vector<BoundTerm> terms;
  std::int64_t dominant_k = 0;
  Params params;
  BoundDiagnostics diagnostics;
};

double p_tilde(const Params& params, std::int64_t k);
std::int64_t h_cap(const Params& params, std::int64_t k);
/// True when H_k > m - k + 1 (vacuous for k = 0).
bool h_cap_assumption_holds(const Params& params, std::int64_t k);

/// ln psi_l(C), the Gaussian-vector NSP failure bound.
double log_psi(std::int64_t l, std::int64_t s, double C);

/// ln Q(k, p_tilde(k), m), the hyper-rectangle bound; 0 at k = 0.
double log_q(const Params& params, std::int64_t k);

/// ln of the k-th summand of the bound (without the leading sqrt(pi)).
double log_term(const Params& params, std::int64_t k);

/// ln h_C(s, m, p): bound on a positive local maximum on the full sphere.
double log_h(const Params& params);

/// ln B_k(s, n, p) of the reindexed sum, 1 <= k <= m.
double log_b_term(const Params& params, std::int64_t k);

/// Cached ln Gamma(j / 2) for j = 1..max_index. Every Gamma argument in the
/// bound is a half-integer, so a single table of size ~2p serves a whole
/// sweep over s at fixed p.
class HalfLogGammaTable {
 public:
  explicit HalfLogGammaTable(std::int64_t max_index);

  /// Builds a table large enough for any Params with this p.
  static HalfLogGammaTable for_p(std::int64_t p);

  /// ln Gamma(j / 2).
  [[nodiscard]] double half(std::int64_t j) const { return values_[static_cast<std::size_t>(j)]; }
  /// ln k!.
  [[nodiscard]] double factorial(std::int64_t k) const { return half(2 * k + 2); }
  [[nodiscard]] double binomial(std::int64_t a, std::int64_t b) const {
    return factorial(a) - factorial(b) - factorial(a - b);
  }
  [[nodiscard]] std::int64_t max_index() const {
    return static_cast<std::int64_t>(values_.size()) - 1;
  }

 private:
  std::vector<double> values_;  // index 0 unused
};

/// Full report: ln Pi = ln sqrt(pi) + LSE_k log_term(k), k = 0..m-1.
BoundReport pi_bound(const Params& params);
BoundReport pi_bound(const Params& params, const HalfLogGammaTable& table);

/// ln Pi only, without materializing the per-k terms. Throws DomainError if
/// any term is not finite.
double log_pi(const Params& params, const HalfLogGammaTable& table);

/// Left-hand side of the closed-form sufficient condition in (rho, delta).
double borne_r_lhs(const PhaseParams& phase);

/// delta >= kMinDelta and borne_r_lhs <= 0.
bool borne_r_region(const PhaseParams& phase);

}  // namespace nspbound::bounds
