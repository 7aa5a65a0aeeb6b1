#pragma once

// Desk-scale empirical checks of the failure bounds: Gaussian kernel sampling,
// an exact LP-based NSP(s, C) decision procedure, the sphere process
//   X(t) = C (|Z_(1)(t)| + ... + |Z_(s)(t)|) - (|Z_(s+1)(t)| + ... + |Z_(p)(t)|)
// with Z(t) = sum_i t_i g_i, and Clopper-Pearson failure-rate estimates.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nspbound/bounds.hpp"

namespace nspbound::mc {

/// m Gaussian generators of a kernel in R^p, stored as a p x m matrix whose
/// column i is g_i and whose row j is g^j.
struct KernelSample {
  Eigen::MatrixXd generators;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// Rank-deficient draws rejected before this one.
  int resamples = 0;

  [[nodiscard]] Eigen::Index p() const { return generators.rows(); }
  [[nodiscard]] Eigen::Index m() const { return generators.cols(); }
};

/// Raised when the LP solver cannot decide a subproblem.
class CheckerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kConditionLimit = 1e10;
inline constexpr int kMaxNspP = 20;
inline constexpr int kMaxNspS = 4;

KernelSample sample_kernel(const bounds::Params& params, std::uint64_t seed, std::uint64_t stream = 0);
KernelSample sample_kernel(std::int64_t p, std::int64_t m, std::uint64_t seed, std::uint64_t stream = 0);

/// X(t) for a unit vector t in R^m. Ties in |Z_j| keep the natural index order.
double eval_x(const KernelSample& kernel, const Eigen::VectorXd& t, std::int64_t s, double C);

struct NspWitness {
  std::vector<int> support;
  std::vector<int> signs;
  Eigen::VectorXd t;
  /// min ||(G t)_{S^c}||_1 subject to sigma^T (G t)_S = 1; below C means failure.
  double value = 0.0;
};

struct NspResult {
  bool holds = true;
  std::optional<NspWitness> witness;
  /// Smallest LP value seen; +inf if every subproblem was infeasible.
  double min_value = 0.0;
  int lp_solved = 0;
};

/// Exact decision of NSP(s, C) for the span of the generators. Requires
/// p <= 20, s <= 4, s < p; throws UsageError otherwise and CheckerError on
/// LP failure.
NspResult check_nsp(const KernelSample& kernel, std::int64_t s, double C);

struct SupSample {
  double max_value = 0.0;
  Eigen::VectorXd argmax;
};

/// Running max of X over random unit vectors (Gaussian normalized). A
/// positive value certifies an NSP(s, C) violation.
SupSample sample_sup_x(const KernelSample& kernel, std::int64_t s, double C, std::int64_t samples,
                       std::uint64_t seed);

enum class Verdict { Consistent, Violated, BoundVacuous };
const char* to_string(Verdict v);

struct McReport {
  std::int64_t trials = 0;      // completed trials
  std::int64_t failures = 0;
  std::int64_t discarded = 0;   // trials dropped on checker errors
  double p_hat = 0.0;
  double lower_conf = 0.0;      // one-sided 99% Clopper-Pearson
  double upper_conf = 0.0;      // one-sided 99% Clopper-Pearson
  double log_theory_bound = 0.0;
  double theory_bound = 0.0;    // exp(log_theory_bound), unclamped
  Verdict verdict = Verdict::Consistent;
  std::vector<std::string> notes;

  friend bool operator==(const McReport&, const McReport&) = default;
};

inline constexpr double kConfidence = 0.99;

double clopper_pearson_upper(std::int64_t failures, std::int64_t trials, double confidence = kConfidence);
double clopper_pearson_lower(std::int64_t failures, std::int64_t trials, double confidence = kConfidence);

/// Fills p_hat, confidence bounds and verdict from counts and the bound.
McReport make_report(std::int64_t trials, std::int64_t failures, double log_theory_bound);

McReport estimate_nsp_failure(const bounds::Params& params, std::int64_t trials, std::uint64_t seed,
                              unsigned threads = 0);

McReport estimate_psi_failure(std::int64_t l, std::int64_t s, double C, std::int64_t trials,
                              std::uint64_t seed, unsigned threads = 0);

/// Counts kernels whose sampled sup of X is positive (certified failures).
McReport estimate_supx_failure(const bounds::Params& params, std::int64_t trials,
                               std::int64_t samples, std::uint64_t seed, unsigned threads = 0);

}  // namespace nspbound::mc
