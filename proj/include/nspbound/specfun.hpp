#pragma once

// Scalar special functions evaluated in double precision. Everything that
// would overflow in linear scale (Gamma, factorials, binomials) is returned
// as a natural logarithm.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace nspbound::specfun {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Natural logarithm of a nonnegative quantity; -inf encodes zero.
class LogValue {
 public:
  constexpr LogValue() = default;
  /// Throws DomainError on NaN.
  explicit LogValue(double log_value);

  static constexpr LogValue zero() { return LogValue{}; }
  static constexpr LogValue one() {
    LogValue v;
    v.value_ = 0.0;
    return v;
  }
  static LogValue from_linear(double x);

  [[nodiscard]] constexpr double log() const { return value_; }
  [[nodiscard]] double linear() const { return std::exp(value_); }
  [[nodiscard]] constexpr bool is_zero() const { return value_ == kNegInf; }

  /// Sum of the underlying quantities.
  friend LogValue operator+(LogValue a, LogValue b);
  /// Product of the underlying quantities.
  friend LogValue operator*(LogValue a, LogValue b);
  /// Raises the underlying quantity to a real power.
  [[nodiscard]] LogValue pow(double exponent) const;

  friend constexpr bool operator==(LogValue, LogValue) = default;
  friend constexpr auto operator<=>(LogValue a, LogValue b) { return a.value_ <=> b.value_; }

 private:
  double value_ = kNegInf;
};

/// ln Gamma(z) for z > 0 (Lanczos, g = 7, nine coefficients).
double log_gamma(double z);

/// ln k!; exact table for k <= 20.
double log_factorial(std::int64_t k);

/// ln binomial(a, b) for 0 <= b <= a.
double log_binomial(std::int64_t a, std::int64_t b);

/// Principal branch W0 on [-1/e, inf).
double lambert_w0(double x);

/// Lower branch W-1 on [-1/e, 0); returns w <= -1.
double lambert_wm1(double x);

/// ln sum exp(t_i). Entries may be -inf; an all -inf input yields -inf.
/// Throws UsageError on empty input.
double log_sum_exp(std::span<const double> terms);

/// Streaming log-sum-exp against a running maximum.
class LogSumAccumulator {
 public:
  void add(double log_term);
  [[nodiscard]] double value() const;
  [[nodiscard]] std::size_t count() const { return count_; }

 private:
  double max_ = kNegInf;
  double scaled_sum_ = 0.0;  // sum of exp(t_i - max_)
  std::size_t count_ = 0;
};

}  // namespace nspbound::specfun
