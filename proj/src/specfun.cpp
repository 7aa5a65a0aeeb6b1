#include "nspbound/specfun.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <string>

#include "nspbound/errors.hpp"

namespace nspbound::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvE = 1.0 / std::numbers::e;
// e = kEHi + kELo to ~32 digits; used for e*x + 1 near the branch point.
constexpr double kEHi = std::numbers::e;
constexpr double kELo = 1.4456468917292502e-16;

constexpr int kLanczosG = 7;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr std::array<std::uint64_t, 21> kFactorials = [] {
  std::array<std::uint64_t, 21> f{};
  f[0] = 1;
  for (std::size_t k = 1; k < f.size(); ++k) f[k] = f[k - 1] * k;
  return f;
}();

// Every k! with k <= 20 is exactly representable as a double.
const std::array<double, 21>& log_factorial_table() {
  static const std::array<double, 21> table = [] {
    std::array<double, 21> t{};
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = std::log(static_cast<double>(kFactorials[k]));
    return t;
  }();
  return table;
}

double lanczos_log_gamma(double z) {
  // Valid for z >= 0.5.
  const double x = z - 1.0;
  double a = kLanczosCoef[0];
  const double t = x + kLanczosG + 0.5;
  for (int i = 1; i < static_cast<int>(kLanczosCoef.size()); ++i) a += kLanczosCoef[i] / (x + i);
  return 0.5 * std::log(2.0 * kPi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

// e*x + 1 with the rounding of e compensated.
double branch_distance(double x) { return std::fma(kEHi, x, 1.0) + kELo * x; }

// Series of W around the branch point in p = +-sqrt(2(e x + 1)).
double branch_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 +
                    p * (11.0 / 72.0 +
                    p * (-43.0 / 540.0 + p * (769.0 / 17280.0 + p * (-221.0 / 8505.0))))));
}

// Halley on f(w) = w e^w - x, scaled by e^-w so large |w| never overflows.
double halley(double x, double w) {
  constexpr int kMaxIter = 50;
  for (int i = 0; i < kMaxIter; ++i) {
    const double r = w - x * std::exp(-w);
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = r / (wp1 - (w + 2.0) * r / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

}  // namespace

LogValue::LogValue(double log_value) : value_(log_value) {
  if (std::isnan(log_value)) throw DomainError("LogValue: NaN");
}

LogValue LogValue::from_linear(double x) {
  if (!(x >= 0.0)) throw DomainError("LogValue: negative or NaN linear value");
  return LogValue(std::log(x));
}

LogValue operator+(LogValue a, LogValue b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double hi = std::max(a.value_, b.value_);
  const double lo = std::min(a.value_, b.value_);
  return LogValue(hi + std::log1p(std::exp(lo - hi)));
}

LogValue operator*(LogValue a, LogValue b) {
  if (a.is_zero() || b.is_zero()) return LogValue::zero();
  return LogValue(a.value_ + b.value_);
}

LogValue LogValue::pow(double exponent) const {
  if (exponent == 0.0) return one();
  if (is_zero()) {
    if (exponent < 0.0) throw DomainError("LogValue::pow: zero to a negative power");
    return zero();
  }
  return LogValue(value_ * exponent);
}

double log_gamma(double z) {
  if (!(z > 0.0)) throw DomainError("log_gamma: requires z > 0, got " + std::to_string(z));
  if (z <= 21.0 && z == std::floor(z)) return log_factorial_table()[static_cast<std::size_t>(z) - 1];
  if (z < 0.5) return std::log(kPi / std::sin(kPi * z)) - lanczos_log_gamma(1.0 - z);
  return lanczos_log_gamma(z);
}

double log_factorial(std::int64_t k) {
  if (k < 0) throw DomainError("log_factorial: requires k >= 0");
  if (k <= 20) return log_factorial_table()[static_cast<std::size_t>(k)];
  return lanczos_log_gamma(static_cast<double>(k) + 1.0);
}

double log_binomial(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 0 || b > a) {
    throw DomainError("log_binomial: requires 0 <= b <= a, got a=" + std::to_string(a) +
                      " b=" + std::to_string(b));
  }
  if (b == 0 || b == a) return 0.0;
  return log_factorial(a) - log_factorial(b) - log_factorial(a - b);
}

double lambert_w0(double x) {
  if (std::isnan(x) || x < -kInvE) throw DomainError("lambert_w0: requires x >= -1/e");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  const double d = std::max(branch_distance(x), 0.0);
  if (d <= 1e-6 * kEHi) return branch_series(std::sqrt(2.0 * d));

  double w;
  if (x < -0.25) {
    w = branch_series(std::sqrt(2.0 * d));
  } else if (x < 0.5) {
    w = x * (1.0 - x * (1.0 - x * (1.5 - x * 8.0 / 3.0)));
  } else {
    // Winitzki's global approximation.
    const double l = std::log1p(x);
    w = l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  return halley(x, w);
}

double lambert_wm1(double x) {
  if (std::isnan(x) || x < -kInvE || x >= 0.0) {
    throw DomainError("lambert_wm1: requires -1/e <= x < 0");
  }
  const double d = std::max(branch_distance(x), 0.0);
  if (d <= 1e-6 * kEHi) return branch_series(-std::sqrt(2.0 * d));

  double w;
  if (x < -0.25) {
    w = branch_series(-std::sqrt(2.0 * d));
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  w = halley(x, w);
  return std::min(w, -1.0);
}

void LogSumAccumulator::add(double t) {
  if (std::isnan(t)) throw DomainError("log_sum_exp: NaN term");
  ++count_;
  if (t == kNegInf) return;
  if (t == std::numeric_limits<double>::infinity()) {
    max_ = t;
    scaled_sum_ = 1.0;
    return;
  }
  if (t <= max_) {
    scaled_sum_ += std::exp(t - max_);
  } else {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - t) + 1.0;
    max_ = t;
  }
}

double LogSumAccumulator::value() const {
  if (count_ == 0) throw UsageError("log_sum_exp: empty input");
  if (max_ == kNegInf || std::isinf(max_)) return max_;
  return max_ + std::log(scaled_sum_);
}

double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) throw UsageError("log_sum_exp: empty input");
  LogSumAccumulator acc;
  for (double t : terms) acc.add(t);
  return acc.value();
}

}  // namespace nspbound::specfun
