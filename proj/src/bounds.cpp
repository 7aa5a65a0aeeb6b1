#include "nspbound/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nspbound/errors.hpp"
#include "nspbound/specfun.hpp"

namespace nspbound::bounds {

namespace {

using specfun::log_binomial;
using specfun::log_factorial;
using specfun::log_gamma;

constexpr double kPi = std::numbers::pi;
const double kLogPi = std::log(kPi);
const double kLog2 = std::log(2.0);
const double kLogSqrtPi = 0.5 * std::log(kPi);

void check_k(const Params& params, std::int64_t k, const char* what) {
  if (k < 0 || k >= params.m()) {
    throw DomainError(std::string(what) + ": requires 0 <= k <= m-1, got k=" + std::to_string(k) +
                      " m=" + std::to_string(params.m()));
  }
}

std::int64_t h_cap_unchecked(const Params& params, double pt) {
  const double raw = std::floor(kPi * pt / 2.0);
  const auto m = params.m();
  return raw >= static_cast<double>(m) ? m : static_cast<std::int64_t>(raw);
}

struct TermParts {
  double log_term;
  double log_q;
  std::int64_t h;
};

// Same algebra as log_term() but every Gamma comes from the table.
TermParts table_term(const Params& prm, const HalfLogGammaTable& t, std::int64_t k,
                     double log_c2s, double log_psi_base) {
  const auto m = prm.m();
  const auto l = prm.p - k;
  const double pt = (prm.C * prm.C - 1.0) * static_cast<double>(prm.s) + static_cast<double>(l);
  const double log_pt = std::log(pt);

  double v = t.binomial(prm.p, k);
  v += 0.5 * static_cast<double>(m - 1 - k) * (log_c2s - log_pt);
  v += t.half(2 * prm.p - 2 * k - prm.n - 1) - t.half(l) - t.half(m - k);
  // psi_{p-k}(C)
  v += t.binomial(l, prm.s) + 0.5 * static_cast<double>(l - prm.s) * log_psi_base +
       t.half(l) - t.half(prm.s) - t.factorial(l - prm.s);

  double lq = 0.0;
  std::int64_t h = m;
  if (k > 0) {
    h = h_cap_unchecked(prm, pt);
    lq = 0.5 * (static_cast<double>(h + k - m) * (kLog2 - kLogPi - log_pt) + t.factorial(h) -
                t.factorial(m - k));
  }
  return {v + lq, lq, h};
}

template <typename Visitor>
void visit_terms(const Params& prm, const HalfLogGammaTable& table, Visitor&& visit) {
  if (table.max_index() < 2 * prm.p + 2) throw UsageError("HalfLogGammaTable too small for p");
  const double c2 = prm.C * prm.C;
  const double log_c2s = std::log(c2 * static_cast<double>(prm.s));
  const double log_psi_base = std::log(4.0 * c2 * static_cast<double>(prm.s)) - kLogPi;
  for (std::int64_t k = 0; k < prm.m(); ++k) {
    const TermParts parts = table_term(prm, table, k, log_c2s, log_psi_base);
    if (!std::isfinite(parts.log_term)) {
      throw DomainError("pi_bound: non-finite term at k=" + std::to_string(k));
    }
    visit(k, parts);
  }
}

}  // namespace

const double kMinDelta = 1.0 / (1.0 + kPi / 2.0);

Params Params::make(double C, std::int64_t s, std::int64_t n, std::int64_t p) {
  if (!(C >= 1.0) || !std::isfinite(C)) throw DomainError("invalid params: require C >= 1");
  if (s <= 0) throw DomainError("invalid params: require s > 0");
  if (s >= n) throw DomainError("invalid params: require s < n");
  if (n >= p) throw DomainError("invalid params: require n < p");
  return Params{C, s, n, p};
}

PhaseParams PhaseParams::make(double rho, double delta, double C) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("invalid phase point: require 0 < rho < 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("invalid phase point: require 0 < delta < 1");
  if (!(C >= 1.0) || !std::isfinite(C)) throw DomainError("invalid phase point: require C >= 1");
  return PhaseParams{rho, delta, C};
}

Params PhaseParams::discretize(std::int64_t n) const {
  const auto s = static_cast<std::int64_t>(std::floor(rho * static_cast<double>(n)));
  const auto p = static_cast<std::int64_t>(std::floor(static_cast<double>(n) / delta));
  if (!(0 < s && s < n && n < p)) {
    throw DegenerateDiscretization("degenerate discretization: rho=" + std::to_string(rho) +
                                   " delta=" + std::to_string(delta) + " n=" + std::to_string(n) +
                                   " gives s=" + std::to_string(s) + " p=" + std::to_string(p));
  }
  return Params{C, s, n, p};
}

double p_tilde(const Params& params, std::int64_t k) {
  check_k(params, k, "p_tilde");
  return (params.C * params.C - 1.0) * static_cast<double>(params.s) +
         static_cast<double>(params.p - k);
}

std::int64_t h_cap(const Params& params, std::int64_t k) {
  return h_cap_unchecked(params, p_tilde(params, k));
}

bool h_cap_assumption_holds(const Params& params, std::int64_t k) {
  if (k == 0) return true;
  return h_cap(params, k) > params.m() - k + 1;
}

double log_psi(std::int64_t l, std::int64_t s, double C) {
  if (s < 1 || s >= l) {
    throw DomainError("log_psi: requires 1 <= s < l, got s=" + std::to_string(s) +
                      " l=" + std::to_string(l));
  }
  if (!(C >= 1.0)) throw DomainError("log_psi: requires C >= 1");
  const auto ld = static_cast<double>(l);
  const auto sd = static_cast<double>(s);
  return log_binomial(l, s) + 0.5 * (ld - sd) * (std::log(4.0 * C * C * sd) - kLogPi) +
         log_gamma(ld / 2.0) - log_gamma(sd / 2.0) - log_factorial(l - s);
}

double log_q(const Params& params, std::int64_t k) {
  check_k(params, k, "log_q");
  if (k == 0) return 0.0;
  const double pt = p_tilde(params, k);
  const auto h = h_cap(params, k);
  const auto m = params.m();
  return 0.5 * (static_cast<double>(h + k - m) * (kLog2 - kLogPi - std::log(pt)) +
                log_factorial(h) - log_factorial(m - k));
}

double log_term(const Params& params, std::int64_t k) {
  check_k(params, k, "log_term");
  const auto& [C, s, n, p] = params;
  if (s >= p - k) throw DomainError("log_term: requires s < p-k");
  const double pt = p_tilde(params, k);
  const double power = 0.5 * static_cast<double>(p - n - 1 - k) *
                       (std::log(C * C * static_cast<double>(s)) - std::log(pt));
  const double gamma_ratio = log_gamma(static_cast<double>(2 * p - 2 * k - n - 1) / 2.0) -
                             log_gamma(static_cast<double>(p - k) / 2.0) -
                             log_gamma(static_cast<double>(p - n - k) / 2.0);
  return log_binomial(p, k) + power + gamma_ratio + log_psi(p - k, s, C) + log_q(params, k);
}

double log_h(const Params& params) {
  const auto& [C, s, n, p] = params;
  const auto m = params.m();
  const double pt0 = (C * C - 1.0) * static_cast<double>(s) + static_cast<double>(p);
  return kLog2 + kLogSqrtPi +
         0.5 * static_cast<double>(m - 1) * (std::log(C * C * static_cast<double>(s)) - std::log(pt0)) +
         log_gamma(static_cast<double>(m - 1 + p) / 2.0) - log_gamma(static_cast<double>(p) / 2.0) -
         log_gamma(static_cast<double>(m) / 2.0) + log_psi(p, s, C);
}

double log_b_term(const Params& params, std::int64_t k) {
  const auto m = params.m();
  if (k < 1 || k > m) {
    throw DomainError("log_b_term: requires 1 <= k <= m, got k=" + std::to_string(k) +
                      " m=" + std::to_string(m));
  }
  const auto& [C, s, n, p] = params;
  const double c2 = C * C;
  const double sd = static_cast<double>(s);
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  const double pt = p_tilde(params, m - k);
  const auto h = h_cap(params, m - k);

  double v = log_binomial(p, n + k) + log_binomial(n + k, s);
  v += 0.5 * (kd + 1.0) * std::log(c2 * sd / pt);
  v += log_gamma(nd / 2.0 + kd - 0.5) - log_gamma((nd + kd) / 2.0) - log_gamma(kd / 2.0);
  v += 0.5 * static_cast<double>(n + k - s) * (std::log(4.0 * c2 * sd) - kLogPi);
  v += log_gamma((nd + kd) / 2.0) + 0.5 * log_factorial(h) - log_gamma(sd / 2.0) -
       log_factorial(n + k - s) - 0.5 * log_factorial(k);
  v += 0.5 * static_cast<double>(h - k) * (kLog2 - kLogPi - std::log(pt));
  return v;
}

HalfLogGammaTable::HalfLogGammaTable(std::int64_t max_index) {
  if (max_index < 1) throw UsageError("HalfLogGammaTable: max_index must be >= 1");
  values_.resize(static_cast<std::size_t>(max_index) + 1, 0.0);
  for (std::int64_t j = 1; j <= max_index; ++j) {
    values_[static_cast<std::size_t>(j)] = log_gamma(static_cast<double>(j) / 2.0);
  }
}

HalfLogGammaTable HalfLogGammaTable::for_p(std::int64_t p) { return HalfLogGammaTable(2 * p + 2); }

BoundReport pi_bound(const Params& params) {
  return pi_bound(params, HalfLogGammaTable::for_p(params.p));
}

BoundReport pi_bound(const Params& params, const HalfLogGammaTable& table) {
  BoundReport report;
  report.params = params;
  report.terms.reserve(static_cast<std::size_t>(params.m()));
  specfun::LogSumAccumulator acc;
  double best = specfun::kNegInf;
  const auto m = params.m();
  visit_terms(params, table, [&](std::int64_t k, const TermParts& parts) {
    report.terms.push_back({k, parts.log_term});
    acc.add(parts.log_term);
    if (parts.log_term > best) {
      best = parts.log_term;
      report.dominant_k = k;
    }
    if (k >= 1 && parts.h <= m - k + 1) {
      auto& d = report.diagnostics;
      if (d.h_assumption_violations++ == 0) d.first_h_violation = k;
    }
    if (parts.log_q > 0.0) ++report.diagnostics.positive_log_q;
  });
  report.log_pi = kLogSqrtPi + acc.value();
  return report;
}

double log_pi(const Params& params, const HalfLogGammaTable& table) {
  specfun::LogSumAccumulator acc;
  visit_terms(params, table, [&](std::int64_t, const TermParts& parts) { acc.add(parts.log_term); });
  return kLogSqrtPi + acc.value();
}

double borne_r_lhs(const PhaseParams& phase) {
  const double rho = phase.rho;
  const double delta = phase.delta;
  if (!(rho > 0.0 && rho < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw DomainError("borne_r_lhs: requires 0 < rho < 1 and 0 < delta < 1");
  }
  if (!(phase.C >= 1.0)) throw DomainError("borne_r_lhs: requires C >= 1");
  const double c2 = phase.C * phase.C;
  const double e = std::numbers::e;
  const double a = 1.0 + (c2 - 1.0) * rho;        // 1 + (C^2 - 1) rho
  const double b = 1.0 + (2.0 * c2 - 1.0) * rho;  // 1 + (2C^2 - 1) rho
  const double one_m_rho = 1.0 - rho;

  const double t1 =
      rho * std::log(std::sqrt(kPi / (2.0 * e * c2)) * one_m_rho * one_m_rho / (rho * rho));
  const double t2 = std::log(phase.C * e * std::sqrt(rho * (1.0 - delta) * a) /
                             (one_m_rho * b * std::sqrt(delta)));
  const double t3 = std::log(std::sqrt(2.0 / (e * kPi)) * b /
                             (one_m_rho * std::sqrt(delta * (1.0 - delta) * a))) /
                    delta;
  return t1 + t2 + t3;
}

bool borne_r_region(const PhaseParams& phase) {
  return phase.delta >= kMinDelta && borne_r_lhs(phase) <= 0.0;
}

}  // namespace nspbound::bounds
