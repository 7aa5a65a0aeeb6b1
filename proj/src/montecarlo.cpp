#include "nspbound/montecarlo.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "nspbound/errors.hpp"
#include "nspbound/lp.hpp"
#include "nspbound/parallel.hpp"
#include "nspbound/random.hpp"

namespace nspbound::mc {

namespace {

constexpr std::uint64_t kSupSubstream = 0x5355505800000000ULL;  // "SUPX"
constexpr int kMaxResamples = 100;

double top_s_minus_rest(std::vector<double>& abs_values, std::int64_t s, double C) {
  // Descending order statistics; ties keep the natural index order.
  std::stable_sort(abs_values.begin(), abs_values.end(), std::greater<>());
  const auto mid = abs_values.begin() + s;
  double top = 0.0;
  for (auto it = abs_values.begin(); it != mid; ++it) top += *it;
  double rest = 0.0;
  for (auto it = mid; it != abs_values.end(); ++it) rest += *it;
  return C * top - rest;
}

double condition_number(const Eigen::MatrixXd& g) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

void check_unit(const Eigen::VectorXd& t, Eigen::Index m) {
  if (t.size() != m) throw DomainError("eval_x: t has wrong dimension");
  if (std::abs(t.norm() - 1.0) > 1e-9) throw DomainError("eval_x: t must be a unit vector");
}

std::int64_t count_failures(std::int64_t trials, unsigned threads,
                            const std::function<int(std::int64_t)>& trial,
                            std::int64_t& discarded, std::vector<std::string>& notes) {
  // Per-trial outcome: 1 failure, 0 success, -1 discarded.
  std::vector<int> outcome(static_cast<std::size_t>(trials), 0);
  std::vector<std::string> errors(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
    try {
      outcome[i] = trial(static_cast<std::int64_t>(i));
    } catch (const CheckerError& e) {
      outcome[i] = -1;
      errors[i] = "trial " + std::to_string(i) + " discarded: " + e.what();
    }
  });
  std::int64_t failures = 0;
  discarded = 0;
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (outcome[i] == 1) ++failures;
    if (outcome[i] == -1) {
      ++discarded;
      notes.push_back(errors[i]);
    }
  }
  return failures;
}

}  // namespace

KernelSample sample_kernel(std::int64_t p, std::int64_t m, std::uint64_t seed, std::uint64_t stream) {
  if (p < 1 || m < 1 || m > p) throw UsageError("sample_kernel: requires 1 <= m <= p");
  KernelSample k;
  k.seed = seed;
  k.stream = stream;
  for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
    random::Gaussian normal(random::Philox(seed, stream, static_cast<std::uint64_t>(attempt)));
    Eigen::MatrixXd g(p, m);
    // Column-major fill: generator g_1 first, then g_2, ...
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) g(j, i) = normal();
    }
    if (condition_number(g) <= kConditionLimit) {
      k.generators = std::move(g);
      k.resamples = attempt;
      return k;
    }
  }
  throw CheckerError("sample_kernel: repeated rank-deficient draws");
}

KernelSample sample_kernel(const bounds::Params& params, std::uint64_t seed, std::uint64_t stream) {
  return sample_kernel(params.p, params.m(), seed, stream);
}

double eval_x(const KernelSample& kernel, const Eigen::VectorXd& t, std::int64_t s, double C) {
  check_unit(t, kernel.m());
  if (s < 1 || s >= kernel.p()) throw DomainError("eval_x: requires 1 <= s < p");
  const Eigen::VectorXd z = kernel.generators * t;
  std::vector<double> a(static_cast<std::size_t>(z.size()));
  for (Eigen::Index j = 0; j < z.size(); ++j) a[static_cast<std::size_t>(j)] = std::abs(z(j));
  return top_s_minus_rest(a, s, C);
}

NspResult check_nsp(const KernelSample& kernel, std::int64_t s, double C) {
  const auto p = static_cast<int>(kernel.p());
  const auto m = static_cast<int>(kernel.m());
  if (p > kMaxNspP) throw UsageError("check_nsp: budget exceeded, requires p <= 20");
  if (s > kMaxNspS) throw UsageError("check_nsp: budget exceeded, requires s <= 4");
  if (s < 1 || s >= p) throw UsageError("check_nsp: requires 1 <= s < p");
  if (m < 1) throw UsageError("check_nsp: requires m >= 1");
  if (!(C >= 1.0)) throw UsageError("check_nsp: requires C >= 1");

  // The verdict is scale invariant; normalizing keeps the LP well scaled.
  const double scale = kernel.generators.norm();
  if (!(scale > 0.0)) throw CheckerError("check_nsp: zero kernel");
  const Eigen::MatrixXd g = kernel.generators / scale;

  const int q = p - static_cast<int>(s);
  const std::size_t cols = static_cast<std::size_t>(2 * m + 2 * q);
  const std::size_t rows = static_cast<std::size_t>(q + 1);
  NspResult result;
  result.min_value = std::numeric_limits<double>::infinity();

  std::vector<int> support(static_cast<std::size_t>(s));
  std::iota(support.begin(), support.end(), 0);
  std::vector<int> complement;
  std::vector<char> in_support(static_cast<std::size_t>(p));
  const int patterns = 1 << (s - 1);

  for (;;) {
    std::fill(in_support.begin(), in_support.end(), 0);
    for (int j : support) in_support[static_cast<std::size_t>(j)] = 1;
    complement.clear();
    for (int j = 0; j < p; ++j) {
      if (!in_support[static_cast<std::size_t>(j)]) complement.push_back(j);
    }

    for (int pattern = 0; pattern < patterns; ++pattern) {
      // sigma_0 = +1; the global sign flip gives the same subproblem.
      std::vector<int> signs(static_cast<std::size_t>(s), 1);
      for (int b = 1; b < s; ++b) {
        if (pattern & (1 << (b - 1))) signs[static_cast<std::size_t>(b)] = -1;
      }

      lp::LpProblem prob(rows, cols);
      for (int r = 0; r < q; ++r) {
        const int j = complement[static_cast<std::size_t>(r)];
        for (int i = 0; i < m; ++i) {
          prob.at(r, i) = g(j, i);
          prob.at(r, m + i) = -g(j, i);
        }
        prob.at(r, 2 * m + r) = -1.0;
        prob.at(r, 2 * m + q + r) = 1.0;
        prob.objective[static_cast<std::size_t>(2 * m + r)] = 1.0;
        prob.objective[static_cast<std::size_t>(2 * m + q + r)] = 1.0;
      }
      for (int i = 0; i < m; ++i) {
        double coef = 0.0;
        for (std::size_t b = 0; b < support.size(); ++b) coef += signs[b] * g(support[b], i);
        prob.at(q, i) = coef;
        prob.at(q, m + i) = -coef;
      }
      prob.rhs[static_cast<std::size_t>(q)] = 1.0;

      const auto sol = lp::solve(prob);
      ++result.lp_solved;
      if (sol.status == lp::LpStatus::Infeasible) continue;
      if (sol.status != lp::LpStatus::Optimal) {
        throw CheckerError(std::string("check_nsp: LP ") + lp::to_string(sol.status));
      }
      result.min_value = std::min(result.min_value, sol.value);
      if (sol.value < C * (1.0 - 1e-9)) {
        NspWitness w;
        w.support = support;
        w.signs = signs;
        w.t.resize(m);
        for (int i = 0; i < m; ++i) {
          w.t(i) = (sol.point[static_cast<std::size_t>(i)] -
                    sol.point[static_cast<std::size_t>(m + i)]) / scale;
        }
        w.value = sol.value;
        result.holds = false;
        result.witness = std::move(w);
        return result;
      }
    }

    // Next s-subset in lexicographic order.
    int i = static_cast<int>(s) - 1;
    while (i >= 0 && support[static_cast<std::size_t>(i)] == p - static_cast<int>(s) + i) --i;
    if (i < 0) break;
    ++support[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < s; ++j) {
      support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return result;
}

SupSample sample_sup_x(const KernelSample& kernel, std::int64_t s, double C, std::int64_t samples,
                       std::uint64_t seed) {
  if (samples < 1) throw UsageError("sample_sup_x: requires samples >= 1");
  const auto m = kernel.m();
  SupSample best;
  if (m == 1) {
    best.argmax = Eigen::VectorXd::Ones(1);
    best.max_value = eval_x(kernel, best.argmax, s, C);
    return best;
  }
  random::Gaussian normal(random::Philox(seed, kernel.stream, kSupSubstream));
  best.max_value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd t(m);
  for (std::int64_t k = 0; k < samples; ++k) {
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < m; ++i) t(i) = normal();
      norm = t.norm();
    } while (norm == 0.0);
    t /= norm;
    const double v = eval_x(kernel, t, s, C);
    if (v > best.max_value) {
      best.max_value = v;
      best.argmax = t;
    }
  }
  return best;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "Consistent";
    case Verdict::Violated: return "Violated";
    case Verdict::BoundVacuous: return "BoundVacuous";
  }
  return "Unknown";
}

double clopper_pearson_upper(std::int64_t failures, std::int64_t trials, double confidence) {
  if (trials < 1 || failures < 0 || failures > trials) throw UsageError("clopper_pearson: bad counts");
  if (failures == trials) return 1.0;
  boost::math::beta_distribution<> dist(static_cast<double>(failures + 1),
                                        static_cast<double>(trials - failures));
  return boost::math::quantile(dist, confidence);
}

double clopper_pearson_lower(std::int64_t failures, std::int64_t trials, double confidence) {
  if (trials < 1 || failures < 0 || failures > trials) throw UsageError("clopper_pearson: bad counts");
  if (failures == 0) return 0.0;
  boost::math::beta_distribution<> dist(static_cast<double>(failures),
                                        static_cast<double>(trials - failures + 1));
  return boost::math::quantile(dist, 1.0 - confidence);
}

McReport make_report(std::int64_t trials, std::int64_t failures, double log_theory_bound) {
  McReport r;
  r.trials = trials;
  r.failures = failures;
  r.log_theory_bound = log_theory_bound;
  r.theory_bound = std::exp(log_theory_bound);
  if (trials > 0) {
    r.p_hat = static_cast<double>(failures) / static_cast<double>(trials);
    r.lower_conf = clopper_pearson_lower(failures, trials);
    r.upper_conf = clopper_pearson_upper(failures, trials);
  } else {
    r.upper_conf = 1.0;  // every trial discarded: no information
  }
  if (log_theory_bound >= 0.0) {
    r.verdict = Verdict::BoundVacuous;
  } else if (trials > 0 && r.lower_conf > r.theory_bound) {
    r.verdict = Verdict::Violated;
  } else {
    r.verdict = Verdict::Consistent;
  }
  return r;
}

McReport estimate_nsp_failure(const bounds::Params& params, std::int64_t trials, std::uint64_t seed,
                              unsigned threads) {
  if (trials < 1) throw UsageError("estimate_nsp_failure: requires trials >= 1");
  if (params.p > kMaxNspP || params.s > kMaxNspS) {
    throw UsageError("estimate_nsp_failure: budget exceeded, requires p <= 20 and s <= 4");
  }
  std::int64_t discarded = 0;
  std::vector<std::string> notes;
  const auto failures = count_failures(
      trials, threads,
      [&](std::int64_t i) {
        const auto kernel = sample_kernel(params, seed, static_cast<std::uint64_t>(i));
        return check_nsp(kernel, params.s, params.C).holds ? 0 : 1;
      },
      discarded, notes);
  auto report = make_report(trials - discarded, failures, bounds::pi_bound(params).log_pi);
  report.discarded = discarded;
  report.notes = std::move(notes);
  return report;
}

McReport estimate_psi_failure(std::int64_t l, std::int64_t s, double C, std::int64_t trials,
                              std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw UsageError("estimate_psi_failure: requires trials >= 1");
  const double log_bound = bounds::log_psi(l, s, C);  // validates l, s, C
  std::int64_t discarded = 0;
  std::vector<std::string> notes;
  const auto failures = count_failures(
      trials, threads,
      [&](std::int64_t i) {
        random::Gaussian normal(random::Philox(seed, static_cast<std::uint64_t>(i)));
        std::vector<double> a(static_cast<std::size_t>(l));
        for (auto& v : a) v = std::abs(normal());
        return top_s_minus_rest(a, s, C) > 0.0 ? 1 : 0;
      },
      discarded, notes);
  return make_report(trials, failures, log_bound);
}

McReport estimate_supx_failure(const bounds::Params& params, std::int64_t trials,
                               std::int64_t samples, std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw UsageError("estimate_supx_failure: requires trials >= 1");
  std::int64_t discarded = 0;
  std::vector<std::string> notes;
  const auto failures = count_failures(
      trials, threads,
      [&](std::int64_t i) {
        const auto kernel = sample_kernel(params, seed, static_cast<std::uint64_t>(i));
        return sample_sup_x(kernel, params.s, params.C, samples, seed).max_value > 0.0 ? 1 : 0;
      },
      discarded, notes);
  auto report = make_report(trials - discarded, failures, bounds::pi_bound(params).log_pi);
  report.discarded = discarded;
  report.notes = std::move(notes);
  return report;
}

}  // namespace nspbound::mc
