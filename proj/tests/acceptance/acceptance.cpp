// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nspbound/bounds.hpp"
#include "nspbound/cli.hpp"
#include "nspbound/curve_io.hpp"
#include "nspbound/montecarlo.hpp"
#include "nspbound/phase.hpp"
#include "nspbound/specfun.hpp"

using namespace nspbound;

namespace {

// high-precision oracles (mpmath, 50 digits)
constexpr double kSmallTerm0 = -1.7694236859546693206;
constexpr double kSmallTerm1 = -0.15077531154242860156;
constexpr double kSmallLogPi = 0.60238199028247416565;
constexpr double kPsi4 = 0.54037964609246811437;
constexpr double kPsi12 = 7.6848870754325595e-5;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures without stopping at the first one.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_++ < 5) msgs_ += (msgs_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& what) { notes_ += (notes_.empty() ? "" : ", ") + what; }
  Outcome outcome() const {
    if (failures_ == 0) return {true, notes_};
    return {false, std::to_string(failures_) + " failed check(s): " + msgs_};
  }

 private:
  int failures_ = 0;
  std::string msgs_, notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// 1 ------------------------------------------------------------------------
Outcome special_functions() {
  Checker c;
  const double inv_e = std::exp(-1.0);
  double worst0 = 0.0, worstm = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double u = i / 999.0;
    const double x = -inv_e + (1e3 + inv_e) * u * u * u;
    const double w = specfun::lambert_w0(x);
    worst0 = std::max(worst0, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
  }
  for (int i = 0; i < 1000; ++i) {
    const double x = -inv_e * std::pow(1e-300, i / 1000.0);
    const double w = specfun::lambert_wm1(x);
    worstm = std::max(worstm, std::abs(w * std::exp(w) - x));
  }
  c.expect(worst0 <= 1e-12, "W0 residual " + fmt("%.3g", worst0));
  c.expect(worstm <= 1e-12, "W-1 residual " + fmt("%.3g", worstm));
  c.expect(std::abs(specfun::lambert_wm1(-inv_e) + 1.0) <= 1e-10, "W-1(-1/e) != -1");

  // Gamma(z+1) = sqrt(2 pi z)(z/e)^z exp(theta/12z), 0 < theta < 1, so also (z/e)^z <= Gamma(z+1)
  int inside = 0;
  for (int i = 0; i < 200; ++i) {
    const double lo = 1.0 / 12.0 + 1e-9;
    const double z = lo * std::pow(1e6 / lo, i / 199.0);
    const double lg = specfun::log_gamma(z + 1.0);
    const double base = z * std::log(z / std::numbers::e);
    const double st = 0.5 * std::log(2.0 * std::numbers::pi * z) + base;
    const double slack = 8 * std::numeric_limits<double>::epsilon() * std::abs(lg);
    if (base <= lg && st <= lg + slack && lg <= st + 1.0 / (12.0 * z) + slack) ++inside;
  }
  c.expect(inside == 200, std::to_string(200 - inside) + " z outside the Stirling envelope");
  c.note("W0 res " + fmt("%.2g", worst0) + ", W-1 res " + fmt("%.2g", worstm) + ", Stirling 200/200");
  return c.outcome();
}

// 2 ------------------------------------------------------------------------
Outcome bound_assembly() {
  Checker c;
  const auto rep = bounds::pi_bound(bounds::Params::make(1.0, 1, 3, 5));
  c.expect(rep.terms.size() == 2, "term count");
  if (rep.terms.size() == 2) {
    c.expect(rel_close(rep.terms[0].log_term, kSmallTerm0, 1e-10), "term 0");
    c.expect(rel_close(rep.terms[1].log_term, kSmallTerm1, 1e-10), "term 1");
  }
  c.expect(rel_close(rep.log_pi, kSmallLogPi, 1e-10), "log_pi " + fmt("%.17g", rep.log_pi));

  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto p = std::uniform_int_distribution<std::int64_t>(3, 300)(rng);
    const auto n = std::uniform_int_distribution<std::int64_t>(2, p - 1)(rng);
    const auto s = std::uniform_int_distribution<std::int64_t>(1, n - 1)(rng);
    const double C = std::uniform_real_distribution<double>(1.0, 4.0)(rng);
    const auto prm = bounds::Params::make(C, s, n, p);
    for (std::int64_t k = 1; k <= prm.m(); ++k) {
      const double diff = bounds::log_b_term(prm, k) - bounds::log_term(prm, prm.m() - k);
      const double expect = std::log(C * C * s / bounds::p_tilde(prm, prm.m() - k));
      worst = std::max(worst, std::abs(diff - expect) / std::max(1.0, std::abs(bounds::log_b_term(prm, k))));
    }
  }
  c.expect(worst <= 1e-10, "reindex identity residual " + fmt("%.3g", worst));
  c.note("log_pi " + fmt("%.15g", rep.log_pi) + ", reindex residual " + fmt("%.2g", worst));
  return c.outcome();
}

// 3 ------------------------------------------------------------------------
Outcome theorem_consistency() {
  Checker c;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(0.39, 0.99), ur(2e-4, 0.2), uc(1.0, 4.0);
  int sampled = 0, tries = 0;
  double worst_final = -std::numeric_limits<double>::infinity();
  while (sampled < 10 && ++tries < 100000) {
    const auto ph = bounds::PhaseParams::make(ur(rng), ud(rng), uc(rng));
    if (ph.delta < 0.39 || bounds::borne_r_lhs(ph) > -0.01) continue;
    ++sampled;
    double prev = std::numeric_limits<double>::infinity();
    for (std::int64_t n : {5000, 10000, 20000}) {
      const double lp = bounds::pi_bound(ph.discretize(n)).log_pi;
      c.expect(lp < prev, "not decreasing at rho=" + fmt("%.4g", ph.rho) + " delta=" + fmt("%.4g", ph.delta));
      prev = lp;
    }
    c.expect(prev < 0.0, "log_pi >= 0 at n=20000");
    worst_final = std::max(worst_final, prev);
  }
  c.expect(sampled == 10, "could not sample 10 points");
  c.note("10 points, max log_pi at n=20000: " + fmt("%.4g", worst_final));
  return c.outcome();
}

// 4 ------------------------------------------------------------------------
Outcome psi_empirical() {
  Checker c;
  const auto r4 = mc::estimate_psi_failure(4, 1, 1.0, 100000, 4);
  c.expect(std::abs(std::exp(bounds::log_psi(4, 1, 1.0)) - kPsi4) <= 1e-12, "psi_4 oracle");
  c.expect(r4.lower_conf <= kPsi4, "l=4 lower bound " + fmt("%.5g", r4.lower_conf));
  c.expect(r4.verdict != mc::Verdict::Violated, "l=4 violated");
  const auto r12 = mc::estimate_psi_failure(12, 1, 1.0, 100000, 12);
  c.expect(std::abs(std::exp(bounds::log_psi(12, 1, 1.0)) / kPsi12 - 1.0) <= 1e-12, "psi_12 oracle");
  c.expect(r12.lower_conf <= kPsi12, "l=12 lower bound " + fmt("%.5g", r12.lower_conf));
  c.expect(r12.verdict == mc::Verdict::Consistent, "l=12 verdict");
  c.note("l=4 p_hat " + fmt("%.4f", r4.p_hat) + " (psi " + fmt("%.4f", kPsi4) + "), l=12 failures " +
         std::to_string(r12.failures) + "/100000, lower " + fmt("%.3g", r12.lower_conf) + " (psi " +
         fmt("%.3g", kPsi12) + ")");
  return c.outcome();
}

// 5 ------------------------------------------------------------------------
std::pair<double, double> top_and_rest(const Eigen::VectorXd& z, std::int64_t s) {
  std::vector<double> a(static_cast<std::size_t>(z.size()));
  for (Eigen::Index j = 0; j < z.size(); ++j) a[static_cast<std::size_t>(j)] = std::abs(z(j));
  std::sort(a.begin(), a.end(), std::greater<>());
  double top = 0.0, rest = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) (static_cast<std::int64_t>(j) < s ? top : rest) += a[j];
  return {top, rest};
}

Outcome exact_checker() {
  Checker c;
  const auto prm = bounds::Params::make(1.0, 1, 6, 8);
  constexpr int kDirections = 100000;
  std::vector<Eigen::Vector2d> dirs(kDirections);
  for (int i = 0; i < kDirections; ++i) {
    const double th = std::numbers::pi * i / kDirections;
    dirs[static_cast<std::size_t>(i)] = {std::cos(th), std::sin(th)};
  }
  int fails = 0, sup_positive = 0, sweep_positive = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto k = mc::sample_kernel(prm, 500 + seed);
    for (double C : {1.0, 2.0}) {
      try {
        const auto res = mc::check_nsp(k, 1, C);
        fails += !res.holds;
        // (a) sampled violation implies checker failure
        const auto sup = mc::sample_sup_x(k, 1, C, 1000, seed);
        if (sup.max_value > 0.0) {
          ++sup_positive;
          c.expect(!res.holds, "sup_x > 0 but check_nsp holds, seed " + std::to_string(seed));
        }
        // (b) vertex enumeration: X is sublinear on each fixed-sign cone, so
        // its sign on the circle is attained at some t orthogonal to a row g^j
        double vmax = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < k.generators.rows(); ++j) {
          Eigen::Vector2d t(-k.generators(j, 1), k.generators(j, 0));
          vmax = std::max(vmax, mc::eval_x(k, t.normalized(), 1, C));
        }
        c.expect(res.holds == (vmax <= 0.0), "vertex oracle disagrees, seed " + std::to_string(seed));
        double smax = -std::numeric_limits<double>::infinity();
        for (const auto& t : dirs) smax = std::max(smax, mc::eval_x(k, t, 1, C));
        if (smax > 0.0) {
          ++sweep_positive;
          c.expect(!res.holds, "sweep found X > 0 but check_nsp holds, seed " + std::to_string(seed));
        }
        if (!res.holds && res.witness) {
          const auto [top, rest] = top_and_rest(k.generators * res.witness->t, 1);
          c.expect(C * top > rest, "witness is not a violation");
        }
      } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
      }
    }
  }
  // (c) m = 1
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto k = mc::sample_kernel(8, 1, 900 + seed);
    Eigen::VectorXd one(1);
    one << 1.0;
    const double C = seed % 2 ? 2.0 : 1.0;
    agree += mc::check_nsp(k, 1, C).holds == (mc::eval_x(k, one, 1, C) <= 0.0);
  }
  c.expect(agree == 200, "m=1 identity " + std::to_string(agree) + "/200");
  c.note("400 checks, " + std::to_string(fails) + " failures, sup_x>0 " + std::to_string(sup_positive) +
         ", sweep>0 " + std::to_string(sweep_positive) + ", m=1 " + std::to_string(agree) + "/200");
  return c.outcome();
}

// 6 ------------------------------------------------------------------------
Outcome bound_validity() {
  Checker c;
  const auto r = mc::estimate_nsp_failure(bounds::Params::make(1.0, 1, 8, 10), 500, 1);
  c.expect(r.verdict != mc::Verdict::Violated, "library verdict Violated");
  const char* argv[] = {"nspbound", "mc", "nsp", "-s", "1", "-n", "8", "-p", "10", "-C", "1",
                        "--trials", "500", "--seed", "1"};
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(std::size(argv)), argv, out, err);
  c.expect(code == 0, "cmd mc exit " + std::to_string(code));
  c.note(std::string("verdict ") + mc::to_string(r.verdict) + ", p_hat " + fmt("%.3f", r.p_hat) +
         ", bound " + fmt("%.4g", r.theory_bound) + ", exit " + std::to_string(code));
  return c.outcome();
}

// 7 ------------------------------------------------------------------------
Outcome curve_orientation() {
  Checker c;
  int points = 0;
  for (double delta : phase::default_delta_grid()) {
    double prev = std::numeric_limits<double>::infinity();
    for (double C : {1.0, 2.0, 3.0, 4.0}) {
      const auto sol = phase::solve_rho_borne_r(delta, C);
      if (!sol.rho) {
        c.expect(false, "no root at delta=" + fmt("%.4g", delta));
        break;
      }
      c.expect(*sol.rho <= prev, "order broken at delta=" + fmt("%.4g", delta));
      prev = *sol.rho;
    }
    ++points;
  }
  c.note(std::to_string(points) + " grid points, C=1..4");
  return c.outcome();
}

// 8 ------------------------------------------------------------------------
Outcome lambert_fit() {
  Checker c;
  std::vector<phase::PhasePoint> pts;
  for (double d : phase::uniform_grid(0.4, 0.9, 12)) pts.push_back({d, phase::lambert_rho(d, {1.38, 0.3394})});
  const auto fit = phase::fit_lambert(pts);
  c.expect(std::abs(fit.params.A - 1.38) <= 1e-3, "A = " + fmt("%.6f", fit.params.A));
  c.expect(std::abs(fit.params.B - 0.3394) <= 1e-3, "B = " + fmt("%.6f", fit.params.B));
  c.note("A " + fmt("%.6f", fit.params.A) + ", B " + fmt("%.6f", fit.params.B));
  return c.outcome();
}

// 9 ------------------------------------------------------------------------
Outcome scale_determinism() {
  Checker c;
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto p = std::uniform_int_distribution<std::int64_t>(5, 12)(rng);
    const auto m = std::uniform_int_distribution<std::int64_t>(1, 3)(rng);
    const auto s = std::uniform_int_distribution<std::int64_t>(1, std::min<std::int64_t>(3, p - m - 1))(rng);
    const double C = std::uniform_real_distribution<double>(1.0, 2.5)(rng);
    const std::uint64_t seed = rng();

    const auto k = mc::sample_kernel(p, m, seed);
    const auto base = mc::check_nsp(k, s, C);
    for (double lambda : {1e-3, 1.0, 1e3}) {
      auto scaled = k;
      scaled.generators *= lambda;
      c.expect(mc::check_nsp(scaled, s, C).holds == base.holds, "scale invariance, case " + std::to_string(i));
    }

    const auto r1 = mc::estimate_psi_failure(p, s, C, 200, seed, 1);
    const auto r2 = mc::estimate_psi_failure(p, s, C, 200, seed, 2);
    c.expect(r1 == r2, "psi report not reproducible, case " + std::to_string(i));
    const auto prm = bounds::Params::make(C, s, p - m, p);
    c.expect(mc::estimate_nsp_failure(prm, 5, seed, 1) == mc::estimate_nsp_failure(prm, 5, seed, 2),
             "nsp report not reproducible, case " + std::to_string(i));

    std::vector<phase::PhasePoint> pts;
    double d = 0.0;
    const int count = std::uniform_int_distribution<int>(1, 40)(rng);
    for (int j = 0; j < count; ++j) {
      d += std::uniform_real_distribution<double>(1e-3, 0.02)(rng);
      pts.push_back({d, std::uniform_real_distribution<double>(1e-6, 0.99)(rng)});
    }
    const auto text = io::curve_csv(pts);
    std::istringstream in(text);
    const auto back = io::read_curve_csv(in);
    c.expect(back.size() == pts.size() && io::curve_csv(back) == text, "CSV round trip, case " + std::to_string(i));
  }
  c.note("100 cases");
  return c.outcome();
}

// 10 -----------------------------------------------------------------------
Outcome full_scale() {
  Checker c;
  const char* argv[] = {"nspbound", "curve", "pi", "-C", "1", "-n", "200000", "--points", "60"};
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(std::size(argv)), argv, out, err);
  c.expect(code == 0, "exit " + std::to_string(code) + ": " + err.str());
  std::vector<phase::PhasePoint> pts;
  try {
    std::istringstream in(out.str());
    pts = io::read_curve_csv(in);
  } catch (const std::exception& e) {
    c.expect(false, std::string("bad CSV: ") + e.what());
  }
  c.expect(pts.size() == 60, std::to_string(pts.size()) + " points");
  // every per-k term at each boundary point and its neighbour must be finite
  std::size_t terms = 0;
  for (const auto& pt : pts) {
    // rho = s/n exactly; floor(rho n) can land on s - 1 in floating point
    const auto prm = bounds::PhaseParams::make(pt.rho, pt.delta, 1.0).discretize(200000);
    const std::int64_t s = std::llround(pt.rho * 200000.0);
    const auto table = bounds::HalfLogGammaTable::for_p(prm.p);
    for (std::int64_t ds : {0, 1}) {
      const auto q = bounds::Params::make(1.0, s + ds, prm.n, prm.p);
      const auto rep = bounds::pi_bound(q, table);
      for (const auto& t : rep.terms) c.expect(std::isfinite(t.log_term), "non-finite term");
      c.expect(std::isfinite(rep.log_pi), "non-finite log_pi");
      if (ds == 0) c.expect(rep.log_pi <= 0.0, "boundary point has log_pi > 0");
      if (ds == 1) c.expect(rep.log_pi > 0.0, "point above boundary has log_pi <= 0");
      terms += rep.terms.size();
    }
  }
  if (!pts.empty())
    c.note("60 points, rho " + fmt("%.4g", pts.front().rho) + ".." + fmt("%.4g", pts.back().rho) + ", " +
           std::to_string(terms) + " finite terms");
  return c.outcome();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "special functions", 1.0, special_functions},
      {2, "bound assembly", 1.0, bound_assembly},
      {3, "closed-form region consistency", 30.0, theorem_consistency},
      {4, "psi failure rate", 10.0, psi_empirical},
      {5, "exact NSP checker", 60.0, exact_checker},
      {6, "bound validity MC", 60.0, bound_validity},
      {7, "curve family orientation", 10.0, curve_orientation},
      {8, "Lambert fit round trip", 5.0, lambert_fit},
      {9, "scale and determinism", 30.0, scale_determinism},
      {10, "full-scale pi curve", 300.0, full_scale},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.limit_s) {
      o.pass = false;
      o.detail += " [over time limit " + fmt("%.0f", cr.limit_s) + " s]";
    }
    failed += !o.pass;
    std::printf("%s  %2d  %-32s %8.2f s  %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
