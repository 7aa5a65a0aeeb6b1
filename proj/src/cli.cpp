#include "nspbound/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "nspbound/bounds.hpp"
#include "nspbound/curve_io.hpp"
#include "nspbound/errors.hpp"
#include "nspbound/montecarlo.hpp"
#include "nspbound/phase.hpp"

namespace nspbound::cli {

namespace {

using io::format_decimal;

struct BoundOpts {
  std::int64_t s = 0, n = 0, p = 0;
  double C = 1.0;
  bool terms = false;
};

struct CurveOpts {
  std::string kind;
  double C = 1.0;
  std::int64_t n = 200000;
  std::optional<double> A, B;
  double delta_min = 0.39, delta_max = 0.99;
  int points = 60;
  double log_threshold = 0.0;
  std::string out, svg;
  unsigned threads = 0;
};

struct CompareOpts {
  std::string a, b, out;
};

struct McOpts {
  std::string kind;
  std::int64_t s = 1, n = 0, p = 0, l = 0;
  double C = 1.0;
  std::int64_t trials = 1000;
  std::int64_t samples = 10000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

struct FitOpts {
  std::string in;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("NSP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("NSP_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return 1;
}

int cmd_bound(const BoundOpts& o, std::ostream& out, std::ostream& err) {
  const auto params = bounds::Params::make(o.C, o.s, o.n, o.p);
  const auto report = bounds::pi_bound(params);
  const double raw = std::exp(report.log_pi);
  out << "s=" << params.s << " n=" << params.n << " p=" << params.p << " m=" << params.m()
      << " C=" << format_decimal(params.C) << '\n';
  out << "log_pi = " << format_decimal(report.log_pi) << '\n';
  out << "pi_raw = " << format_decimal(raw) << '\n';
  out << "pi_clamped = " << format_decimal(std::min(1.0, raw)) << '\n';
  out << "dominant_k = " << report.dominant_k << '\n';
  const auto& d = report.diagnostics;
  if (d.h_assumption_violations > 0) {
    err << "warning: H_k <= m-k+1 for " << d.h_assumption_violations << " value(s) of k (first k="
        << *d.first_h_violation << ")\n";
  }
  if (d.positive_log_q > 0) {
    err << "warning: log Q > 0 for " << d.positive_log_q << " value(s) of k\n";
  }
  if (o.terms) {
    for (const auto& t : report.terms) out << "term " << t.k << ' ' << format_decimal(t.log_term) << '\n';
  }
  return kOk;
}

std::string curve_label(const CurveOpts& o) {
  if (o.kind == "pi") return "pi n=" + std::to_string(o.n) + " C=" + format_decimal(o.C);
  if (o.kind == "borner") return "closed-form C=" + format_decimal(o.C);
  return "lambert A=" + format_decimal(*o.A) + " B=" + format_decimal(*o.B);
}

int cmd_curve(const CurveOpts& o, std::ostream& out, std::ostream& err) {
  if (o.points < 2) throw UsageError("curve: --points must be >= 2");
  if (!(o.delta_min > 0.0 && o.delta_max < 1.0 && o.delta_min < o.delta_max)) {
    throw UsageError("curve: require 0 < delta-min < delta-max < 1");
  }
  const auto grid = phase::uniform_grid(o.delta_min, o.delta_max, o.points);
  phase::PhaseCurve curve;
  if (o.kind == "pi") {
    if (o.n < 100) throw UsageError("curve pi: require -n >= 100");
    curve = phase::trace_pi(grid, o.C, o.n, o.log_threshold, o.threads);
  } else if (o.kind == "borner") {
    curve = phase::trace_borne_r(grid, o.C, o.threads);
  } else {
    if (!o.A || !o.B) throw UsageError("curve lambert: requires -A and -B");
    curve = phase::trace_lambert(grid, {*o.A, *o.B});
  }
  for (const auto& d : curve.diagnostics) {
    if (!d.solution.rho) {
      err << "note: delta=" << format_decimal(d.delta) << " has no point: " << d.solution.note << '\n';
    }
  }
  if (o.out.empty()) {
    io::write_curve_csv(out, curve.points);
  } else {
    io::write_curve_csv_file(o.out, curve.points);
  }
  if (!o.svg.empty()) {
    std::ofstream svg(o.svg, std::ios::binary);
    if (!svg) throw IoError("cannot open '" + o.svg + "' for writing");
    const io::SvgSeries series[] = {{curve_label(o), curve.points}};
    io::write_svg(svg, series);
    if (!svg) throw IoError("write failed for '" + o.svg + "'");
  }
  return kOk;
}

int cmd_compare(const CompareOpts& o, std::ostream& out) {
  phase::PhaseCurve a{io::read_curve_csv_file(o.a), phase::ExternalSource{o.a}, {}};
  phase::PhaseCurve b{io::read_curve_csv_file(o.b), phase::ExternalSource{o.b}, {}};
  const auto ratios = phase::compare_curves(a, b);
  if (o.out.empty()) {
    io::write_ratio_csv(out, ratios);
    return kOk;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw IoError("cannot open '" + o.out + "' for writing");
  io::write_ratio_csv(f, ratios);
  if (!f) throw IoError("write failed for '" + o.out + "'");
  double lo = ratios.front().ratio;
  double hi = lo;
  for (const auto& r : ratios) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  out << "points = " << ratios.size() << '\n';
  out << "min_ratio = " << format_decimal(lo) << '\n';
  out << "max_ratio = " << format_decimal(hi) << '\n';
  return kOk;
}

void print_report(const std::string& kind, const mc::McReport& r, std::uint64_t seed, std::ostream& out) {
  out << "kind = " << kind << '\n';
  out << "seed = " << seed << '\n';
  out << "trials = " << r.trials << '\n';
  out << "failures = " << r.failures << '\n';
  out << "discarded = " << r.discarded << '\n';
  out << "p_hat = " << format_decimal(r.p_hat) << '\n';
  out << "lower_conf_99 = " << format_decimal(r.lower_conf) << '\n';
  out << "upper_conf_99 = " << format_decimal(r.upper_conf) << '\n';
  out << "log_theory_bound = " << format_decimal(r.log_theory_bound) << '\n';
  out << "theory_bound = " << format_decimal(r.theory_bound) << " (clamped "
      << format_decimal(std::min(1.0, r.theory_bound)) << ")\n";
  out << "verdict = " << mc::to_string(r.verdict) << '\n';
  for (const auto& note : r.notes) out << "note: " << note << '\n';
  out << "kind=" << kind << " seed=" << seed << " trials=" << r.trials << " failures=" << r.failures
      << " discarded=" << r.discarded << " p_hat=" << format_decimal(r.p_hat)
      << " lower=" << format_decimal(r.lower_conf) << " upper=" << format_decimal(r.upper_conf)
      << " log_bound=" << format_decimal(r.log_theory_bound) << " verdict=" << mc::to_string(r.verdict)
      << '\n';
}

int cmd_mc(const McOpts& o, std::ostream& out) {
  if (o.trials < 1) throw UsageError("mc: --trials must be >= 1");
  const auto seed = resolve_seed(o.seed);
  mc::McReport report;
  if (o.kind == "psi") {
    if (o.l < 2) throw UsageError("mc psi: requires -l > s >= 1");
    report = mc::estimate_psi_failure(o.l, o.s, o.C, o.trials, seed, o.threads);
  } else {
    const auto params = bounds::Params::make(o.C, o.s, o.n, o.p);
    if (o.kind == "nsp") {
      if (params.p > mc::kMaxNspP || params.s > mc::kMaxNspS) {
        throw UsageError("mc nsp: budget exceeded; the exact checker enumerates all supports and "
                         "requires p <= 20 and s <= 4");
      }
      report = mc::estimate_nsp_failure(params, o.trials, seed, o.threads);
    } else {
      report = mc::estimate_supx_failure(params, o.trials, o.samples, seed, o.threads);
    }
  }
  print_report(o.kind, report, seed, out);
  return report.verdict == mc::Verdict::Violated ? kViolated : kOk;
}

int cmd_fit(const FitOpts& o, std::ostream& out) {
  const auto points = io::read_curve_csv_file(o.in);
  if (points.size() < 3) throw UsageError("fit: need at least 3 points, got " + std::to_string(points.size()));
  const auto fit = phase::fit_lambert(points);
  char buf[128];
  std::snprintf(buf, sizeof buf, "A = %.6f\nB = %.6f\n", fit.params.A, fit.params.B);
  out << buf;
  out << "rms_residual = " << format_decimal(fit.rms_residual) << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Null-space property failure bounds, phase curves and Monte Carlo checks", "nspbound"};
  app.require_subcommand(1);

  BoundOpts bo;
  auto* bound = app.add_subcommand("bound", "Evaluate the failure-probability bound Pi");
  bound->add_option("-s", bo.s, "sparsity")->required();
  bound->add_option("-n", bo.n, "rows")->required();
  bound->add_option("-p", bo.p, "columns")->required();
  bound->add_option("-C", bo.C, "dilatation (>= 1)")->capture_default_str();
  bound->add_flag("--terms", bo.terms, "print every per-k log term");

  CurveOpts co;
  auto* curve = app.add_subcommand("curve", "Trace a phase-transition curve");
  curve->add_option("kind", co.kind, "pi | borner | lambert")
      ->required()
      ->check(CLI::IsMember({"pi", "borner", "lambert"}));
  curve->add_option("-C", co.C, "dilatation (>= 1)")->capture_default_str();
  curve->add_option("-n", co.n, "rows for the pi curve")->capture_default_str();
  curve->add_option("-A", co.A, "Lambert scale A");
  curve->add_option("-B", co.B, "Lambert shape B");
  curve->add_option("--delta-min", co.delta_min)->capture_default_str();
  curve->add_option("--delta-max", co.delta_max)->capture_default_str();
  curve->add_option("--points", co.points)->capture_default_str();
  curve->add_option("--log-threshold", co.log_threshold, "pi curve: accept ln Pi <= threshold")
      ->capture_default_str();
  curve->add_option("--out", co.out, "CSV output (stdout if omitted)");
  curve->add_option("--svg", co.svg, "SVG output");
  curve->add_option("--threads", co.threads, "worker threads (0 = auto)")->capture_default_str();

  CompareOpts cmp;
  auto* compare = app.add_subcommand("compare", "Ratio b/a of two curves on a's delta grid");
  compare->add_option("--a", cmp.a)->required();
  compare->add_option("--b", cmp.b)->required();
  compare->add_option("--out", cmp.out, "ratio CSV (stdout if omitted)");

  McOpts mo;
  auto* mcc = app.add_subcommand("mc", "Monte Carlo verification");
  mcc->add_option("kind", mo.kind, "nsp | psi | supx")
      ->required()
      ->check(CLI::IsMember({"nsp", "psi", "supx"}));
  mcc->add_option("-s", mo.s)->capture_default_str();
  mcc->add_option("-n", mo.n);
  mcc->add_option("-p", mo.p);
  mcc->add_option("-l", mo.l, "vector length for psi");
  mcc->add_option("-C", mo.C)->capture_default_str();
  mcc->add_option("--trials", mo.trials)->capture_default_str();
  mcc->add_option("--samples", mo.samples, "sphere samples per kernel (supx)")->capture_default_str();
  mcc->add_option("--seed", mo.seed, "PRNG seed (default: $NSP_SEED, else 1)");
  mcc->add_option("--threads", mo.threads, "worker threads (0 = auto)")->capture_default_str();

  FitOpts fo;
  auto* fit = app.add_subcommand("fit", "Fit (A, B) of exp(W-1(-B delta))/(A delta) to a curve");
  fit->add_option("--in", fo.in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (bound->parsed()) return cmd_bound(bo, out, err);
    if (curve->parsed()) return cmd_curve(co, out, err);
    if (compare->parsed()) return cmd_compare(cmp, out);
    if (mcc->parsed()) return cmd_mc(mo, out);
    if (fit->parsed()) return cmd_fit(fo, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}

}  // namespace nspbound::cli
