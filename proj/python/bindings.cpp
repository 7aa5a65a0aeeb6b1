#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nspbound/bounds.hpp"
#include "nspbound/cli.hpp"
#include "nspbound/errors.hpp"
#include "nspbound/montecarlo.hpp"
#include "nspbound/phase.hpp"
#include "nspbound/specfun.hpp"

namespace py = pybind11;
using namespace nspbound;

namespace {

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"nspbound"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_nspbound, m) {
  m.doc() = "Null-space property failure bounds, phase curves and Monte Carlo checks";
  m.attr("__version__") = "0.1.0";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  // special functions
  m.def("log_gamma", &specfun::log_gamma, py::arg("z"));
  m.def("log_factorial", &specfun::log_factorial, py::arg("k"));
  m.def("log_binomial", &specfun::log_binomial, py::arg("a"), py::arg("b"));
  m.def("lambert_w0", &specfun::lambert_w0, py::arg("x"));
  m.def("lambert_wm1", &specfun::lambert_wm1, py::arg("x"));
  m.def("log_sum_exp", [](const std::vector<double>& t) { return specfun::log_sum_exp(t); },
        py::arg("terms"));

  // bounds
  py::class_<bounds::Params>(m, "Params")
      .def(py::init(&bounds::Params::make), py::arg("C"), py::arg("s"), py::arg("n"), py::arg("p"))
      .def_readonly("C", &bounds::Params::C)
      .def_readonly("s", &bounds::Params::s)
      .def_readonly("n", &bounds::Params::n)
      .def_readonly("p", &bounds::Params::p)
      .def_property_readonly("m", &bounds::Params::m)
      .def("__repr__", [](const bounds::Params& p) {
        std::ostringstream os;
        os << "Params(C=" << p.C << ", s=" << p.s << ", n=" << p.n << ", p=" << p.p << ")";
        return os.str();
      });

  py::class_<bounds::PhaseParams>(m, "PhaseParams")
      .def(py::init(&bounds::PhaseParams::make), py::arg("rho"), py::arg("delta"), py::arg("C") = 1.0)
      .def_readonly("rho", &bounds::PhaseParams::rho)
      .def_readonly("delta", &bounds::PhaseParams::delta)
      .def_readonly("C", &bounds::PhaseParams::C)
      .def("discretize", &bounds::PhaseParams::discretize, py::arg("n"));

  py::class_<bounds::BoundReport>(m, "BoundReport")
      .def_readonly("log_pi", &bounds::BoundReport::log_pi)
      .def_readonly("dominant_k", &bounds::BoundReport::dominant_k)
      .def_readonly("params", &bounds::BoundReport::params)
      .def_property_readonly("terms", [](const bounds::BoundReport& r) {
        std::vector<std::pair<std::int64_t, double>> out;
        out.reserve(r.terms.size());
        for (const auto& t : r.terms) out.emplace_back(t.k, t.log_term);
        return out;
      });

  m.def("p_tilde", &bounds::p_tilde, py::arg("params"), py::arg("k"));
  m.def("h_cap", &bounds::h_cap, py::arg("params"), py::arg("k"));
  m.def("log_psi", &bounds::log_psi, py::arg("l"), py::arg("s"), py::arg("C"));
  m.def("log_q", &bounds::log_q, py::arg("params"), py::arg("k"));
  m.def("log_term", &bounds::log_term, py::arg("params"), py::arg("k"));
  m.def("log_h", &bounds::log_h, py::arg("params"));
  m.def("log_b_term", &bounds::log_b_term, py::arg("params"), py::arg("k"));
  m.def("pi_bound", py::overload_cast<const bounds::Params&>(&bounds::pi_bound), py::arg("params"),
        py::call_guard<py::gil_scoped_release>());
  m.def("borne_r_lhs", &bounds::borne_r_lhs, py::arg("phase"));
  m.def("borne_r_region", &bounds::borne_r_region, py::arg("phase"));
  m.attr("MIN_DELTA") = bounds::kMinDelta;

  // phase
  m.def("solve_rho_borne_r",
        [](double delta, double C, double tol) { return phase::solve_rho_borne_r(delta, C, tol).rho; },
        py::arg("delta"), py::arg("C") = 1.0, py::arg("tol") = 1e-12);
  m.def("solve_rho_pi",
        [](double delta, double C, std::int64_t n, double log_threshold) {
          return phase::solve_rho_pi(delta, C, n, log_threshold).rho;
        },
        py::arg("delta"), py::arg("C"), py::arg("n"), py::arg("log_threshold") = 0.0,
        py::call_guard<py::gil_scoped_release>());
  m.def("lambert_rho",
        [](double delta, double A, double B) { return phase::lambert_rho(delta, {A, B}); },
        py::arg("delta"), py::arg("A"), py::arg("B"));
  m.def("fit_lambert",
        [](const std::vector<std::pair<double, double>>& pts) {
          std::vector<phase::PhasePoint> points;
          for (const auto& [d, r] : pts) points.push_back({d, r});
          const auto fit = phase::fit_lambert(points);
          return py::make_tuple(fit.params.A, fit.params.B, fit.rms_residual);
        },
        py::arg("points"));
  m.def("default_delta_grid", &phase::default_delta_grid);

  // Monte Carlo
  py::enum_<mc::Verdict>(m, "Verdict")
      .value("Consistent", mc::Verdict::Consistent)
      .value("Violated", mc::Verdict::Violated)
      .value("BoundVacuous", mc::Verdict::BoundVacuous);

  py::class_<mc::McReport>(m, "McReport")
      .def_readonly("trials", &mc::McReport::trials)
      .def_readonly("failures", &mc::McReport::failures)
      .def_readonly("discarded", &mc::McReport::discarded)
      .def_readonly("p_hat", &mc::McReport::p_hat)
      .def_readonly("lower_conf", &mc::McReport::lower_conf)
      .def_readonly("upper_conf", &mc::McReport::upper_conf)
      .def_readonly("theory_bound", &mc::McReport::theory_bound)
      .def_readonly("log_theory_bound", &mc::McReport::log_theory_bound)
      .def_readonly("verdict", &mc::McReport::verdict);

  m.def("sample_kernel",
        [](std::int64_t p, std::int64_t mdim, std::uint64_t seed, std::uint64_t stream) {
          return mc::sample_kernel(p, mdim, seed, stream).generators;
        },
        py::arg("p"), py::arg("m"), py::arg("seed"), py::arg("stream") = 0);
  m.def("eval_x",
        [](const Eigen::MatrixXd& g, const Eigen::VectorXd& t, std::int64_t s, double C) {
          mc::KernelSample k;
          k.generators = g;
          return mc::eval_x(k, t, s, C);
        },
        py::arg("generators"), py::arg("t"), py::arg("s"), py::arg("C"));
  m.def("check_nsp",
        [](const Eigen::MatrixXd& g, std::int64_t s, double C) {
          mc::KernelSample k;
          k.generators = g;
          return mc::check_nsp(k, s, C).holds;
        },
        py::arg("generators"), py::arg("s"), py::arg("C"));
  m.def("estimate_psi_failure", &mc::estimate_psi_failure, py::arg("l"), py::arg("s"), py::arg("C"),
        py::arg("trials"), py::arg("seed"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("estimate_nsp_failure", &mc::estimate_nsp_failure, py::arg("params"), py::arg("trials"),
        py::arg("seed"), py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());

  m.def("run_cli", &run_cli, py::arg("args"),
        "Run a CLI command in-process; returns (exit_code, stdout, stderr).");
}
