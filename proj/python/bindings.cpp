#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "nlsdp/alm.hpp"
#include "nlsdp/certifier.hpp"
#include "nlsdp/errors.hpp"
#include "nlsdp/io.hpp"

namespace py = pybind11;
using namespace nlsdp;

namespace {

SymMatrix to_sym(const Eigen::MatrixXd& a) { return SymMatrix::from_matrix(a); }

ConeSign sign_from(const std::string& s) {
  if (s == "plus") return ConeSign::plus;
  if (s == "minus") return ConeSign::minus;
  throw InvalidInput("sign must be 'plus' or 'minus'");
}

AlmConfig alm_config(const std::string& criterion, double rho0, double rho_bar,
                     const std::string& rho_update, double rho_factor, double rho_max,
                     double kkt_tol, int max_outer, double eps0, double eps_decay,
                     bool keep_infeasible_y0) {
  AlmConfig cfg;
  if (criterion == "a")
    cfg.criterion = StopCriterion::a;
  else if (criterion == "b")
    cfg.criterion = StopCriterion::b;
  else if (criterion == "c")
    cfg.criterion = StopCriterion::c;
  else
    throw InvalidInput("criterion must be 'a', 'b' or 'c'");
  if (rho_update == "fixed")
    cfg.rho_update = RhoUpdate::fixed;
  else if (rho_update == "geometric")
    cfg.rho_update = RhoUpdate::geometric;
  else
    throw InvalidInput("rho_update must be 'fixed' or 'geometric'");
  cfg.rho0 = rho0;
  cfg.rho_bar = rho_bar;
  cfg.rho_factor = rho_factor;
  cfg.rho_max = rho_max;
  cfg.kkt_tol = kkt_tol;
  cfg.max_outer = max_outer;
  cfg.eps_prime0 = eps0;
  cfg.eps_prime_decay = eps_decay;
  cfg.keep_infeasible_y0 = keep_infeasible_y0;
  return cfg;
}

const char* status_str(AlmStatus s) {
  switch (s) {
    case AlmStatus::converged: return "converged";
    case AlmStatus::max_outer: return "max_outer";
    case AlmStatus::line_search_failure: return "line_search_failure";
    case AlmStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

py::dict result_dict(const AlmResult& res) {
  py::dict trace;
  const std::size_t rows = res.trace.rows.size();
  Eigen::VectorXd rho(rows), resid(rows), dist(rows), dy(rows), gnorm(rows);
  std::vector<int> inner(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const TraceRow& r = res.trace.rows[i];
    rho[i] = r.rho;
    resid[i] = r.kkt_residual;
    dist[i] = r.dist_mult ? *r.dist_mult : std::nan("");
    dy[i] = r.dY_norm;
    gnorm[i] = r.grad_norm;
    inner[i] = r.inner_iters;
  }
  trace["rho"] = rho;
  trace["kkt_residual"] = resid;
  trace["dist_mult"] = dist;
  trace["dY_norm"] = dy;
  trace["grad_norm"] = gnorm;
  trace["inner_iters"] = inner;

  py::dict d;
  d["x"] = res.point.x;
  d["Y"] = res.point.Y.mat();
  d["z"] = res.point.z;
  d["status"] = status_str(res.status);
  d["converged"] = res.converged();
  d["iterations"] = res.outer_iterations;
  d["final_kkt_residual"] = res.final_kkt_residual;
  d["trace"] = trace;
  return d;
}

}  // namespace

PYBIND11_MODULE(_nlsdp, m) {
  m.doc() = "Augmented Lagrangian solver and second-order certifier for "
            "nonlinear semidefinite programs";

  py::class_<ProblemInstance>(m, "Problem")
      .def_readonly("dim_x", &ProblemInstance::dim_x)
      .def_readonly("n_sdp", &ProblemInstance::n_sdp)
      .def_readonly("m_eq", &ProblemInstance::m_eq)
      .def_readonly("name", &ProblemInstance::name)
      .def("f", [](const ProblemInstance& p, const Eigen::VectorXd& x) { return p.f(x); })
      .def("grad_f",
           [](const ProblemInstance& p, const Eigen::VectorXd& x) { return p.grad_f(x); })
      .def("G", [](const ProblemInstance& p, const Eigen::VectorXd& x) { return p.G(x).mat(); })
      .def("h", [](const ProblemInstance& p, const Eigen::VectorXd& x) { return p.h(x); })
      .def("kkt_residual",
           [](const ProblemInstance& p, const Eigen::VectorXd& x, const Eigen::MatrixXd& y,
              const Eigen::VectorXd& z) { return kkt_residual(p, {x, to_sym(y), z}); })
      .def("lagrangian_grad",
           [](const ProblemInstance& p, const Eigen::VectorXd& x, const Eigen::MatrixXd& y,
              const Eigen::VectorXd& z) { return lagrangian_grad(p, {x, to_sym(y), z}); })
      .def("builtin_stationary", [](const ProblemInstance& p) {
        if (!p.builtin_stationary) throw InvalidInput("no built-in stationary point");
        const KktPoint pt = p.builtin_stationary();
        return py::make_tuple(pt.x, pt.Y.mat(), pt.z);
      });

  m.def("toy_problem", &toy_problem);
  m.def("negated_toy_problem", &negated_toy_problem);
  m.def("hadamard_problem", &hadamard_problem, py::arg("n"), py::arg("q"));

  m.def(
      "eig_sym",
      [](const Eigen::MatrixXd& a, double zero_tol) {
        const EigenSystem es = zero_tol < 0.0 ? eig_sym(to_sym(a)) : eig_sym(to_sym(a), zero_tol);
        py::dict d;
        d["P"] = es.P;
        d["lambda"] = es.lambda;
        d["alpha"] = es.alpha;
        d["beta"] = es.beta;
        d["gamma"] = es.gamma;
        d["zero_tol"] = es.zero_tol;
        return d;
      },
      py::arg("a"), py::arg("zero_tol") = -1.0,
      "Ordered eigendecomposition with the sign partition; a negative "
      "zero_tol selects the scale-aware default.");

  m.def(
      "proj_cone",
      [](const Eigen::MatrixXd& a, const std::string& sign) {
        return proj_cone(to_sym(a), sign_from(sign)).mat();
      },
      py::arg("a"), py::arg("sign") = "plus");
  m.def(
      "dist_cone",
      [](const Eigen::MatrixXd& a, const std::string& sign) {
        return dist_cone(to_sym(a), sign_from(sign));
      },
      py::arg("a"), py::arg("sign") = "plus");
  m.def("pinv_sym", [](const Eigen::MatrixXd& a) { return pinv_sym(to_sym(a)).mat(); });

  m.def(
      "alm_value",
      [](const ProblemInstance& p, const Eigen::VectorXd& x, const Eigen::MatrixXd& y,
         const Eigen::VectorXd& z, double rho, double rho_bar) {
        return alm_value(p, x, to_sym(y), z, PenaltyParams{rho, rho_bar});
      },
      py::arg("problem"), py::arg("x"), py::arg("Y"), py::arg("z"), py::arg("rho"),
      py::arg("rho_bar") = 0.0);
  m.def(
      "alm_grad",
      [](const ProblemInstance& p, const Eigen::VectorXd& x, const Eigen::MatrixXd& y,
         const Eigen::VectorXd& z, double rho, double rho_bar) {
        return alm_grad(p, x, to_sym(y), z, PenaltyParams{rho, rho_bar});
      },
      py::arg("problem"), py::arg("x"), py::arg("Y"), py::arg("z"), py::arg("rho"),
      py::arg("rho_bar") = 0.0);

  m.def(
      "solve",
      [](const ProblemInstance& p, const Eigen::VectorXd& x0, const Eigen::MatrixXd& y0,
         const Eigen::VectorXd& z0, const std::string& criterion, double rho0, double rho_bar,
         const std::string& rho_update, double rho_factor, double rho_max, double kkt_tol,
         int max_outer, double eps0, double eps_decay, bool keep_infeasible_y0, double grad_tol) {
        AlmConfig cfg = alm_config(criterion, rho0, rho_bar, rho_update, rho_factor, rho_max,
                                   kkt_tol, max_outer, eps0, eps_decay, keep_infeasible_y0);
        NewtonConfig ncfg;
        ncfg.grad_tol = grad_tol;
        return result_dict(run_alm(p, x0, to_sym(y0), z0, cfg, ncfg));
      },
      py::arg("problem"), py::arg("x0"), py::arg("Y0"), py::arg("z0"),
      py::arg("criterion") = "b", py::arg("rho0") = 10.0, py::arg("rho_bar") = 0.0,
      py::arg("rho_update") = "geometric", py::arg("rho_factor") = 2.0,
      py::arg("rho_max") = 1e8, py::arg("kkt_tol") = 1e-5, py::arg("max_outer") = 50,
      py::arg("eps0") = 0.01, py::arg("eps_decay") = 1.0 / 1.05,
      py::arg("keep_infeasible_y0") = false, py::arg("grad_tol") = 1e-10);

  m.def(
      "default_start",
      [](const ProblemInstance& p, std::uint64_t seed, double eta) {
        const StartPoint s = make_start(p, seed, eta);
        return py::make_tuple(s.x, s.Y.mat(), s.z);
      },
      py::arg("problem"), py::arg("seed") = 0, py::arg("eta") = 0.1);

  m.def(
      "strong_sosc_check",
      [](const ProblemInstance& p, const Eigen::VectorXd& x, const Eigen::MatrixXd& y,
         const Eigen::VectorXd& z, double tol) {
        const SoscResult r = strong_sosc_check(p, {x, to_sym(y), z}, tol);
        return py::make_tuple(r.min_eig, r.holds);
      },
      py::arg("problem"), py::arg("x"), py::arg("Y"), py::arg("z"), py::arg("tol") = 1e-6);

  m.def(
      "hessian_bundle_check",
      [](const ProblemInstance& p, const Eigen::VectorXd& x, const Eigen::MatrixXd& y,
         const Eigen::VectorXd& z, const std::vector<double>& rho_grid, double eta_tol) {
        const CertificateReport rep = hessian_bundle_check(p, {x, to_sym(y), z}, rho_grid, eta_tol);
        py::dict d;
        d["sosc_min_eig"] = rep.sosc_min_eig;
        d["sosc_holds"] = rep.sosc_holds;
        d["bundle_min_eigs"] = rep.bundle_min_eigs;
        d["eta_estimate"] = rep.eta_estimate;
        d["verdict"] = rep.verdict;
        d["kkt_residual"] = rep.kkt_residual;
        return d;
      },
      py::arg("problem"), py::arg("x"), py::arg("Y"), py::arg("z"),
      py::arg("rho_grid") = std::vector<double>{1.0, 10.0, 100.0}, py::arg("eta_tol") = 1e-6);

  m.def(
      "sigma_term",
      [](const Eigen::MatrixXd& g, const Eigen::MatrixXd& y, const Eigen::MatrixXd& h) {
        return sigma_term(to_sym(g), to_sym(y), to_sym(h));
      },
      py::arg("Gbar"), py::arg("Ybar"), py::arg("H"));

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<StalePoint>(m, "StalePointError", PyExc_RuntimeError);
  py::register_exception<NumericalFailure>(m, "NumericalFailureError", PyExc_ArithmeticError);
}
