#include "nlsdp/io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>

#include "nlsdp/errors.hpp"
#include "nlsdp/rng.hpp"

namespace nlsdp {

namespace {

using nlohmann::json;

const char* criterion_name(StopCriterion c) {
  switch (c) {
    case StopCriterion::a: return "a";
    case StopCriterion::b: return "b";
    case StopCriterion::c: return "c";
  }
  return "?";
}

StopCriterion criterion_from(const std::string& s) {
  if (s == "a") return StopCriterion::a;
  if (s == "b") return StopCriterion::b;
  if (s == "c") return StopCriterion::c;
  throw InvalidInput("unknown criterion '" + s + "' (expected a, b or c)");
}

const char* rho_update_name(RhoUpdate u) {
  return u == RhoUpdate::fixed ? "fixed" : "geometric";
}

RhoUpdate rho_update_from(const std::string& s) {
  if (s == "fixed") return RhoUpdate::fixed;
  if (s == "geometric") return RhoUpdate::geometric;
  throw InvalidInput("unknown rho_update '" + s + "' (expected fixed or geometric)");
}

const char* status_name(AlmStatus s) {
  switch (s) {
    case AlmStatus::converged: return "converged";
    case AlmStatus::max_outer: return "max_outer";
    case AlmStatus::line_search_failure: return "line_search_failure";
    case AlmStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InvalidInput("unknown key '" + key + "' in " + where + " config");
  }
}

int exit_code_for(AlmStatus s) {
  switch (s) {
    case AlmStatus::converged: return 0;
    case AlmStatus::max_outer: return 2;
    case AlmStatus::line_search_failure:
    case AlmStatus::numerical_failure: return 3;
  }
  return 3;
}

KktPoint point_from_json(const ProblemInstance& p, const json& j) {
  if (!j.contains("x") || !j.contains("Y")) throw InvalidInput("point file needs 'x' and 'Y'");
  const auto xv = j.at("x").get<std::vector<double>>();
  if (static_cast<int>(xv.size()) != p.dim_x)
    throw InvalidInput("point file: x has wrong length");
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xv.data(), xv.size());

  const auto rows = j.at("Y").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(rows.size()) != p.n_sdp) throw InvalidInput("point file: Y has wrong order");
  Eigen::MatrixXd y(p.n_sdp, p.n_sdp);
  for (int i = 0; i < p.n_sdp; ++i) {
    if (static_cast<int>(rows[i].size()) != p.n_sdp)
      throw InvalidInput("point file: Y has wrong order");
    for (int c = 0; c < p.n_sdp; ++c) y(i, c) = rows[i][c];
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(p.m_eq);
  if (p.m_eq > 0) {
    if (!j.contains("z")) throw InvalidInput("point file needs 'z' for this problem");
    const auto zv = j.at("z").get<std::vector<double>>();
    if (static_cast<int>(zv.size()) != p.m_eq) throw InvalidInput("point file: z has wrong length");
    z = Eigen::Map<const Eigen::VectorXd>(zv.data(), zv.size());
  }
  return {x, SymMatrix::from_matrix(y), z};
}

}  // namespace

ProblemInstance make_problem(const std::string& name, int n, double q) {
  if (name == "toy") return toy_problem();
  if (name == "toy_negated") return negated_toy_problem();
  if (name == "hadamard") return hadamard_problem(n, q);
  throw InvalidInput("unknown problem '" + name + "' (expected toy, toy_negated or hadamard)");
}

StartPoint make_start(const ProblemInstance& p, std::uint64_t seed, double eta) {
  Rng rng(seed);
  const KktPoint base = p.builtin_stationary ? p.builtin_stationary()
                                             : KktPoint{Eigen::VectorXd::Zero(p.dim_x),
                                                        SymMatrix(p.n_sdp),
                                                        Eigen::VectorXd::Zero(p.m_eq)};
  StartPoint s{base.x, base.Y, base.z};
  if (p.name == "hadamard") {
    s.x = SymMatrix::from_matrix(rng.symmetric_uniform(p.n_sdp, -1.0, 1.0)).packed();
  } else {
    s.x = Eigen::VectorXd::Constant(p.dim_x, 0.5);
  }
  if (eta != 0.0) {
    s.Y = s.Y + SymMatrix::from_matrix(eta * rng.symmetric_uniform(p.n_sdp, -1.0, 1.0));
    if (p.m_eq > 0) s.z += eta * rng.uniform_vector(p.m_eq, -1.0, 1.0);
  }
  return s;
}

RunConfig run_config_from_json(const json& j, RunConfig base) {
  RunConfig cfg = std::move(base);
  check_keys(j,
             {"problem", "n", "q", "seed", "start_eta", "trace_path", "summary_path", "zero_time",
              "alm", "newton"},
             "run");
  read_key(j, "problem", cfg.problem);
  read_key(j, "n", cfg.n);
  read_key(j, "q", cfg.q);
  read_key(j, "seed", cfg.seed);
  read_key(j, "start_eta", cfg.start_eta);
  read_key(j, "trace_path", cfg.trace_path);
  read_key(j, "summary_path", cfg.summary_path);
  read_key(j, "zero_time", cfg.zero_time);

  if (j.contains("alm")) {
    const json& a = j.at("alm");
    check_keys(a,
               {"rho0", "rho_bar", "rho_update", "rho_factor", "rho_max", "criterion",
                "eps_prime0", "eps_prime_decay", "kkt_tol", "max_outer", "supplement_c",
                "keep_infeasible_y0"},
               "alm");
    read_key(a, "rho0", cfg.alm.rho0);
    read_key(a, "rho_bar", cfg.alm.rho_bar);
    if (a.contains("rho_update")) cfg.alm.rho_update = rho_update_from(a.at("rho_update"));
    read_key(a, "rho_factor", cfg.alm.rho_factor);
    read_key(a, "rho_max", cfg.alm.rho_max);
    if (a.contains("criterion")) cfg.alm.criterion = criterion_from(a.at("criterion"));
    read_key(a, "eps_prime0", cfg.alm.eps_prime0);
    read_key(a, "eps_prime_decay", cfg.alm.eps_prime_decay);
    read_key(a, "kkt_tol", cfg.alm.kkt_tol);
    read_key(a, "max_outer", cfg.alm.max_outer);
    if (a.contains("supplement_c") && !a.at("supplement_c").is_null())
      cfg.alm.supplement_c = a.at("supplement_c").get<double>();
    read_key(a, "keep_infeasible_y0", cfg.alm.keep_infeasible_y0);
  }
  if (j.contains("newton")) {
    const json& nw = j.at("newton");
    check_keys(nw,
               {"mu", "tau", "tau1", "tau2", "nu_bar", "theta", "cg_max_iter", "max_newton_iters",
                "grad_tol", "max_backtracks"},
               "newton");
    read_key(nw, "mu", cfg.newton.mu);
    read_key(nw, "tau", cfg.newton.tau);
    read_key(nw, "tau1", cfg.newton.tau1);
    read_key(nw, "tau2", cfg.newton.tau2);
    read_key(nw, "nu_bar", cfg.newton.nu_bar);
    read_key(nw, "theta", cfg.newton.theta);
    read_key(nw, "cg_max_iter", cfg.newton.cg_max_iter);
    read_key(nw, "max_newton_iters", cfg.newton.max_newton_iters);
    read_key(nw, "grad_tol", cfg.newton.grad_tol);
    read_key(nw, "max_backtracks", cfg.newton.max_backtracks);
  }
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  json a;
  a["rho0"] = cfg.alm.rho0;
  a["rho_bar"] = cfg.alm.rho_bar;
  a["rho_update"] = rho_update_name(cfg.alm.rho_update);
  a["rho_factor"] = cfg.alm.rho_factor;
  a["rho_max"] = cfg.alm.rho_max;
  a["criterion"] = criterion_name(cfg.alm.criterion);
  a["eps_prime0"] = cfg.alm.eps_prime0;
  a["eps_prime_decay"] = cfg.alm.eps_prime_decay;
  a["kkt_tol"] = cfg.alm.kkt_tol;
  a["max_outer"] = cfg.alm.max_outer;
  a["supplement_c"] = cfg.alm.supplement_c ? json(*cfg.alm.supplement_c) : json(nullptr);
  a["keep_infeasible_y0"] = cfg.alm.keep_infeasible_y0;

  json nw;
  nw["mu"] = cfg.newton.mu;
  nw["tau"] = cfg.newton.tau;
  nw["tau1"] = cfg.newton.tau1;
  nw["tau2"] = cfg.newton.tau2;
  nw["nu_bar"] = cfg.newton.nu_bar;
  nw["theta"] = cfg.newton.theta;
  nw["cg_max_iter"] = cfg.newton.cg_max_iter;
  nw["max_newton_iters"] = cfg.newton.max_newton_iters;
  nw["grad_tol"] = cfg.newton.grad_tol;
  nw["max_backtracks"] = cfg.newton.max_backtracks;

  json j;
  j["problem"] = cfg.problem;
  j["n"] = cfg.n;
  j["q"] = cfg.q;
  j["seed"] = cfg.seed;
  j["start_eta"] = cfg.start_eta;
  j["trace_path"] = cfg.trace_path;
  j["summary_path"] = cfg.summary_path;
  j["zero_time"] = cfg.zero_time;
  j["alm"] = a;
  j["newton"] = nw;
  return j;
}

std::string normalize_run_config(const std::string& text) {
  return run_config_to_json(run_config_from_json(json::parse(text))).dump(2);
}

void apply_env_seed(RunConfig& cfg) {
  if (const char* env = std::getenv("NLSDP_ALM_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') cfg.seed = static_cast<std::uint64_t>(v);
  }
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char kTraceHeader[] =
    "k,rho,rho_tilde,inner_iters,cg_iters,alm_value,grad_norm,kkt_residual,dist_mult,dY_norm,"
    "time_s";

void write_trace_csv(const AlmTrace& trace, const std::string& path, bool zero_time) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open trace file '" + path + "' for writing");
  out << kTraceHeader << "\n";
  for (const TraceRow& r : trace.rows) {
    out << r.k << ',' << format_g17(r.rho) << ',' << format_g17(r.rho_tilde) << ','
        << r.inner_iters << ',' << r.cg_iters << ',' << format_g17(r.alm_value) << ','
        << format_g17(r.grad_norm) << ',' << format_g17(r.kkt_residual) << ','
        << (r.dist_mult ? format_g17(*r.dist_mult) : std::string()) << ','
        << format_g17(r.dY_norm) << ',' << format_g17(zero_time ? 0.0 : r.time_s) << "\n";
  }
}

json summary_to_json(const RunConfig& cfg, const ProblemInstance& p, const AlmResult& res) {
  json j;
  j["problem"] = cfg.problem;
  j["n"] = cfg.n;
  j["q"] = cfg.q;
  j["seed"] = cfg.seed;
  j["criterion"] = criterion_name(cfg.alm.criterion);
  j["iterations"] = res.outer_iterations;
  j["inner_newton_total"] = res.inner_newton_total;
  j["cg_total"] = res.cg_total;
  j["final_kkt_residual"] = res.final_kkt_residual;
  j["converged"] = res.converged();
  j["verdict"] = status_name(res.status);
  j["dist_mult_final"] =
      (!res.trace.rows.empty() && res.trace.rows.back().dist_mult)
          ? json(*res.trace.rows.back().dist_mult)
          : json(nullptr);
  j["dist_mult_is_surrogate"] = p.multiplier_distance_is_surrogate;
  j["y0_infeasible"] = res.trace.y0_infeasible;
  j["y0_projected"] = res.trace.y0_projected;
  return j;
}

json certificate_to_json(const CertificateReport& rep) {
  json grid = json::array();
  for (const auto& [rho, lmin] : rep.bundle_min_eigs)
    grid.push_back({{"rho", rho}, {"lambda_min", lmin}});
  json j;
  j["sosc_min_eig"] = number_or_null(rep.sosc_min_eig);
  j["sosc_holds"] = rep.sosc_holds;
  j["bundle_min_eigs"] = grid;
  j["eta_estimate"] = number_or_null(rep.eta_estimate);
  j["verdict"] = rep.verdict;
  j["kkt_residual"] = rep.kkt_residual;
  j["subspace_dim"] = rep.subspace_dim;
  j["kernel_dim"] = rep.kernel_dim;
  return j;
}

int cmd_solve(RunConfig cfg) {
  apply_env_seed(cfg);
  try {
    const ProblemInstance p = make_problem(cfg.problem, cfg.n, cfg.q);
    cfg.alm.seed = cfg.seed;
    const StartPoint start = make_start(p, cfg.seed, cfg.start_eta);
    const AlmResult res = run_alm(p, start.x, start.Y, start.z, cfg.alm, cfg.newton);

    write_trace_csv(res.trace, cfg.trace_path, cfg.zero_time);
    std::ofstream summary(cfg.summary_path);
    if (!summary) throw InvalidInput("cannot open summary file '" + cfg.summary_path + "'");
    summary << summary_to_json(cfg, p, res).dump(2) << "\n";

    std::cout << cfg.problem << ": " << status_name(res.status) << " after "
              << res.outer_iterations << " outer iterations, KKT residual "
              << format_g17(res.final_kkt_residual) << "\n";
    return exit_code_for(res.status);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}

int cmd_certify(const CertifyConfig& cfg) {
  try {
    const ProblemInstance p = make_problem(cfg.problem, cfg.n, cfg.q);
    KktPoint pt{Eigen::VectorXd::Zero(p.dim_x), SymMatrix(p.n_sdp),
                Eigen::VectorXd::Zero(p.m_eq)};
    if (cfg.builtin_stationary) {
      if (!p.builtin_stationary)
        throw InvalidInput("problem '" + cfg.problem + "' has no built-in stationary point");
      pt = p.builtin_stationary();
    } else {
      std::ifstream in(cfg.point_path);
      if (!in) throw InvalidInput("cannot open point file '" + cfg.point_path + "'");
      json j;
      try {
        in >> j;
        pt = point_from_json(p, j);
      } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed point file: ") + e.what());
      }
    }

    const double residual = kkt_residual(p, pt);
    if (residual > cfg.kkt_gate) {
      json j;
      j["kkt_residual"] = residual;
      j["kkt_gate"] = cfg.kkt_gate;
      j["verdict"] = "precondition_failed";
      std::ofstream out(cfg.report_path);
      if (out) out << j.dump(2) << "\n";
      std::cerr << "error: KKT residual " << format_g17(residual) << " exceeds gate "
                << format_g17(cfg.kkt_gate) << "\n";
      return 3;
    }

    const CertificateReport rep = hessian_bundle_check(p, pt, cfg.rho_grid, cfg.eta_tol);
    std::ofstream out(cfg.report_path);
    if (!out) throw InvalidInput("cannot open report file '" + cfg.report_path + "'");
    out << certificate_to_json(rep).dump(2) << "\n";
    std::cout << cfg.problem << ": strong SOSC "
              << (rep.sosc_holds ? "holds" : "fails") << " (min eig "
              << format_g17(rep.sosc_min_eig) << "), bundle verdict " << rep.verdict << "\n";
    return rep.sosc_holds ? 0 : 4;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}

int cmd_bench(const BenchConfig& cfg) {
  if (cfg.pairs.empty()) {
    std::cerr << "error: bench needs at least one n:q pair\n";
    return 1;
  }
  std::ofstream out(cfg.out_path);
  if (!out) {
    std::cerr << "error: cannot open output file '" << cfg.out_path << "'\n";
    return 1;
  }
  out << "n,q,iterations,kkt_residual,cpu_s\n" << std::flush;

  for (std::size_t i = 0; i < cfg.pairs.size(); ++i) {
    const auto [n, q] = cfg.pairs[i];
    try {
      const ProblemInstance p = hadamard_problem(n, q);
      AlmConfig alm = cfg.alm;
      alm.seed = cfg.seed + i;
      const StartPoint start = make_start(p, alm.seed, cfg.start_eta);
      const auto t0 = std::chrono::steady_clock::now();
      const AlmResult res = run_alm(p, start.x, start.Y, start.z, alm, cfg.newton);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count();
      out << n << ',' << format_g17(q) << ',' << res.outer_iterations << ','
          << format_g17(res.final_kkt_residual) << ','
          << format_g17(cfg.zero_time ? 0.0 : secs) << "\n"
          << std::flush;
      if (!res.converged()) {
        std::cerr << "error: pair " << n << ":" << q << " did not converge ("
                  << status_name(res.status) << ")\n";
        return exit_code_for(res.status);
      }
    } catch (const std::exception& e) {
      std::cerr << "error: pair " << n << ":" << q << " failed: " << e.what() << "\n";
      return 3;
    }
  }
  return 0;
}

}  // namespace nlsdp
