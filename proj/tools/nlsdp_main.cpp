#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlsdp/errors.hpp"
#include "nlsdp/io.hpp"

namespace {

std::vector<std::pair<int, double>> parse_pairs(const std::string& text) {
  std::vector<std::pair<int, double>> pairs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto pos = item.find(':');
    if (pos == std::string::npos) throw nlsdp::InvalidInput("pair '" + item + "' is not n:q");
    try {
      pairs.emplace_back(std::stoi(item.substr(0, pos)), std::stod(item.substr(pos + 1)));
    } catch (const std::exception&) {
      throw nlsdp::InvalidInput("pair '" + item + "' is not n:q");
    }
  }
  return pairs;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw nlsdp::InvalidInput("grid entry '" + item + "' is not a number");
    }
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented Lagrangian solver and second-order certifier for "
               "nonlinear semidefinite programs"};
  app.require_subcommand(1);

  nlsdp::RunConfig run;
  std::string config_path;
  std::string criterion = "b";
  std::string rho_update = "geometric";
  double supplement_c = 0.0;

  CLI::App* solve = app.add_subcommand("solve", "Run the ALM on a built-in problem");
  solve->add_option("--problem", run.problem, "toy | toy_negated | hadamard");
  solve->add_option("--n", run.n, "Hadamard problem order");
  solve->add_option("--q", run.q, "Hadamard diagonal weight (q >= n-1)");
  solve->add_option("--criterion", criterion, "inner stopping criterion: a | b | c");
  solve->add_option("--tol", run.alm.kkt_tol, "KKT residual tolerance");
  solve->add_option("--rho0", run.alm.rho0, "initial penalty");
  solve->add_option("--rho-bar", run.alm.rho_bar, "penalty offset (dual step = rho - rho_bar)");
  solve->add_option("--rho-update", rho_update, "fixed | geometric");
  solve->add_option("--rho-factor", run.alm.rho_factor, "geometric growth factor");
  solve->add_option("--rho-max", run.alm.rho_max, "penalty cap");
  solve->add_option("--max-outer", run.alm.max_outer, "outer iteration cap");
  solve->add_option("--eps0", run.alm.eps_prime0, "inner exactness eps'_0");
  solve->add_option("--eps-decay", run.alm.eps_prime_decay, "inner exactness decay per iteration");
  solve->add_option("--supplement-c", supplement_c,
                    "criterion (c) supplement constant (0 disables)");
  solve->add_flag("--keep-infeasible-y0", run.alm.keep_infeasible_y0,
                  "do not project Y0 onto the NSD cone");
  solve->add_option("--seed", run.seed, "start-point seed");
  solve->add_option("--eta", run.start_eta, "multiplier start perturbation scale");
  solve->add_option("--grad-tol", run.newton.grad_tol, "inner gradient tolerance");
  solve->add_option("--max-newton", run.newton.max_newton_iters, "inner iteration cap");
  solve->add_option("--cg-max", run.newton.cg_max_iter, "CG iteration cap (0 = min(100, dim))");
  solve->add_option("--mu", run.newton.mu, "Armijo slope");
  solve->add_option("--tau", run.newton.tau, "superlinearity exponent");
  solve->add_option("--tau1", run.newton.tau1, "regularization scale");
  solve->add_option("--tau2", run.newton.tau2, "regularization cap");
  solve->add_option("--nu-bar", run.newton.nu_bar, "forcing-term cap");
  solve->add_option("--theta", run.newton.theta, "backtracking ratio");
  solve->add_option("--trace", run.trace_path, "trace CSV path");
  solve->add_option("--summary", run.summary_path, "summary JSON path");
  solve->add_flag("--zero-time", run.zero_time, "write 0 for time fields");
  solve->add_option("--config", config_path, "JSON config file (overrides flags)");

  nlsdp::CertifyConfig certify;
  std::string grid_text = "1,10,100";
  CLI::App* cert = app.add_subcommand("certify", "Second-order certificates at a KKT point");
  cert->add_option("--problem", certify.problem, "toy | toy_negated | hadamard");
  cert->add_option("--n", certify.n, "Hadamard problem order");
  cert->add_option("--q", certify.q, "Hadamard diagonal weight");
  cert->add_flag("--builtin-stationary", certify.builtin_stationary,
                 "use the problem's known stationary point");
  cert->add_option("--point", certify.point_path, "JSON file with x, Y and (if needed) z");
  cert->add_option("--rho-grid", grid_text, "comma-separated increasing penalties");
  cert->add_option("--eta-tol", certify.eta_tol, "positivity threshold");
  cert->add_option("--kkt-gate", certify.kkt_gate, "largest admissible KKT residual");
  cert->add_option("--report", certify.report_path, "certificate JSON path");

  nlsdp::BenchConfig bench;
  std::string pairs_text;
  CLI::App* bn = app.add_subcommand("bench", "Solve a list of Hadamard instances");
  bn->add_option("--pairs", pairs_text, "comma-separated n:q pairs, e.g. 3:2,100:200");
  bn->add_option("--out", bench.out_path, "output CSV path");
  bn->add_option("--seed", bench.seed, "base seed");
  bn->add_option("--tol", bench.alm.kkt_tol, "KKT residual tolerance");
  bn->add_option("--max-outer", bench.alm.max_outer, "outer iteration cap");
  bn->add_option("--eta", bench.start_eta, "multiplier start perturbation scale");
  bn->add_flag("--zero-time", bench.zero_time, "write 0 for time fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help() << "\n";
    return 1;
  }

  try {
    if (solve->parsed()) {
      run.alm.criterion = criterion == "a"   ? nlsdp::StopCriterion::a
                          : criterion == "c" ? nlsdp::StopCriterion::c
                                             : nlsdp::StopCriterion::b;
      if (criterion != "a" && criterion != "b" && criterion != "c")
        throw nlsdp::InvalidInput("unknown criterion '" + criterion + "'");
      run.alm.rho_update = rho_update == "fixed" ? nlsdp::RhoUpdate::fixed
                                                 : nlsdp::RhoUpdate::geometric;
      if (rho_update != "fixed" && rho_update != "geometric")
        throw nlsdp::InvalidInput("unknown rho update '" + rho_update + "'");
      if (supplement_c > 0.0) run.alm.supplement_c = supplement_c;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw nlsdp::InvalidInput("cannot open config file '" + config_path + "'");
        nlohmann::json j;
        in >> j;
        run = nlsdp::run_config_from_json(j, run);
      }
      return nlsdp::cmd_solve(run);
    }
    if (cert->parsed()) {
      certify.rho_grid = parse_grid(grid_text);
      if (!certify.builtin_stationary && certify.point_path.empty())
        throw nlsdp::InvalidInput("certify needs --builtin-stationary or --point FILE");
      return nlsdp::cmd_certify(certify);
    }
    bench.pairs = parse_pairs(pairs_text);
    return nlsdp::cmd_bench(bench);
  } catch (const nlsdp::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}
