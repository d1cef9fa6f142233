#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlsdp/alm.hpp"
#include "nlsdp/certifier.hpp"
#include "nlsdp/problem.hpp"

namespace nlsdp {

/// Full description of one solve run: problem selection, solver settings,
/// seeding and output paths. JSON-serializable with a canonical form.
struct RunConfig {
  std::string problem = "toy";  // toy | toy_negated | hadamard
  int n = 3;
  double q = 2.0;
  AlmConfig alm;
  NewtonConfig newton;
  std::uint64_t seed = 0;
  double start_eta = 0.1;  // multiplier start perturbation scale
  std::string trace_path = "trace.csv";
  std::string summary_path = "summary.json";
  bool zero_time = false;  // write 0 for time fields (deterministic output)
};

ProblemInstance make_problem(const std::string& name, int n, double q);

struct StartPoint {
  Eigen::VectorXd x;
  SymMatrix Y;
  Eigen::VectorXd z;
};

/// Seeded start: random primal point and the built-in multipliers perturbed
/// by eta times a random symmetric direction.
StartPoint make_start(const ProblemInstance& p, std::uint64_t seed, double eta);

/// Keys present in j override the corresponding fields of base; unknown keys
/// are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = RunConfig{});
nlohmann::json run_config_to_json(const RunConfig& cfg);
/// Canonical text form: parse then re-serialize.
std::string normalize_run_config(const std::string& text);

/// NLSDP_ALM_SEED environment override, when set and parseable.
void apply_env_seed(RunConfig& cfg);

/// Shortest representation that round-trips a double (17 significant digits).
std::string format_g17(double v);

extern const char kTraceHeader[];
void write_trace_csv(const AlmTrace& trace, const std::string& path, bool zero_time);

nlohmann::json summary_to_json(const RunConfig& cfg, const ProblemInstance& p,
                               const AlmResult& res);
nlohmann::json certificate_to_json(const CertificateReport& rep);

struct CertifyConfig {
  std::string problem = "toy";
  int n = 3;
  double q = 2.0;
  bool builtin_stationary = false;
  std::string point_path;
  std::vector<double> rho_grid = {1.0, 10.0, 100.0};
  double eta_tol = 1e-6;
  double kkt_gate = 1e-8;
  std::string report_path = "certificate.json";
};

struct BenchConfig {
  std::vector<std::pair<int, double>> pairs;
  std::string out_path = "bench.csv";
  std::uint64_t seed = 0;
  AlmConfig alm;
  NewtonConfig newton;
  double start_eta = 0.1;
  bool zero_time = false;
};

/// Exit codes: 0 converged / certificate positive, 1 usage or malformed
/// input, 2 iteration limit, 3 numerical or precondition failure,
/// 4 certificate negative.
int cmd_solve(RunConfig cfg);
int cmd_certify(const CertifyConfig& cfg);
int cmd_bench(const BenchConfig& cfg);

}  // namespace nlsdp
