#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsdp/errors.hpp"
#include "nlsdp/io.hpp"

using namespace nlsdp;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "nlsdp_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NLSDP_CLI_BIN) + " " + args + " >" + path_of("out.txt") +
                          " 2>" + path_of("err.txt");
  const int raw = std::system(cmd.c_str());
  return WEXITSTATUS(raw);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("solve on hadamard matches the tabulated behavior") {
  const int code = run_cli("solve --problem hadamard --n 3 --q 2 --criterion b --tol 1e-5 "
                           "--trace " + path_of("t.csv") + " --summary " + path_of("s.json"));
  CHECK(code == 0);
  const json s = load_json(path_of("s.json"));
  CHECK(s.at("converged").get<bool>());
  CHECK(s.at("final_kkt_residual").get<double>() <= 1e-5);
  CHECK(s.at("iterations").get<int>() >= 2);
  CHECK(s.at("iterations").get<int>() <= 20);
}

TEST_CASE("summary JSON keys are pinned") {
  run_cli("solve --problem toy --max-outer 5 --trace " + path_of("t.csv") + " --summary " +
          path_of("s.json"));
  const json s = load_json(path_of("s.json"));
  const std::vector<std::string> expected = {
      "cg_total",       "converged",        "criterion",
      "dist_mult_final", "dist_mult_is_surrogate", "final_kkt_residual",
      "inner_newton_total", "iterations",   "n",
      "problem",        "q",                "seed",
      "verdict",        "y0_infeasible",    "y0_projected"};
  std::vector<std::string> keys;
  for (const auto& [k, v] : s.items()) keys.push_back(k);
  CHECK(keys == expected);
}

TEST_CASE("trace header is pinned and rows parse") {
  const int code = run_cli("solve --problem toy --rho-update fixed --rho0 10 --max-outer 50 "
                           "--trace " + path_of("toy.csv") + " --summary " + path_of("s.json"));
  CHECK(code == 0);
  std::ifstream in(path_of("toy.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header == std::string(kTraceHeader));

  // dist_mult column is non-increasing along the tail of a fixed-rho run
  std::vector<double> dist;
  for (std::string line; std::getline(in, line);) {
    std::stringstream ss(line);
    std::string field;
    for (int c = 0; c <= 8; ++c) std::getline(ss, field, ',');
    dist.push_back(std::stod(field));
  }
  REQUIRE(!dist.empty());
  for (std::size_t k = 1; k < dist.size(); ++k) CHECK(dist[k] <= dist[k - 1] + 1e-12);
}

TEST_CASE("fixed-rho toy run with the offset shows a strictly decreasing dual distance") {
  const int code = run_cli(
      "solve --problem toy --rho-update fixed --rho0 10 --rho-bar 0.5 --keep-infeasible-y0 "
      "--criterion a --eps0 1e-9 --grad-tol 1e-12 --tol 0 --max-outer 10 --seed 7 --trace " +
      path_of("fig.csv") + " --summary " + path_of("s.json"));
  CHECK(code == 2);  // max-outer by construction (tol 0)
  std::ifstream in(path_of("fig.csv"));
  std::string line;
  std::getline(in, line);
  std::vector<double> dist;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    for (int c = 0; c <= 8; ++c) std::getline(ss, field, ',');
    dist.push_back(std::stod(field));
  }
  REQUIRE(dist.size() == 10);
  for (std::size_t k = 1; k < dist.size(); ++k) {
    if (dist[k - 1] > 1e-12) CHECK(dist[k] < dist[k - 1]);
  }
}

TEST_CASE("invalid problem parameters exit with code 1") {
  CHECK(run_cli("solve --problem hadamard --n 3 --q 1") == 1);
  CHECK(run_cli("solve --problem unknown") == 1);
  CHECK(run_cli("solve --bogus-flag 3") == 1);
  CHECK(slurp(path_of("err.txt")).find("error") != std::string::npos);
}

TEST_CASE("certify built-in points") {
  const int toy = run_cli("certify --problem toy --builtin-stationary --report " +
                          path_of("c1.json"));
  CHECK(toy == 0);
  const json c1 = load_json(path_of("c1.json"));
  CHECK(c1.at("sosc_min_eig").get<double>() == doctest::Approx(4.0));
  CHECK(c1.at("verdict").get<std::string>() == "positive");

  CHECK(run_cli("certify --problem hadamard --n 3 --q 2 --builtin-stationary --report " +
                path_of("c2.json")) == 0);

  CHECK(run_cli("certify --problem toy_negated --builtin-stationary --report " +
                path_of("c3.json")) == 4);
  const json c3 = load_json(path_of("c3.json"));
  CHECK(c3.at("sosc_min_eig").get<double>() == doctest::Approx(-4.0));
}

TEST_CASE("certificate JSON keys are pinned") {
  run_cli("certify --problem toy --builtin-stationary --report " + path_of("c.json"));
  const json c = load_json(path_of("c.json"));
  const std::vector<std::string> expected = {"bundle_min_eigs", "eta_estimate", "kernel_dim",
                                             "kkt_residual",    "sosc_holds",   "sosc_min_eig",
                                             "subspace_dim",    "verdict"};
  std::vector<std::string> keys;
  for (const auto& [k, v] : c.items()) keys.push_back(k);
  CHECK(keys == expected);
}

TEST_CASE("certify gates on the KKT residual and rejects malformed files") {
  {
    std::ofstream f(path_of("bad_point.json"));
    f << R"({"x": [1.0], "Y": [[0,0,0],[0,0,0],[0,0,0]]})";
  }
  CHECK(run_cli("certify --problem toy --point " + path_of("bad_point.json") + " --report " +
                path_of("gate.json")) == 3);
  const json gate = load_json(path_of("gate.json"));
  CHECK(gate.at("verdict").get<std::string>() == "precondition_failed");

  {
    std::ofstream f(path_of("broken.json"));
    f << "{ not json";
  }
  CHECK(run_cli("certify --problem toy --point " + path_of("broken.json")) == 1);
  CHECK(run_cli("certify --problem toy --point " + path_of("missing.json")) == 1);
  CHECK(run_cli("certify --problem toy") == 1);  // neither --builtin-stationary nor --point
}

TEST_CASE("bench writes the table and is deterministic") {
  const std::string out1 = path_of("b1.csv"), out2 = path_of("b2.csv");
  CHECK(run_cli("bench --pairs 3:2,4:3 --seed 5 --zero-time --out " + out1) == 0);
  CHECK(run_cli("bench --pairs 3:2,4:3 --seed 5 --zero-time --out " + out2) == 0);
  const std::string t1 = slurp(out1);
  CHECK(t1 == slurp(out2));  // byte-identical on reruns

  std::stringstream ss(t1);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "n,q,iterations,kkt_residual,cpu_s");
  int rows = 0;
  for (std::string line; std::getline(ss, line);) {
    std::stringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    std::getline(ls, field, ',');
    std::getline(ls, field, ',');
    std::getline(ls, field, ',');
    CHECK(std::stod(field) <= 1e-5);
    ++rows;
  }
  CHECK(rows == 2);

  // time column is the only difference without --zero-time
  const std::string out3 = path_of("b3.csv");
  CHECK(run_cli("bench --pairs 3:2 --seed 5 --out " + out3) == 0);
  std::stringstream with_time(slurp(out3));
  std::getline(with_time, header);
  std::string row;
  std::getline(with_time, row);
  CHECK(row.substr(0, row.rfind(',')) ==
        t1.substr(t1.find('\n') + 1, t1.find('\n', t1.find('\n') + 1) - t1.find('\n') - 1)
            .substr(0, row.rfind(',')));
}

TEST_CASE("bench rejects an empty pair list and flushes partial tables") {
  CHECK(run_cli("bench --pairs \"\"") == 1);
  CHECK(run_cli("bench") == 1);
  CHECK(run_cli("bench --pairs 3:x") == 1);

  // q < n-1 fails on the second pair; the first row must still be present
  CHECK(run_cli("bench --pairs 3:2,5:1 --zero-time --out " + path_of("partial.csv")) != 0);
  const std::string partial = slurp(path_of("partial.csv"));
  CHECK(partial.find("\n3,2,") != std::string::npos);
}

TEST_CASE("environment seed override") {
  const std::string args = "solve --problem hadamard --n 3 --q 2 --zero-time --summary " +
                           path_of("s_env.json") + " --trace ";
  run_cli("solve --problem hadamard --n 3 --q 2 --zero-time --seed 123 --summary " +
          path_of("s_seed.json") + " --trace " + path_of("t_seed.csv"));
  {
    const std::string cmd = std::string("NLSDP_ALM_SEED=123 ") + NLSDP_CLI_BIN + " " + args +
                            path_of("t_env.csv") + " >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  }
  CHECK(slurp(path_of("t_env.csv")) == slurp(path_of("t_seed.csv")));
}

TEST_CASE("solve traces are byte-identical across reruns with zero-time") {
  const std::string a = path_of("d1.csv"), b = path_of("d2.csv");
  run_cli("solve --problem hadamard --n 3 --q 2 --seed 9 --zero-time --trace " + a +
          " --summary " + path_of("sa.json"));
  run_cli("solve --problem hadamard --n 3 --q 2 --seed 9 --zero-time --trace " + b +
          " --summary " + path_of("sb.json"));
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(path_of("sa.json")) == slurp(path_of("sb.json")));
}

TEST_CASE("config file overrides flags and round-trips canonically") {
  {
    std::ofstream f(path_of("cfg.json"));
    f << R"({"problem": "toy", "seed": 3, "alm": {"rho0": 5.0, "criterion": "a"}})";
  }
  const int code = run_cli("solve --problem hadamard --config " + path_of("cfg.json") +
                           " --trace " + path_of("cfg_t.csv") + " --summary " +
                           path_of("cfg_s.json"));
  CHECK(code == 0);
  const json s = load_json(path_of("cfg_s.json"));
  CHECK(s.at("problem").get<std::string>() == "toy");  // file wins over the flag
  CHECK(s.at("seed").get<std::uint64_t>() == 3);
  CHECK(s.at("criterion").get<std::string>() == "a");

  const std::string text = R"({"n": 4, "q": 7.5, "alm": {"rho_update": "fixed"}})";
  const std::string norm1 = normalize_run_config(text);
  CHECK(normalize_run_config(norm1) == norm1);  // idempotent canonical form

  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"bogus": 1})")), InvalidInput);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"alm": {"bogus": 1}})")), InvalidInput);
}

TEST_CASE("trace CSV formatting round-trips doubles") {
  AlmTrace trace;
  TraceRow row;
  row.k = 0;
  row.rho = 10.0;
  row.rho_tilde = 9.5;
  row.alm_value = -1.0 / 3.0;
  row.grad_norm = 1.2345678901234567e-9;
  row.kkt_residual = 0.1;
  row.dY_norm = 2.0 / 7.0;
  row.time_s = 0.25;
  trace.rows.push_back(row);
  const std::string path = path_of("fmt.csv");
  write_trace_csv(trace, path, false);

  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  std::stringstream ss(line);
  std::vector<std::string> fields;
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  REQUIRE(fields.size() == 11);
  CHECK(std::stod(fields[5]) == row.alm_value);  // 17 significant digits round-trip
  CHECK(std::stod(fields[6]) == row.grad_norm);
  CHECK(std::stod(fields[9]) == row.dY_norm);
  CHECK(fields[8].empty());  // no oracle, blank dist_mult
}
