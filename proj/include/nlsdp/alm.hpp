#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "nlsdp/newton_cg.hpp"
#include "nlsdp/problem.hpp"

namespace nlsdp {

enum class StopCriterion { a, b, c };
enum class RhoUpdate { fixed, geometric };

struct AlmConfig {
  double rho0 = 10.0;
  double rho_bar = 0.0;  // 0 gives the traditional multiplier step
  RhoUpdate rho_update = RhoUpdate::geometric;
  double rho_factor = 2.0;
  double rho_max = 1e4;  // caps the Hessian condition number, which grows with rho
  StopCriterion criterion = StopCriterion::b;
  // Inner exactness schedule eps'_k = eps_prime0 * eps_prime_decay^k; the
  // geometric decay keeps the sequence summable, which the dual convergence
  // rate needs.
  double eps_prime0 = 0.01;
  double eps_prime_decay = 1.0 / 1.05;
  double kkt_tol = 1e-5;
  int max_outer = 50;
  std::optional<double> supplement_c;  // extra gradient bound for criterion (c)
  bool keep_infeasible_y0 = false;     // skip the NSD projection of Y0
  std::uint64_t seed = 0;

  double eps_prime(int k) const;
  void validate() const;
};

struct TraceRow {
  int k = 0;
  double rho = 0.0;
  double rho_tilde = 0.0;
  int inner_iters = 0;
  long cg_iters = 0;
  double alm_value = 0.0;
  double grad_norm = 0.0;
  double kkt_residual = 0.0;
  std::optional<double> dist_mult;  // empty when the problem has no oracle
  double dY_norm = 0.0;
  double time_s = 0.0;
};

struct AlmTrace {
  std::vector<TraceRow> rows;
  bool y0_infeasible = false;  // Y0 was outside S^n_-
  bool y0_projected = false;   // and was replaced by its NSD projection
};

enum class AlmStatus { converged, max_outer, line_search_failure, numerical_failure };

struct AlmResult {
  KktPoint point;
  AlmTrace trace;
  AlmStatus status = AlmStatus::max_outer;
  double final_kkt_residual = 0.0;
  int outer_iterations = 0;
  long inner_newton_total = 0;
  long cg_total = 0;

  bool converged() const { return status == AlmStatus::converged; }
};

/// Multiplier step Y+ = Y + rho_tilde [G(x+) - Pi_{S+}(G(x+) + Y/rho)],
/// z+ = z + rho_tilde h(x+). With rho_tilde = rho this lands exactly in S^n_-.
std::pair<SymMatrix, Eigen::VectorXd> update_multipliers(const ProblemInstance& p,
                                                         const Eigen::VectorXd& x_new,
                                                         const SymMatrix& Y,
                                                         const Eigen::VectorXd& z,
                                                         const PenaltyParams& pen);

/// Inner acceptance tests on sqrt(rho_tilde)*||grad_x L_rho||:
///   (a)  <= eps'_k
///   (b)  <= eps'_k min{1, rho_tilde ||dual grad||}
///   (c)  <= eps'_k min{1, (rho_tilde ||dual grad||)^2}.
bool check_inner_criterion(double grad_x_norm, double dual_grad_norm, const PenaltyParams& pen,
                           int k, const AlmConfig& cfg);

double penalty_update(double rho_k, const AlmConfig& cfg);

/// Outer loop: termination check, inner solve under the selected criterion,
/// multiplier update, penalty update; one trace row per performed iteration.
AlmResult run_alm(const ProblemInstance& p, const Eigen::VectorXd& x0, const SymMatrix& Y0,
                  const Eigen::VectorXd& z0, const AlmConfig& cfg, const NewtonConfig& newton_cfg);

}  // namespace nlsdp
