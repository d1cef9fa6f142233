#include "nlsdp/alm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nlsdp/errors.hpp"

namespace nlsdp {

namespace {
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}
}  // namespace

double AlmConfig::eps_prime(int k) const { return eps_prime0 * std::pow(eps_prime_decay, k); }

void AlmConfig::validate() const {
  if (!(rho_bar >= 0.0)) throw InvalidInput("AlmConfig: rho_bar must be >= 0");
  if (!(rho0 > rho_bar)) throw InvalidInput("AlmConfig: rho0 must exceed rho_bar");
  if (!(rho_max >= rho0)) throw InvalidInput("AlmConfig: rho_max must be >= rho0");
  if (rho_update == RhoUpdate::geometric && !(rho_factor >= 1.0))
    throw InvalidInput("AlmConfig: geometric rho_factor must be >= 1");
  if (!(eps_prime0 > 0.0)) throw InvalidInput("AlmConfig: eps_prime0 must be > 0");
  if (!(eps_prime_decay > 0.0 && eps_prime_decay < 1.0))
    throw InvalidInput("AlmConfig: eps_prime_decay must be in (0, 1)");
  if (!(kkt_tol >= 0.0)) throw InvalidInput("AlmConfig: kkt_tol must be >= 0");
  if (max_outer < 0) throw InvalidInput("AlmConfig: max_outer must be >= 0");
  if (supplement_c && !(*supplement_c > 0.0))
    throw InvalidInput("AlmConfig: supplement_c must be > 0");
}

std::pair<SymMatrix, Eigen::VectorXd> update_multipliers(const ProblemInstance& p,
                                                         const Eigen::VectorXd& x_new,
                                                         const SymMatrix& Y,
                                                         const Eigen::VectorXd& z,
                                                         const PenaltyParams& pen) {
  pen.validate();
  const SymMatrix step = alm_dual_grad_sdp(p, x_new, Y, pen);
  SymMatrix y_new = Y + step.scaled(pen.rho_tilde());
  Eigen::VectorXd z_new = z;
  if (p.m_eq > 0) z_new += pen.rho_tilde() * p.h(x_new);
  return {y_new, z_new};
}

bool check_inner_criterion(double grad_x_norm, double dual_grad_norm, const PenaltyParams& pen,
                           int k, const AlmConfig& cfg) {
  if (grad_x_norm < 0.0 || dual_grad_norm < 0.0)
    throw InvalidInput("check_inner_criterion: norms must be >= 0");
  const double lhs = std::sqrt(pen.rho_tilde()) * grad_x_norm;
  const double eps_k = cfg.eps_prime(k);
  switch (cfg.criterion) {
    case StopCriterion::a:
      return lhs <= eps_k;
    case StopCriterion::b:
      return lhs <= eps_k * std::min(1.0, pen.rho_tilde() * dual_grad_norm);
    case StopCriterion::c: {
      const double m = std::min(1.0, pen.rho_tilde() * dual_grad_norm);
      return lhs <= eps_k * m * m;
    }
  }
  return false;
}

double penalty_update(double rho_k, const AlmConfig& cfg) {
  if (cfg.rho_update == RhoUpdate::fixed) return rho_k;
  return std::min(cfg.rho_factor * rho_k, cfg.rho_max);
}

AlmResult run_alm(const ProblemInstance& p, const Eigen::VectorXd& x0, const SymMatrix& Y0,
                  const Eigen::VectorXd& z0, const AlmConfig& cfg, const NewtonConfig& newton_cfg) {
  cfg.validate();
  newton_cfg.validate();
  if (x0.size() != p.dim_x) throw InvalidInput("run_alm: x0 dimension mismatch");
  if (Y0.dim() != p.n_sdp) throw InvalidInput("run_alm: Y0 dimension mismatch");
  if (z0.size() != p.m_eq) throw InvalidInput("run_alm: z0 dimension mismatch");

  AlmResult res;
  Eigen::VectorXd x = x0;
  SymMatrix y = Y0;
  Eigen::VectorXd z = z0;

  const double feas_tol = 1e-12 * (1.0 + Y0.norm());
  if (proj_cone(Y0, ConeSign::plus).norm() > feas_tol) {
    res.trace.y0_infeasible = true;
    if (!cfg.keep_infeasible_y0) {
      y = proj_cone(Y0, ConeSign::minus);
      res.trace.y0_projected = true;
    }
  }

  double rho = cfg.rho0;
  try {
    for (int k = 0;; ++k) {
      const double residual = kkt_residual(p, {x, y, z});
      if (residual <= cfg.kkt_tol) {
        res.status = AlmStatus::converged;
        break;
      }
      if (k >= cfg.max_outer) {
        res.status = AlmStatus::max_outer;
        break;
      }

      const auto t0 = Clock::now();
      const PenaltyParams pen{rho, cfg.rho_bar};
      const InnerCriterion criterion = [&](const Eigen::VectorXd&, double gnorm,
                                           double dual_norm) {
        return check_inner_criterion(gnorm, dual_norm, pen, k, cfg);
      };

      NewtonReport rep = solve_subproblem(p, x, y, z, pen, newton_cfg, criterion);
      if (rep.status == NewtonStatus::line_search_failure) {
        res.status = AlmStatus::line_search_failure;
        x = rep.x_final;
        break;
      }
      x = rep.x_final;
      auto [y_new, z_new] = update_multipliers(p, x, y, z, pen);

      if (cfg.criterion == StopCriterion::c && cfg.supplement_c) {
        // Re-solve with a tightened tolerance until ||grad_x|| is dominated
        // by the multiplier movement.
        for (int round = 0; round < 5; ++round) {
          const double bound = *cfg.supplement_c * (y_new - y).norm();
          if (rep.grad_norm_final <= bound || bound <= 0.0) break;
          NewtonConfig tighter = newton_cfg;
          tighter.grad_tol = std::max(0.5 * bound, 1e-14);
          rep = solve_subproblem(p, x, y, z, pen, tighter, nullptr);
          if (rep.status == NewtonStatus::line_search_failure) break;
          x = rep.x_final;
          std::tie(y_new, z_new) = update_multipliers(p, x, y, z, pen);
        }
        if (rep.status == NewtonStatus::line_search_failure) {
          res.status = AlmStatus::line_search_failure;
          break;
        }
      }

      TraceRow row;
      row.k = k;
      row.rho = rho;
      row.rho_tilde = pen.rho_tilde();
      row.inner_iters = rep.newton_iters;
      row.cg_iters = rep.total_cg_iters;
      row.alm_value = alm_value(p, x, y, z, pen);
      row.grad_norm = rep.grad_norm_final;
      row.dY_norm = (y_new - y).norm();
      y = y_new;
      z = z_new;
      row.kkt_residual = kkt_residual(p, {x, y, z});
      if (p.multiplier_distance_oracle) row.dist_mult = p.multiplier_distance_oracle(y, z);
      row.time_s = seconds_since(t0);
      res.trace.rows.push_back(row);
      res.inner_newton_total += rep.newton_iters;
      res.cg_total += rep.total_cg_iters;

      rho = penalty_update(rho, cfg);
    }
  } catch (const NumericalFailure&) {
    res.status = AlmStatus::numerical_failure;
  }

  res.point = {x, y, z};
  res.final_kkt_residual = kkt_residual(p, res.point);
  res.outer_iterations = static_cast<int>(res.trace.rows.size());
  return res;
}

}  // namespace nlsdp
