#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "nlsdp/aug_lagrangian.hpp"
#include "nlsdp/problem.hpp"

namespace nlsdp {

struct NewtonConfig {
  double mu = 1e-4;            // Armijo slope, in (0, 1/2)
  double tau = 0.5;            // superlinearity exponent, in (0, 1]
  double tau1 = 1e-4;          // regularization scale, in (0, 1)
  double tau2 = 1e-2;          // regularization cap, in (0, 1)
  double nu_bar = 0.5;         // forcing-term cap, in (0, 1)
  double theta = 0.5;          // backtracking ratio, in (0, 1)
  int cg_max_iter = 0;         // CG cap t_j; 0 means min(100, dim_x)
  int max_newton_iters = 200;
  double grad_tol = 1e-10;     // inner termination threshold
  int max_backtracks = 60;

  void validate() const;
  int cg_cap(int dim_x) const;
};

enum class NewtonStatus {
  converged_grad_tol,
  converged_criterion,
  max_iterations,
  line_search_failure,
};

struct NewtonReport {
  Eigen::VectorXd x_final;
  double grad_norm_final = 0.0;
  int newton_iters = 0;
  long total_cg_iters = 0;
  std::vector<double> step_sizes;
  std::vector<double> grad_norms;  // one per iterate, final included
  std::vector<double> values;      // L_rho per iterate, final included
  bool converged = false;
  NewtonStatus status = NewtonStatus::max_iterations;
  int negative_curvature_events = 0;
};

struct CgResult {
  Eigen::VectorXd solution;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  bool negative_curvature = false;
};

/// Conjugate gradients on a self-adjoint operator, absolute residual
/// tolerance. Negative curvature (<p, op p> <= 0) is flagged; the fallback is
/// the rhs direction when it fires on the first iteration, otherwise the
/// current iterate (the caller's rhs is -grad, so that is steepest descent).
CgResult cg_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op,
                  const Eigen::VectorXd& rhs, double tol, int max_iter);

/// Outer-loop-supplied acceptance test, evaluated at every inner iterate with
/// the current gradient norm and dual gradient norm.
using InnerCriterion =
    std::function<bool(const Eigen::VectorXd& x, double grad_norm, double dual_grad_norm)>;

/// Minimizes x -> L_rho(x, Y, z) by semismooth Newton steps: a regularized
/// generalized-Hessian system solved inexactly by CG with forcing term
/// nu_j = min(nu_bar, ||g||^{1+tau}) and shift eps_j = tau1 min(tau2, ||g||),
/// then Armijo backtracking. Stops on the injected criterion, on
/// ||g|| <= grad_tol, or at max_newton_iters.
NewtonReport solve_subproblem(const ProblemInstance& p, const Eigen::VectorXd& x0,
                              const SymMatrix& Y, const Eigen::VectorXd& z,
                              const PenaltyParams& pen, const NewtonConfig& cfg,
                              const InnerCriterion& stop = nullptr);

}  // namespace nlsdp
