#include "nlsdp/newton_cg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "nlsdp/errors.hpp"

namespace nlsdp {

void NewtonConfig::validate() const {
  if (!(mu > 0.0 && mu < 0.5)) throw InvalidInput("NewtonConfig: mu must be in (0, 1/2)");
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidInput("NewtonConfig: tau must be in (0, 1]");
  if (!(tau1 > 0.0 && tau1 < 1.0)) throw InvalidInput("NewtonConfig: tau1 must be in (0, 1)");
  if (!(tau2 > 0.0 && tau2 < 1.0)) throw InvalidInput("NewtonConfig: tau2 must be in (0, 1)");
  if (!(nu_bar > 0.0 && nu_bar < 1.0)) throw InvalidInput("NewtonConfig: nu_bar must be in (0, 1)");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidInput("NewtonConfig: theta must be in (0, 1)");
  if (cg_max_iter < 0) throw InvalidInput("NewtonConfig: cg_max_iter must be >= 0");
  if (max_newton_iters < 0) throw InvalidInput("NewtonConfig: max_newton_iters must be >= 0");
  if (!(grad_tol > 0.0)) throw InvalidInput("NewtonConfig: grad_tol must be > 0");
  if (max_backtracks < 1) throw InvalidInput("NewtonConfig: max_backtracks must be >= 1");
}

int NewtonConfig::cg_cap(int dim_x) const {
  return cg_max_iter > 0 ? cg_max_iter : std::min(100, dim_x);
}

CgResult cg_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op,
                  const Eigen::VectorXd& rhs, double tol, int max_iter) {
  CgResult res;
  res.solution = Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd r = rhs;
  double rr = r.squaredNorm();
  if (std::sqrt(rr) <= tol) {
    res.converged = true;
    res.residual_norm = std::sqrt(rr);
    return res;
  }
  Eigen::VectorXd p = r;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd q = op(p);
    if (!q.allFinite()) throw NumericalFailure("cg_solve: operator produced non-finite values");
    const double pq = p.dot(q);
    res.iterations = it + 1;
    if (pq <= 0.0) {
      res.negative_curvature = true;
      if (it == 0) res.solution = rhs;  // steepest-descent fallback (rhs = -grad)
      res.residual_norm = (rhs - op(res.solution)).norm();
      return res;
    }
    const double alpha = rr / pq;
    res.solution += alpha * p;
    r -= alpha * q;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= tol) {
      res.converged = true;
      res.residual_norm = std::sqrt(rr_next);
      return res;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  res.residual_norm = std::sqrt(rr);
  return res;
}

namespace {

/// Everything the Newton loop needs at one iterate, from a single
/// eigendecomposition of Z = G(x) + Y/rho.
struct IterateData {
  EigenSystem eig;       // of G(x) + Y/rho
  double value = 0.0;    // L_rho(x, Y, z)
  Eigen::VectorXd grad;  // grad_x L_rho
  double grad_norm = 0.0;
  double dual_norm = 0.0;  // ||(G - Pi_+(Z), h)||
};

IterateData evaluate_iterate(const ProblemInstance& p, const Eigen::VectorXd& x,
                             const SymMatrix& Y, const Eigen::VectorXd& z,
                             const PenaltyParams& pen) {
  IterateData it;
  const SymMatrix shifted = p.G(x) + Y.scaled(1.0 / pen.rho);
  it.eig = eig_sym(shifted);

  Eigen::VectorXd lam_minus = it.eig.lambda;
  double dist_sq = 0.0;
  for (int i = 0; i < lam_minus.size(); ++i) {
    lam_minus[i] = std::min(lam_minus[i], 0.0);
    dist_sq += lam_minus[i] * lam_minus[i];
  }
  const SymMatrix proj_minus =
      SymMatrix::from_matrix(it.eig.P * lam_minus.asDiagonal() * it.eig.P.transpose());

  it.value = p.f(x) + 0.5 * pen.rho * dist_sq - Y.norm() * Y.norm() / (2.0 * pen.rho);
  it.grad = p.grad_f(x) + pen.rho * p.apply_Gp_adjoint(x, proj_minus);
  // G - Pi_+(Z) = Pi_-(Z) - Y/rho
  double dual_sq = (proj_minus - Y.scaled(1.0 / pen.rho)).mat().squaredNorm();
  if (p.m_eq > 0) {
    const Eigen::VectorXd hx = p.h(x);
    it.value += z.dot(hx) + 0.5 * pen.rho * hx.squaredNorm();
    it.grad += p.apply_hp_adjoint(x, z + pen.rho * hx);
    dual_sq += hx.squaredNorm();
  }
  it.grad_norm = it.grad.norm();
  it.dual_norm = std::sqrt(dual_sq);
  return it;
}

/// L_rho at a line-search trial point; eigenvalues only.
double trial_value(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                   const Eigen::VectorXd& z, const PenaltyParams& pen) {
  const SymMatrix shifted = p.G(x) + Y.scaled(1.0 / pen.rho);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shifted.mat(), Eigen::EigenvaluesOnly);
  double dist_sq = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = std::min(es.eigenvalues()[i], 0.0);
    dist_sq += v * v;
  }
  double val = p.f(x) + 0.5 * pen.rho * dist_sq - Y.norm() * Y.norm() / (2.0 * pen.rho);
  if (p.m_eq > 0) {
    const Eigen::VectorXd hx = p.h(x);
    val += z.dot(hx) + 0.5 * pen.rho * hx.squaredNorm();
  }
  return val;
}

}  // namespace

NewtonReport solve_subproblem(const ProblemInstance& p, const Eigen::VectorXd& x0,
                              const SymMatrix& Y, const Eigen::VectorXd& z,
                              const PenaltyParams& pen, const NewtonConfig& cfg,
                              const InnerCriterion& stop) {
  cfg.validate();
  pen.validate();
  if (x0.size() != p.dim_x) throw InvalidInput("solve_subproblem: x0 dimension mismatch");
  if (!x0.allFinite()) throw InvalidInput("solve_subproblem: x0 has non-finite entries");

  NewtonReport rep;
  Eigen::VectorXd x = x0;
  IterateData it = evaluate_iterate(p, x, Y, z, pen);
  rep.grad_norms.push_back(it.grad_norm);
  rep.values.push_back(it.value);

  const int t_cap = cfg.cg_cap(p.dim_x);
  for (int j = 0;; ++j) {
    if (stop && stop(x, it.grad_norm, it.dual_norm)) {
      rep.converged = true;
      rep.status = NewtonStatus::converged_criterion;
      break;
    }
    if (it.grad_norm <= cfg.grad_tol) {
      rep.converged = true;
      rep.status = NewtonStatus::converged_grad_tol;
      break;
    }
    if (j >= cfg.max_newton_iters) {
      rep.status = NewtonStatus::max_iterations;
      break;
    }

    const double nu = std::min(cfg.nu_bar, std::pow(it.grad_norm, 1.0 + cfg.tau));
    const double eps_reg = cfg.tau1 * std::min(cfg.tau2, it.grad_norm);

    // The curvature-including element (Omega = 1): steps that push zero
    // eigenvalues across the kink see the penalty curvature in the model,
    // which keeps unit steps acceptable. Omega = 0 under-models those
    // directions and stalls the line search at large rho.
    const WSelection sel = build_w_selection(it.eig, OmegaMode::ones);
    const GenHessianOperator hess(p, x, Y, z, pen, sel);
    const auto op = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return hess.apply(v) + eps_reg * v;
    };

    const CgResult cg = cg_solve(op, -it.grad, nu, t_cap);
    rep.total_cg_iters += cg.iterations;
    if (cg.negative_curvature) ++rep.negative_curvature_events;

    Eigen::VectorXd d = cg.solution;
    double gd = it.grad.dot(d);
    if (!(gd < 0.0)) {  // keep a descent direction no matter what CG returned
      d = -it.grad;
      gd = -it.grad_norm * it.grad_norm;
    }

    // An ulp of slack on the sufficient-decrease test: near convergence the
    // true decrease per step drops below the rounding noise of the value.
    const double slack =
        4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(it.value));
    double step = 1.0;
    bool accepted = false;
    for (int m = 0; m <= cfg.max_backtracks; ++m) {
      if (trial_value(p, x + step * d, Y, z, pen) <= it.value + cfg.mu * step * gd + slack) {
        accepted = true;
        break;
      }
      step *= cfg.theta;
    }
    if (!accepted) {
      rep.status = NewtonStatus::line_search_failure;
      break;
    }

    x += step * d;
    rep.step_sizes.push_back(step);
    ++rep.newton_iters;
    it = evaluate_iterate(p, x, Y, z, pen);
    rep.grad_norms.push_back(it.grad_norm);
    rep.values.push_back(it.value);
    if (!std::isfinite(it.grad_norm))
      throw NumericalFailure("solve_subproblem: non-finite gradient");
  }

  rep.x_final = x;
  rep.grad_norm_final = it.grad_norm;
  return rep;
}

}  // namespace nlsdp
