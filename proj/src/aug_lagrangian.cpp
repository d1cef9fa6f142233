#include "nlsdp/aug_lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/QR>

#include "nlsdp/errors.hpp"
#include "nlsdp/rng.hpp"

namespace nlsdp {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

Eigen::MatrixXd random_orthogonal(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

/// Projection onto S^n_- assembled from an existing eigendecomposition, so the
/// estimate is classification-consistent with the selection built on it.
SymMatrix nsd_part(const EigenSystem& eig) {
  Eigen::VectorXd lam = eig.lambda;
  for (int i = 0; i < lam.size(); ++i) lam[i] = std::min(lam[i], 0.0);
  return SymMatrix::from_matrix(eig.P * lam.asDiagonal() * eig.P.transpose());
}

}  // namespace

void PenaltyParams::validate() const {
  if (!(rho_bar >= 0.0)) throw InvalidInput("PenaltyParams: rho_bar must be >= 0");
  if (!(rho > rho_bar)) throw InvalidInput("PenaltyParams: rho must exceed rho_bar");
}

WSelection build_w_selection(const EigenSystem& eig, OmegaMode omega_mode, QMode q_mode,
                             std::uint64_t seed) {
  const int n = eig.dim();
  const int nb = static_cast<int>(eig.beta.size());
  const int b0 = static_cast<int>(eig.alpha.size());

  WSelection sel;
  sel.eig = eig;
  sel.Sigma = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool bb = (i >= b0 && i < b0 + nb) && (j >= b0 && j < b0 + nb);
      if (bb) continue;  // delegated to Omega
      const double li = eig.lambda[i];
      const double lj = eig.lambda[j];
      sel.Sigma(i, j) =
          clamp01(1.0 - (std::max(li, 0.0) + std::max(lj, 0.0)) / (std::abs(li) + std::abs(lj)));
    }

  switch (omega_mode) {
    case OmegaMode::zeros:
      sel.Omega = Eigen::MatrixXd::Zero(nb, nb);
      break;
    case OmegaMode::ones:
      sel.Omega = Eigen::MatrixXd::Ones(nb, nb);
      break;
    case OmegaMode::random: {
      Rng rng(seed);
      sel.Omega = rng.symmetric_uniform(nb, 0.0, 1.0);
      break;
    }
  }
  sel.Q = (q_mode == QMode::identity) ? Eigen::MatrixXd::Identity(nb, nb)
                                      : random_orthogonal(nb, seed + 0x9e3779b97f4a7c15ull);
  return sel;
}

SymMatrix apply_w(const WSelection& sel, const SymMatrix& h) {
  const int n = sel.eig.dim();
  if (h.dim() != n) throw InvalidInput("apply_w: dimension mismatch");
  const int b0 = static_cast<int>(sel.eig.alpha.size());
  const int nb = static_cast<int>(sel.eig.beta.size());

  const Eigen::MatrixXd ht = sel.eig.P.transpose() * h.mat() * sel.eig.P;
  Eigen::MatrixXd out = sel.Sigma.cwiseProduct(ht);
  if (nb > 0) {
    const Eigen::MatrixXd hbb = ht.block(b0, b0, nb, nb);
    out.block(b0, b0, nb, nb) =
        sel.Q * sel.Omega.cwiseProduct(sel.Q.transpose() * hbb * sel.Q) * sel.Q.transpose();
  }
  return SymMatrix::from_matrix(sel.eig.P * out * sel.eig.P.transpose());
}

double alm_value(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                 const Eigen::VectorXd& z, const PenaltyParams& pen) {
  pen.validate();
  const SymMatrix shifted = p.G(x) + Y.scaled(1.0 / pen.rho);
  double val = p.f(x) + 0.5 * pen.rho * dist_cone_sq(shifted, ConeSign::plus) -
               Y.norm() * Y.norm() / (2.0 * pen.rho);
  if (p.m_eq > 0) {
    const Eigen::VectorXd hx = p.h(x);
    val += z.dot(hx) + 0.5 * pen.rho * hx.squaredNorm();
  }
  return val;
}

Eigen::VectorXd alm_grad(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                         const Eigen::VectorXd& z, const PenaltyParams& pen) {
  pen.validate();
  const SymMatrix shifted = p.G(x) + Y.scaled(1.0 / pen.rho);
  Eigen::VectorXd g =
      p.grad_f(x) + pen.rho * p.apply_Gp_adjoint(x, proj_cone(shifted, ConeSign::minus));
  if (p.m_eq > 0) g += p.apply_hp_adjoint(x, z + pen.rho * p.h(x));
  return g;
}

SymMatrix alm_dual_grad_sdp(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                            const PenaltyParams& pen) {
  const SymMatrix g = p.G(x);
  return g - proj_cone(g + Y.scaled(1.0 / pen.rho), ConeSign::plus);
}

double alm_dual_grad_norm(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                          const Eigen::VectorXd& z, const PenaltyParams& pen) {
  (void)z;
  const double sdp = alm_dual_grad_sdp(p, x, Y, pen).norm();
  double sq = sdp * sdp;
  if (p.m_eq > 0) sq += p.h(x).squaredNorm();
  return std::sqrt(sq);
}

GenHessianOperator::GenHessianOperator(const ProblemInstance& p, Eigen::VectorXd x,
                                       const SymMatrix& Y, Eigen::VectorXd z,
                                       const PenaltyParams& pen, WSelection sel)
    : p_(&p), x_(std::move(x)), pen_(pen), sel_(std::move(sel)), y_estimate_(p.n_sdp) {
  pen_.validate();
  (void)Y;
  y_estimate_ = nsd_part(sel_.eig).scaled(pen_.rho);
  if (p.m_eq > 0) z_estimate_ = std::move(z) + pen_.rho * p.h(x_);
}

Eigen::VectorXd GenHessianOperator::apply(const Eigen::VectorXd& d) const {
  if (d.size() != p_->dim_x) throw InvalidInput("GenHessianOperator: direction dimension mismatch");
  Eigen::VectorXd out = p_->apply_hess_lagrangian(x_, y_estimate_, z_estimate_, d);
  out += pen_.rho * p_->apply_Gp_adjoint(x_, apply_w(sel_, p_->apply_Gp(x_, d)));
  if (p_->m_eq > 0) out += pen_.rho * p_->apply_hp_adjoint(x_, p_->apply_hp(x_, d));
  return out;
}

Eigen::VectorXd apply_gen_hessian(const ProblemInstance& p, const Eigen::VectorXd& x,
                                  const SymMatrix& Y, const Eigen::VectorXd& z,
                                  const PenaltyParams& pen, const WSelection& sel,
                                  const Eigen::VectorXd& d) {
  return GenHessianOperator(p, x, Y, z, pen, sel).apply(d);
}

double quad_form_expansion(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                           const Eigen::VectorXd& z, const PenaltyParams& pen,
                           const WSelection& sel, const Eigen::VectorXd& d) {
  pen.validate();
  if (d.size() != p.dim_x) throw InvalidInput("quad_form_expansion: direction dimension mismatch");

  const double residual = kkt_residual(p, {x, Y, z});
  if (!(residual <= 1e-8))
    throw StalePoint("quad_form_expansion: point is not stationary (KKT residual " +
                     std::to_string(residual) + ")");
  const SymMatrix g = p.G(x);
  const SymMatrix shifted = g + Y.scaled(1.0 / pen.rho);
  if ((sel.eig.reconstruct() - shifted).norm() > 1e-8 * (1.0 + shifted.norm()))
    throw StalePoint("quad_form_expansion: selection was not built at G(x)+Y/rho");

  const EigenSystem eig_a = eig_sym(g + Y);
  if (eig_a.alpha.size() != sel.eig.alpha.size() || eig_a.beta.size() != sel.eig.beta.size())
    throw StalePoint("quad_form_expansion: eigenvalue classification mismatch with the selection");

  const int n = p.n_sdp;
  const int na = static_cast<int>(eig_a.alpha.size());
  const int nb = static_cast<int>(eig_a.beta.size());
  const SymMatrix hmat = p.apply_Gp(x, d);
  const Eigen::MatrixXd ht = eig_a.P.transpose() * hmat.mat() * eig_a.P;

  double total = d.dot(p.apply_hess_lagrangian(x, Y, z, d));
  for (int i = na + nb; i < n; ++i)
    for (int j = na + nb; j < n; ++j) total += pen.rho * ht(i, j) * ht(i, j);
  for (int i = na; i < na + nb; ++i)
    for (int j = na + nb; j < n; ++j) total += 2.0 * pen.rho * ht(i, j) * ht(i, j);
  for (int i = 0; i < na; ++i)
    for (int j = na + nb; j < n; ++j) {
      const double li = eig_a.lambda[i];
      const double lj = eig_a.lambda[j];
      total += 2.0 * pen.rho * (-lj / (pen.rho * li - lj)) * ht(i, j) * ht(i, j);
    }
  if (nb > 0) {
    // beta-block in the selection's own basis; its Q absorbs the orthogonal
    // change of basis between the two zero-eigenspace frames.
    const Eigen::MatrixXd hsel = sel.eig.P.transpose() * hmat.mat() * sel.eig.P;
    const Eigen::MatrixXd hq =
        sel.Q.transpose() * hsel.block(na, na, nb, nb) * sel.Q;
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) total += pen.rho * sel.Omega(i, j) * hq(i, j) * hq(i, j);
  }
  if (p.m_eq > 0) total += pen.rho * p.apply_hp(x, d).squaredNorm();
  return total;
}

}  // namespace nlsdp
