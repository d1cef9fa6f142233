#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "nlsdp/linalg.hpp"
#include "nlsdp/problem.hpp"

namespace nlsdp {

/// Penalty rho with offset rho_bar; the dual step is rho_tilde = rho - rho_bar.
/// rho_bar = 0 recovers the traditional multiplier update.
struct PenaltyParams {
  double rho = 1.0;
  double rho_bar = 0.0;

  double rho_tilde() const { return rho - rho_bar; }
  void validate() const;
};

/// One element of the B-subdifferential of the NSD-cone projection at
/// Z = G(x) + Y/rho, parameterized on the zero-eigenvalue block by (Omega, Q).
/// Sigma carries the eigenvalue-ratio coefficients outside beta x beta (those
/// entries are delegated to Omega and stored as 0 here).
struct WSelection {
  EigenSystem eig;
  Eigen::MatrixXd Sigma;
  Eigen::MatrixXd Omega;
  Eigen::MatrixXd Q;
};

enum class OmegaMode { zeros, ones, random };
enum class QMode { identity, random };

WSelection build_w_selection(const EigenSystem& eig, OmegaMode omega_mode = OmegaMode::zeros,
                             QMode q_mode = QMode::identity, std::uint64_t seed = 0);

/// Applies the selected subdifferential element to H. Self-adjoint, with
/// 0 <= <H, W(H)> <= ||H||_F^2.
SymMatrix apply_w(const WSelection& sel, const SymMatrix& h);

/// Augmented Lagrangian value
///   f(x) + (rho/2) dist^2(G(x)+Y/rho, S^n_+) - ||Y||^2/(2 rho)
///     + <z, h(x)> + (rho/2)||h(x)||^2.
double alm_value(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                 const Eigen::VectorXd& z, const PenaltyParams& pen);

/// Gradient in x: grad f + rho G'(x)* Pi_{S-}(G(x)+Y/rho) + h'(x)*(z + rho h).
Eigen::VectorXd alm_grad(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                         const Eigen::VectorXd& z, const PenaltyParams& pen);

/// Dual gradient, SDP block: G(x) - Pi_{S+}(G(x)+Y/rho).
SymMatrix alm_dual_grad_sdp(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                            const PenaltyParams& pen);

/// Norm of the stacked dual gradient (SDP block and, when present, h(x)).
double alm_dual_grad_norm(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                          const Eigen::VectorXd& z, const PenaltyParams& pen);

/// Matrix-free generalized Hessian of the augmented Lagrangian at (x,Y,z)
/// for a fixed subdifferential selection. Caches the multiplier estimates so
/// repeated applications (CG) do not re-project.
class GenHessianOperator {
 public:
  GenHessianOperator(const ProblemInstance& p, Eigen::VectorXd x, const SymMatrix& Y,
                     Eigen::VectorXd z, const PenaltyParams& pen, WSelection sel);

  Eigen::VectorXd apply(const Eigen::VectorXd& d) const;
  const WSelection& selection() const { return sel_; }

 private:
  const ProblemInstance* p_;
  Eigen::VectorXd x_;
  PenaltyParams pen_;
  WSelection sel_;
  SymMatrix y_estimate_;
  Eigen::VectorXd z_estimate_;
};

/// L''_xx(x, rho Pi_{S-}(G+Y/rho), z + rho h) d + rho G'* W(G' d) + rho h'* h' d.
/// sel must be built from the eigendecomposition of G(x) + Y/rho.
Eigen::VectorXd apply_gen_hessian(const ProblemInstance& p, const Eigen::VectorXd& x,
                                  const SymMatrix& Y, const Eigen::VectorXd& z,
                                  const PenaltyParams& pen, const WSelection& sel,
                                  const Eigen::VectorXd& d);

/// Eigenvalue-ratio expansion of <d, A_rho d> at a KKT point, evaluated from
/// a fresh eigendecomposition of A = G(x) + Y (independent route from
/// apply_gen_hessian, which works on G(x) + Y/rho):
///
///   <d, L'' d> + rho sum_{gg} Ht_ij^2 + 2 rho sum_{bg} Ht_ij^2
///     + 2 rho sum_{ag} (-lam_j / (rho lam_i - lam_j)) Ht_ij^2
///     + rho sum_{bb} Omega_ij (Q^T Ht_bb Q)_ij^2 + rho ||h'(x) d||^2,
///
/// with Ht = P^T (G'(x)d) P and eigen-data of A. The beta-block weights of
/// the expansion coincide with the selection's (Omega, Q) expressed in the
/// selection's own zero-eigenspace basis (the two bases differ by an
/// orthogonal factor that Q absorbs). Requires the point to be stationary and
/// sel to be built at it; otherwise throws StalePoint.
double quad_form_expansion(const ProblemInstance& p, const Eigen::VectorXd& x, const SymMatrix& Y,
                           const Eigen::VectorXd& z, const PenaltyParams& pen,
                           const WSelection& sel, const Eigen::VectorXd& d);

}  // namespace nlsdp
