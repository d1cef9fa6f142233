#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nlsdp/aug_lagrangian.hpp"
#include "nlsdp/problem.hpp"

namespace nlsdp {

/// Geometry of the critical cone at a stationary pair: eigendecomposition of
/// A = G(x) + Y, an orthonormal basis of
///   { d : G'(x)d in aff C_{S+}(G(x), Y), h'(x)d = 0 }
/// in the variable coordinates, and the dimension of the stricter kernel
/// { d : G'(x)d = 0, h'(x)d = 0 } inside it.
struct ConeGeometry {
  EigenSystem eig;
  Eigen::MatrixXd basis_aff;  // dim_x x m, orthonormal columns
  int kernel_dim = 0;
};

enum class ConeMembership { in_cone, in_affine_hull, outside };

/// Curvature correction of the PSD cone at a complementary pair (G >= 0,
/// Y <= 0, GY = 0): 2 sum_{i in alpha, j in gamma} (lam_j/lam_i) Ht_ij^2 with
/// eigen-data of A = G + Y. Always <= 0. Throws InvalidInput when the pair is
/// not complementary.
double sigma_term(const SymMatrix& Gbar, const SymMatrix& Ybar, const SymMatrix& H);

/// Classifies H against the critical cone of eig's pair: membership in the
/// cone needs the beta-block of P^T H P positive semidefinite and the
/// beta-gamma / gamma-gamma blocks zero; the affine hull drops the
/// semidefiniteness requirement.
ConeMembership critical_cone_membership(const EigenSystem& eig, const SymMatrix& H, double tol);

ConeGeometry cone_geometry(const ProblemInstance& p, const KktPoint& pt);

struct SoscResult {
  double min_eig = 0.0;
  bool holds = false;
  int subspace_dim = 0;
  int kernel_dim = 0;
};

/// Reduced second-order test: assembles M_ij = <b_i, L'' b_j> - Ups(b_i, b_j)
/// over an orthonormal basis of the cone-geometry subspace (sigma term
/// polarized) and reports the minimum eigenvalue; holds iff min_eig > tol.
/// An empty subspace is vacuously positive with a +infinity sentinel.
SoscResult strong_sosc_check(const ProblemInstance& p, const KktPoint& pt, double tol);

struct CertificateReport {
  double sosc_min_eig = 0.0;
  bool sosc_holds = false;
  std::vector<std::pair<double, double>> bundle_min_eigs;  // (rho, lambda_min)
  double eta_estimate = 0.0;
  std::string verdict;  // "positive" | "negative" | "inconsistent"
  double kkt_residual = 0.0;
  int subspace_dim = 0;
  int kernel_dim = 0;
};

/// For each rho on the (increasing, positive) grid, assembles the dense
/// generalized Hessian with the bundle-minimal selection (Omega = 0, Q = I)
/// and records its minimum eigenvalue. Positive verdict requires
/// lambda_min >= eta_tol from the first positive grid point onward; the
/// report cross-validates against strong_sosc_check.
CertificateReport hessian_bundle_check(const ProblemInstance& p, const KktPoint& pt,
                                       const std::vector<double>& rho_grid, double eta_tol);

/// Value of the distinguished quadratic-bundle element at H:
/// sum_{i in alpha, j in gamma} (-lam_j/lam_i) Ht_ij^2 on the affine hull of
/// the critical cone, +infinity outside. Equals -sigma_term/2 on the hull.
double quad_bundle_element(const SymMatrix& Gbar, const SymMatrix& Ybar, const SymMatrix& H);

}  // namespace nlsdp
