#include "nlsdp/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nlsdp/errors.hpp"

namespace nlsdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Cached sigma-term quadratic form at a complementary pair.
struct SigmaForm {
  Eigen::MatrixXd P;
  Eigen::VectorXd lambda;
  int na = 0;
  int nb = 0;

  explicit SigmaForm(const EigenSystem& eig)
      : P(eig.P),
        lambda(eig.lambda),
        na(static_cast<int>(eig.alpha.size())),
        nb(static_cast<int>(eig.beta.size())) {}

  double quad(const SymMatrix& h) const {
    const int n = static_cast<int>(lambda.size());
    const Eigen::MatrixXd ht = P.transpose() * h.mat() * P;
    double s = 0.0;
    for (int i = 0; i < na; ++i)
      for (int j = na + nb; j < n; ++j) s += (lambda[j] / lambda[i]) * ht(i, j) * ht(i, j);
    return 2.0 * s;
  }

  double polarized(const SymMatrix& h1, const SymMatrix& h2) const {
    return 0.5 * (quad(h1 + h2) - quad(h1) - quad(h2));
  }
};

void check_complementary(const SymMatrix& gbar, const SymMatrix& ybar) {
  if (gbar.dim() != ybar.dim()) throw InvalidInput("complementary pair: dimension mismatch");
  const double scale = 1.0 + gbar.norm() + ybar.norm();
  const Eigen::MatrixXd prod = gbar.mat() * ybar.mat();
  if (prod.norm() > 1e-8 * scale * scale)
    throw InvalidInput("complementary pair: G*Y is not zero");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(gbar.mat(), Eigen::EigenvaluesOnly);
  if (eg.eigenvalues().minCoeff() < -1e-8 * scale)
    throw InvalidInput("complementary pair: G is not positive semidefinite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ey(ybar.mat(), Eigen::EigenvaluesOnly);
  if (ey.eigenvalues().maxCoeff() > 1e-8 * scale)
    throw InvalidInput("complementary pair: Y is not negative semidefinite");
}

/// Orthonormal null-space basis of C (rows may be zero) with a relative
/// singular-value cutoff.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& c, int cols) {
  if (c.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cutoff = 1e-10 * (sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

}  // namespace

double sigma_term(const SymMatrix& gbar, const SymMatrix& ybar, const SymMatrix& h) {
  check_complementary(gbar, ybar);
  if (h.dim() != gbar.dim()) throw InvalidInput("sigma_term: H dimension mismatch");
  const EigenSystem eig = eig_sym(gbar + ybar);
  return SigmaForm(eig).quad(h);
}

ConeMembership critical_cone_membership(const EigenSystem& eig, const SymMatrix& h, double tol) {
  if (h.dim() != eig.dim()) throw InvalidInput("critical_cone_membership: dimension mismatch");
  const int n = eig.dim();
  const int na = static_cast<int>(eig.alpha.size());
  const int nb = static_cast<int>(eig.beta.size());
  const int ng = n - na - nb;
  const Eigen::MatrixXd ht = eig.P.transpose() * h.mat() * eig.P;

  const double bg = (nb > 0 && ng > 0) ? ht.block(na, na + nb, nb, ng).norm() : 0.0;
  const double gg = (ng > 0) ? ht.block(na + nb, na + nb, ng, ng).norm() : 0.0;
  if (bg > tol || gg > tol) return ConeMembership::outside;
  if (nb > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ht.block(na, na, nb, nb),
                                                      Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) return ConeMembership::in_affine_hull;
  }
  return ConeMembership::in_cone;
}

ConeGeometry cone_geometry(const ProblemInstance& p, const KktPoint& pt) {
  ConeGeometry geo;
  geo.eig = eig_sym(p.G(pt.x) + pt.Y);
  const int n = p.n_sdp;
  const int na = static_cast<int>(geo.eig.alpha.size());
  const int nb = static_cast<int>(geo.eig.beta.size());
  const int ng = n - na - nb;

  // Linear conditions for G'(x)d in aff C plus h'(x)d = 0, one column of
  // coefficients per unit direction.
  const int aff_rows = nb * ng + ng * (ng + 1) / 2 + p.m_eq;
  Eigen::MatrixXd aff(aff_rows, p.dim_x);
  // Kernel conditions G'(x)d = 0 (all packed entries) plus h'(x)d = 0.
  Eigen::MatrixXd ker(packed_size(n) + p.m_eq, p.dim_x);
  for (int c = 0; c < p.dim_x; ++c) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p.dim_x);
    e[c] = 1.0;
    const SymMatrix gd = p.apply_Gp(pt.x, e);
    const Eigen::MatrixXd gt = geo.eig.P.transpose() * gd.mat() * geo.eig.P;
    int r = 0;
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < ng; ++j) aff(r++, c) = gt(na + i, na + nb + j);
    for (int i = 0; i < ng; ++i)
      for (int j = i; j < ng; ++j) aff(r++, c) = gt(na + nb + i, na + nb + j);
    ker.col(c).head(packed_size(n)) = gd.packed();
    if (p.m_eq > 0) {
      const Eigen::VectorXd hd = p.apply_hp(pt.x, e);
      aff.col(c).tail(p.m_eq) = hd;
      ker.col(c).tail(p.m_eq) = hd;
    }
  }

  geo.basis_aff = null_space(aff, p.dim_x);
  geo.kernel_dim = static_cast<int>(null_space(ker, p.dim_x).cols());
  return geo;
}

SoscResult strong_sosc_check(const ProblemInstance& p, const KktPoint& pt, double tol) {
  const ConeGeometry geo = cone_geometry(p, pt);
  SoscResult res;
  res.subspace_dim = static_cast<int>(geo.basis_aff.cols());
  res.kernel_dim = geo.kernel_dim;
  if (res.subspace_dim == 0) {  // vacuously positive
    res.min_eig = kInf;
    res.holds = true;
    return res;
  }

  const int m = res.subspace_dim;
  const SigmaForm sigma(geo.eig);
  std::vector<SymMatrix> gb;
  gb.reserve(m);
  for (int i = 0; i < m; ++i) gb.push_back(p.apply_Gp(pt.x, geo.basis_aff.col(i)));

  Eigen::MatrixXd red(m, m);
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd hbj = p.apply_hess_lagrangian(pt.x, pt.Y, pt.z, geo.basis_aff.col(j));
    for (int i = 0; i < m; ++i)
      red(i, j) = geo.basis_aff.col(i).dot(hbj) - sigma.polarized(gb[i], gb[j]);
  }
  const EigenSystem es = eig_sym(SymMatrix::from_matrix(red));
  res.min_eig = es.lambda[m - 1];
  res.holds = res.min_eig > tol;
  return res;
}

CertificateReport hessian_bundle_check(const ProblemInstance& p, const KktPoint& pt,
                                       const std::vector<double>& rho_grid, double eta_tol) {
  if (rho_grid.empty()) throw InvalidInput("hessian_bundle_check: empty rho grid");
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    if (!(rho_grid[i] > 0.0))
      throw InvalidInput("hessian_bundle_check: grid entries must exceed rho_bar = 0");
    if (i > 0 && !(rho_grid[i] > rho_grid[i - 1]))
      throw InvalidInput("hessian_bundle_check: grid must be strictly increasing");
  }

  CertificateReport rep;
  rep.kkt_residual = kkt_residual(p, pt);
  const SoscResult sosc = strong_sosc_check(p, pt, eta_tol);
  rep.sosc_min_eig = sosc.min_eig;
  rep.sosc_holds = sosc.holds;
  rep.subspace_dim = sosc.subspace_dim;
  rep.kernel_dim = sosc.kernel_dim;

  for (const double rho : rho_grid) {
    const PenaltyParams pen{rho, 0.0};
    const SymMatrix shifted = p.G(pt.x) + pt.Y.scaled(1.0 / rho);
    const WSelection sel = build_w_selection(eig_sym(shifted));
    const GenHessianOperator op(p, pt.x, pt.Y, pt.z, pen, sel);

    Eigen::MatrixXd dense(p.dim_x, p.dim_x);
    for (int c = 0; c < p.dim_x; ++c) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(p.dim_x);
      e[c] = 1.0;
      dense.col(c) = op.apply(e);
    }
    const EigenSystem es = eig_sym(SymMatrix::from_matrix(dense));
    rep.bundle_min_eigs.emplace_back(rho, es.lambda[p.dim_x - 1]);
  }

  int first_positive = -1;
  for (std::size_t i = 0; i < rep.bundle_min_eigs.size(); ++i)
    if (rep.bundle_min_eigs[i].second >= eta_tol) {
      first_positive = static_cast<int>(i);
      break;
    }
  bool bundle_positive = first_positive >= 0;
  double eta = kInf;
  if (bundle_positive) {
    for (std::size_t i = first_positive; i < rep.bundle_min_eigs.size(); ++i) {
      eta = std::min(eta, rep.bundle_min_eigs[i].second);
      if (rep.bundle_min_eigs[i].second < eta_tol) bundle_positive = false;
    }
  } else {
    for (const auto& [rho, lmin] : rep.bundle_min_eigs) eta = std::min(eta, lmin);
  }
  rep.eta_estimate = eta;

  if (bundle_positive && rep.sosc_holds)
    rep.verdict = "positive";
  else if (!bundle_positive && !rep.sosc_holds)
    rep.verdict = "negative";
  else
    rep.verdict = "inconsistent";
  return rep;
}

double quad_bundle_element(const SymMatrix& gbar, const SymMatrix& ybar, const SymMatrix& h) {
  check_complementary(gbar, ybar);
  if (h.dim() != gbar.dim()) throw InvalidInput("quad_bundle_element: H dimension mismatch");
  const EigenSystem eig = eig_sym(gbar + ybar);
  const double tol = 1e-9 * (1.0 + h.norm());
  if (critical_cone_membership(eig, h, tol) == ConeMembership::outside) return kInf;
  return -0.5 * SigmaForm(eig).quad(h);
}

}  // namespace nlsdp
