#include "nlsdp/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "nlsdp/errors.hpp"

namespace nlsdp {

SymMatrix EigenSystem::reconstruct() const {
  return SymMatrix::from_matrix(P * lambda.asDiagonal() * P.transpose());
}

double default_zero_tol(const Eigen::VectorXd& lambda_sorted) {
  double scale = 1.0;
  if (lambda_sorted.size() > 0) {
    scale = std::max(scale, std::abs(lambda_sorted[0]));
    scale = std::max(scale, std::abs(lambda_sorted[lambda_sorted.size() - 1]));
  }
  return 1e-8 * scale;
}

EigenSystem eig_sym(const SymMatrix& a, double zero_tol) {
  if (a.dim() < 1) throw InvalidInput("eig_sym: matrix order must be >= 1");
  if (!a.mat().allFinite()) throw InvalidInput("eig_sym: non-finite entries");
  if (zero_tol < 0.0) throw InvalidInput("eig_sym: zero_tol must be >= 0");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.mat());
  if (solver.info() != Eigen::Success) throw NumericalFailure("eig_sym: eigensolver failed");

  // Eigen sorts ascending; flip to nonincreasing.
  const int n = a.dim();
  EigenSystem es;
  es.P.resize(n, n);
  es.lambda.resize(n);
  for (int i = 0; i < n; ++i) {
    es.lambda[i] = solver.eigenvalues()[n - 1 - i];
    es.P.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  es.zero_tol = zero_tol;
  for (int i = 0; i < n; ++i) {
    if (es.lambda[i] > zero_tol)
      es.alpha.push_back(i);
    else if (es.lambda[i] < -zero_tol)
      es.gamma.push_back(i);
    else
      es.beta.push_back(i);
  }
  return es;
}

EigenSystem eig_sym(const SymMatrix& a) {
  if (a.dim() < 1) throw InvalidInput("eig_sym: matrix order must be >= 1");
  if (!a.mat().allFinite()) throw InvalidInput("eig_sym: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> probe(a.mat(), Eigen::EigenvaluesOnly);
  Eigen::VectorXd lam = probe.eigenvalues().reverse();
  return eig_sym(a, default_zero_tol(lam));
}

SymMatrix proj_cone(const SymMatrix& a, ConeSign sign) {
  const EigenSystem es = eig_sym(a, 0.0);
  Eigen::VectorXd clamped = es.lambda;
  for (int i = 0; i < clamped.size(); ++i)
    clamped[i] = (sign == ConeSign::plus) ? std::max(clamped[i], 0.0) : std::min(clamped[i], 0.0);
  return SymMatrix::from_matrix(es.P * clamped.asDiagonal() * es.P.transpose());
}

double dist_cone_sq(const SymMatrix& a, ConeSign sign) {
  // By the Moreau decomposition the residual A - proj is the projection onto
  // the opposite cone, so the distance is the norm of the discarded part.
  const EigenSystem es = eig_sym(a, 0.0);
  double sq = 0.0;
  for (int i = 0; i < es.lambda.size(); ++i) {
    const double rest =
        (sign == ConeSign::plus) ? std::min(es.lambda[i], 0.0) : std::max(es.lambda[i], 0.0);
    sq += rest * rest;
  }
  return sq;
}

double dist_cone(const SymMatrix& a, ConeSign sign) { return std::sqrt(dist_cone_sq(a, sign)); }

SymMatrix pinv_sym(const SymMatrix& a, double zero_tol) {
  const EigenSystem es = eig_sym(a, zero_tol);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(es.lambda.size());
  for (int i : es.alpha) inv[i] = 1.0 / es.lambda[i];
  for (int i : es.gamma) inv[i] = 1.0 / es.lambda[i];
  return SymMatrix::from_matrix(es.P * inv.asDiagonal() * es.P.transpose());
}

SymMatrix pinv_sym(const SymMatrix& a) {
  if (a.dim() < 1) throw InvalidInput("pinv_sym: matrix order must be >= 1");
  if (!a.mat().allFinite()) throw InvalidInput("pinv_sym: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> probe(a.mat(), Eigen::EigenvaluesOnly);
  Eigen::VectorXd lam = probe.eigenvalues().reverse();
  return pinv_sym(a, default_zero_tol(lam));
}

}  // namespace nlsdp
