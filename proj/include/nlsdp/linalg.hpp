#pragma once

#include <vector>

#include <Eigen/Core>

#include "nlsdp/sym_matrix.hpp"

namespace nlsdp {

/// Ordered eigendecomposition A = P diag(lambda) P^T with the index sets of
/// positive (alpha), near-zero (beta) and negative (gamma) eigenvalues.
/// lambda is sorted nonincreasing, so the three sets are contiguous ranges.
struct EigenSystem {
  Eigen::MatrixXd P;
  Eigen::VectorXd lambda;
  std::vector<int> alpha;
  std::vector<int> beta;
  std::vector<int> gamma;
  double zero_tol = 0.0;

  int dim() const { return static_cast<int>(lambda.size()); }
  SymMatrix reconstruct() const;
};

/// Scale-aware classification threshold: 1e-8 * max(1, |lambda_1|, |lambda_n|).
double default_zero_tol(const Eigen::VectorXd& lambda_sorted);

EigenSystem eig_sym(const SymMatrix& a, double zero_tol);
/// Same with the scale-aware default threshold.
EigenSystem eig_sym(const SymMatrix& a);

enum class ConeSign { plus, minus };

/// Metric projection onto the PSD (plus) or NSD (minus) cone.
SymMatrix proj_cone(const SymMatrix& a, ConeSign sign);

double dist_cone(const SymMatrix& a, ConeSign sign);
double dist_cone_sq(const SymMatrix& a, ConeSign sign);

/// Moore-Penrose pseudo-inverse via eigendecomposition; eigenvalues within
/// zero_tol of zero are dropped.
SymMatrix pinv_sym(const SymMatrix& a, double zero_tol);
SymMatrix pinv_sym(const SymMatrix& a);

}  // namespace nlsdp
