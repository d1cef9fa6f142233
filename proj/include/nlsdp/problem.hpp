#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

#include "nlsdp/linalg.hpp"
#include "nlsdp/sym_matrix.hpp"

namespace nlsdp {

/// Primal-dual candidate: x is the variable vector (packed coordinates when
/// the variable is a matrix), Y the multiplier of the PSD constraint (kept in
/// the NSD cone), z the multipliers of the scalar equality constraints.
struct KktPoint {
  Eigen::VectorXd x;
  SymMatrix Y;
  Eigen::VectorXd z;
};

/// Callable description of one instance
///
///   min f(x)   s.t.  G(x) in S^n_+,  h(x) = 0,
///
/// with all derivatives exposed as operator applications. m_eq == 0 means no
/// equality block; h/apply_hp/apply_hp_adjoint then return empty vectors.
/// All callables must be pure; instances are immutable after construction and
/// safe to evaluate concurrently.
struct ProblemInstance {
  int dim_x = 0;
  int n_sdp = 0;
  int m_eq = 0;
  std::string name;
  bool multiplier_distance_is_surrogate = false;

  std::function<double(const Eigen::VectorXd&)> f;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_f;
  std::function<SymMatrix(const Eigen::VectorXd&)> G;
  /// G'(x)d
  std::function<SymMatrix(const Eigen::VectorXd&, const Eigen::VectorXd&)> apply_Gp;
  /// G'(x)*S
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const SymMatrix&)> apply_Gp_adjoint;
  /// L''_xx(x,Y,z)d, equality part included.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const SymMatrix&, const Eigen::VectorXd&,
                                const Eigen::VectorXd&)>
      apply_hess_lagrangian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> h;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> apply_hp;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> apply_hp_adjoint;

  /// Distance (or documented surrogate) from (Y,z) to the multiplier set at
  /// the instance's stationary point; empty when unknown.
  std::function<double(const SymMatrix&, const Eigen::VectorXd&)> multiplier_distance_oracle;

  /// Known stationary point with multipliers, when the instance has one.
  std::function<KktPoint()> builtin_stationary;
};

/// One-dimensional instance: min x^3/2 s.t. -x^2 E_33 in S^3_+. The feasible
/// set is {0}; the multiplier set at 0 is the whole NSD cone.
ProblemInstance toy_problem();

/// The toy instance with both the objective and the constraint map negated
/// (f = -x^3/2, G = +x^2 E_33). Same stationary point and multiplier set, but
/// L''_xx(0, diag(0,-1,-2)) = -4, so the second-order certificates fail.
ProblemInstance negated_toy_problem();

/// Hadamard-product instance on S^n: min (1/2)<X, Q o X> s.t. X in S^n_+,
/// B o X = 0, with q on the leading diagonal block of Q, Q_nn = -1, and B
/// supported on the last row/column. Encoded on packed coordinates with the
/// 2n-1 scalar equality equations enumerating the last column then the last
/// row of B o X. Requires n >= 2 and q >= n-1.
ProblemInstance hadamard_problem(int n, double q);

/// grad f(x) + G'(x)*Y + h'(x)*z.
Eigen::VectorXd lagrangian_grad(const ProblemInstance& p, const KktPoint& pt);

/// ||L'_x(x,Y,z)|| + ||G(x) - Pi_{S+}(G(x)+Y)||_F + ||h(x)|| (last term only
/// when the instance has equality constraints).
double kkt_residual(const ProblemInstance& p, const KktPoint& pt);

}  // namespace nlsdp
