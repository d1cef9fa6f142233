#include "nlsdp/problem.hpp"

#include <cmath>
#include <utility>

#include "nlsdp/errors.hpp"

namespace nlsdp {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

Eigen::VectorXd empty_vec() { return Eigen::VectorXd(0); }

void check_point(const ProblemInstance& p, const KktPoint& pt) {
  if (pt.x.size() != p.dim_x) throw InvalidInput(p.name + ": x dimension mismatch");
  if (pt.Y.dim() != p.n_sdp) throw InvalidInput(p.name + ": Y dimension mismatch");
  if (pt.z.size() != p.m_eq) throw InvalidInput(p.name + ": z dimension mismatch");
}

ProblemInstance make_toy(double sign) {
  ProblemInstance p;
  p.dim_x = 1;
  p.n_sdp = 3;
  p.m_eq = 0;
  p.name = sign > 0 ? "toy" : "toy_negated";
  p.multiplier_distance_is_surrogate = false;

  p.f = [sign](const Eigen::VectorXd& x) { return sign * 0.5 * x[0] * x[0] * x[0]; };
  p.grad_f = [sign](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(1);
    g[0] = sign * 1.5 * x[0] * x[0];
    return g;
  };
  p.G = [sign](const Eigen::VectorXd& x) {
    SymMatrix g(3);
    g.set(2, 2, -sign * x[0] * x[0]);
    return g;
  };
  p.apply_Gp = [sign](const Eigen::VectorXd& x, const Eigen::VectorXd& d) {
    SymMatrix g(3);
    g.set(2, 2, -sign * 2.0 * x[0] * d[0]);
    return g;
  };
  p.apply_Gp_adjoint = [sign](const Eigen::VectorXd& x, const SymMatrix& s) {
    Eigen::VectorXd v(1);
    v[0] = -sign * 2.0 * x[0] * s(2, 2);
    return v;
  };
  p.apply_hess_lagrangian = [sign](const Eigen::VectorXd& x, const SymMatrix& y,
                                   const Eigen::VectorXd&, const Eigen::VectorXd& d) {
    Eigen::VectorXd v(1);
    v[0] = (sign * 3.0 * x[0] - sign * 2.0 * y(2, 2)) * d[0];
    return v;
  };
  p.h = [](const Eigen::VectorXd&) { return empty_vec(); };
  p.apply_hp = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return empty_vec(); };
  p.apply_hp_adjoint = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return empty_vec(); };

  // M(0) is the whole NSD cone, so the distance is the norm of the PSD part.
  p.multiplier_distance_oracle = [](const SymMatrix& y, const Eigen::VectorXd&) {
    return proj_cone(y, ConeSign::plus).norm();
  };
  p.builtin_stationary = []() {
    KktPoint pt{Eigen::VectorXd::Zero(1), SymMatrix(3), empty_vec()};
    pt.Y.set(1, 1, -1.0);
    pt.Y.set(2, 2, -2.0);
    return pt;
  };
  return p;
}

}  // namespace

ProblemInstance toy_problem() { return make_toy(1.0); }

ProblemInstance negated_toy_problem() { return make_toy(-1.0); }

ProblemInstance hadamard_problem(int n, double q) {
  if (n < 2) throw InvalidInput("hadamard_problem: n must be >= 2");
  if (q < static_cast<double>(n - 1)) throw InvalidInput("hadamard_problem: q must be >= n-1");

  Eigen::MatrixXd qmat = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j + 1 < n; ++j) qmat(i, j) = (i == j) ? q : 1.0;
  qmat(n - 1, n - 1) = -1.0;

  // Equality equations: entries (i, n-1) for i = 0..n-1, then (n-1, j) for
  // j = 0..n-2; exactly the support of B.
  const int m_eq = 2 * n - 1;
  std::vector<std::pair<int, int>> eq(m_eq);
  for (int i = 0; i < n; ++i) eq[i] = {i, n - 1};
  for (int j = 0; j + 1 < n; ++j) eq[n + j] = {n - 1, j};

  ProblemInstance p;
  p.dim_x = packed_size(n);
  p.n_sdp = n;
  p.m_eq = m_eq;
  p.name = "hadamard";
  p.multiplier_distance_is_surrogate = true;

  p.f = [qmat](const Eigen::VectorXd& u) {
    const SymMatrix x = SymMatrix::from_packed(u);
    return 0.5 * x.mat().cwiseProduct(qmat.cwiseProduct(x.mat())).sum();
  };
  p.grad_f = [qmat](const Eigen::VectorXd& u) {
    const SymMatrix x = SymMatrix::from_packed(u);
    return SymMatrix::from_matrix(qmat.cwiseProduct(x.mat())).packed();
  };
  p.G = [](const Eigen::VectorXd& u) { return SymMatrix::from_packed(u); };
  p.apply_Gp = [](const Eigen::VectorXd&, const Eigen::VectorXd& d) {
    return SymMatrix::from_packed(d);
  };
  p.apply_Gp_adjoint = [](const Eigen::VectorXd&, const SymMatrix& s) { return s.packed(); };
  p.apply_hess_lagrangian = [qmat](const Eigen::VectorXd&, const SymMatrix&,
                                   const Eigen::VectorXd&, const Eigen::VectorXd& d) {
    const SymMatrix dm = SymMatrix::from_packed(d);
    return SymMatrix::from_matrix(qmat.cwiseProduct(dm.mat())).packed();
  };
  p.h = [eq, m_eq](const Eigen::VectorXd& u) {
    const SymMatrix x = SymMatrix::from_packed(u);
    Eigen::VectorXd v(m_eq);
    for (int k = 0; k < m_eq; ++k) v[k] = x(eq[k].first, eq[k].second);
    return v;
  };
  p.apply_hp = [eq, m_eq](const Eigen::VectorXd&, const Eigen::VectorXd& d) {
    Eigen::VectorXd v(m_eq);
    for (int k = 0; k < m_eq; ++k) {
      const auto [i, j] = eq[k];
      const int idx = packed_index(std::min(i, j), std::max(i, j));
      v[k] = (i == j) ? d[idx] : d[idx] / kSqrt2;
    }
    return v;
  };
  p.apply_hp_adjoint = [eq, m_eq](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
    for (int k = 0; k < m_eq; ++k) {
      const auto [i, j] = eq[k];
      const int idx = packed_index(std::min(i, j), std::max(i, j));
      out[idx] += (i == j) ? v[k] : v[k] / kSqrt2;
    }
    return out;
  };

  // Surrogate ||Y + B o Z|| + ||Pi_+(Y)||, not a true distance; the
  // symmetric Z is reassembled from the scalar multipliers.
  p.multiplier_distance_oracle = [n, m_eq](const SymMatrix& y, const Eigen::VectorXd& z) {
    if (z.size() != m_eq) throw InvalidInput("hadamard multiplier_distance: z dimension mismatch");
    Eigen::MatrixXd bz = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
      const double v = 0.5 * (z[i] + z[n + i]);
      bz(i, n - 1) = v;
      bz(n - 1, i) = v;
    }
    bz(n - 1, n - 1) = z[n - 1];
    return (y.mat() + bz).norm() + proj_cone(y, ConeSign::plus).norm();
  };
  p.builtin_stationary = [n, m_eq]() {
    KktPoint pt{Eigen::VectorXd::Zero(packed_size(n)), SymMatrix(n),
                Eigen::VectorXd::Zero(m_eq)};
    pt.Y.set(n - 1, n - 1, -1.0);
    pt.z[n - 1] = 1.0;  // multiplier of the (n,n) equation
    return pt;
  };
  return p;
}

Eigen::VectorXd lagrangian_grad(const ProblemInstance& p, const KktPoint& pt) {
  check_point(p, pt);
  Eigen::VectorXd g = p.grad_f(pt.x) + p.apply_Gp_adjoint(pt.x, pt.Y);
  if (p.m_eq > 0) g += p.apply_hp_adjoint(pt.x, pt.z);
  return g;
}

double kkt_residual(const ProblemInstance& p, const KktPoint& pt) {
  check_point(p, pt);
  const SymMatrix g = p.G(pt.x);
  const SymMatrix shifted = g + pt.Y;
  double r = lagrangian_grad(p, pt).norm() + (g - proj_cone(shifted, ConeSign::plus)).norm();
  if (p.m_eq > 0) r += p.h(pt.x).norm();
  return r;
}

}  // namespace nlsdp
