#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlsdp/errors.hpp"
#include "nlsdp/problem.hpp"
#include "test_util.hpp"

using namespace nlsdp;
using namespace nlsdp::testing;

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

/// Direct dense evaluation of (1/2)<X, Q o X> with Q rebuilt from its
/// description: leading block q on the diagonal and 1 off it, last row and
/// column zero except Q_nn = -1.
double hadamard_objective_oracle(int n, double q, const SymMatrix& x) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double qij = 0.0;
      if (i < n - 1 && j < n - 1) qij = (i == j) ? q : 1.0;
      if (i == n - 1 && j == n - 1) qij = -1.0;
      acc += qij * x(i, j) * x(i, j);
    }
  return 0.5 * acc;
}

std::vector<const char*> kProblemNames = {"toy", "toy_negated", "hadamard"};

ProblemInstance make_by_name(const char* name) {
  if (std::string(name) == "toy") return toy_problem();
  if (std::string(name) == "toy_negated") return negated_toy_problem();
  return hadamard_problem(3, 2.0);
}

KktPoint random_point(Rng& rng, const ProblemInstance& p) {
  KktPoint pt;
  pt.x = rng.normal_vector(p.dim_x);
  pt.Y = random_sym(rng, p.n_sdp);
  pt.z = rng.normal_vector(p.m_eq);
  return pt;
}

}  // namespace

TEST_CASE("toy problem formulas") {
  const ProblemInstance p = toy_problem();
  CHECK(p.dim_x == 1);
  CHECK(p.n_sdp == 3);
  CHECK(p.m_eq == 0);
  CHECK(p.f(scalar(2.0)) == doctest::Approx(4.0));
  const SymMatrix g = p.G(scalar(2.0));
  CHECK(g(2, 2) == doctest::Approx(-4.0));
  CHECK(g.norm() == doctest::Approx(4.0));

  const KktPoint st = p.builtin_stationary();
  CHECK(st.Y(1, 1) == doctest::Approx(-1.0));
  CHECK(st.Y(2, 2) == doctest::Approx(-2.0));
  // L''_xx at the stationary pair is 4
  CHECK(p.apply_hess_lagrangian(st.x, st.Y, st.z, scalar(1.0))[0] == doctest::Approx(4.0));

  SymMatrix y(3);
  y.set(0, 0, 1.0);
  y.set(1, 1, -1.0);
  CHECK(p.multiplier_distance_oracle(y, Eigen::VectorXd(0)) == doctest::Approx(1.0));
}

TEST_CASE("negated toy flips the second-order behavior") {
  const ProblemInstance p = negated_toy_problem();
  const KktPoint st = p.builtin_stationary();
  CHECK(kkt_residual(p, st) <= 1e-14);
  CHECK(p.apply_hess_lagrangian(st.x, st.Y, st.z, scalar(1.0))[0] == doctest::Approx(-4.0));
}

TEST_CASE("hadamard instance at its stationary point") {
  const ProblemInstance p = hadamard_problem(3, 2.0);
  CHECK(p.dim_x == 6);
  CHECK(p.m_eq == 5);
  const KktPoint st = p.builtin_stationary();
  CHECK(kkt_residual(p, st) <= 1e-14);
  CHECK(p.multiplier_distance_oracle(st.Y, st.z) <= 1e-14);
}

TEST_CASE("hadamard objective against the dense oracle") {
  const int n = 3;
  const double q = 2.0;
  const ProblemInstance p = hadamard_problem(n, q);
  CHECK(p.f(SymMatrix::identity(n).packed()) == doctest::Approx(1.5));

  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix x = random_sym(rng, n);
    CHECK(p.f(x.packed()) ==
          doctest::Approx(hadamard_objective_oracle(n, q, x)).epsilon(1e-12));
  }
}

TEST_CASE("hadamard preconditions") {
  CHECK_THROWS_AS(hadamard_problem(3, 1.0), InvalidInput);  // q < n-1
  CHECK_THROWS_AS(hadamard_problem(1, 5.0), InvalidInput);
  CHECK_NOTHROW(hadamard_problem(2, 1.0));
}

TEST_CASE("finite-difference consistency of all derivatives") {
  Rng rng(19);
  for (const char* name : kProblemNames) {
    const ProblemInstance p = make_by_name(name);
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::VectorXd x = rng.normal_vector(p.dim_x);
      const Eigen::VectorXd d = rng.normal_vector(p.dim_x);
      const SymMatrix y = random_sym(rng, p.n_sdp);
      const Eigen::VectorXd z = rng.normal_vector(p.m_eq);

      const Eigen::VectorXd g = p.grad_f(x);
      const Eigen::VectorXd g_fd = fd_gradient(p.f, x);
      CHECK((g - g_fd).norm() <= 1e-6 * (1.0 + g.norm()));

      // directional derivative of G against its operator form
      const SymMatrix gp = p.apply_Gp(x, d);
      const SymMatrix gp_fd = SymMatrix::from_matrix(
          (p.G(x + 1e-5 * d).mat() - p.G(x - 1e-5 * d).mat()) / 2e-5);
      CHECK((gp - gp_fd).norm() <= 1e-6 * (1.0 + gp.norm()));

      const auto lagr = [&](const Eigen::VectorXd& xx) {
        return lagrangian_grad(p, {xx, y, z});
      };
      const Eigen::VectorXd hd = p.apply_hess_lagrangian(x, y, z, d);
      CHECK((hd - fd_directional(lagr, x, d)).norm() <= 1e-6 * (1.0 + hd.norm()));

      if (p.m_eq > 0) {
        const Eigen::VectorXd hp = p.apply_hp(x, d);
        const Eigen::VectorXd hp_fd = (p.h(x + 1e-5 * d) - p.h(x - 1e-5 * d)) / 2e-5;
        CHECK((hp - hp_fd).norm() <= 1e-6 * (1.0 + hp.norm()));
      }
    }
  }
}

TEST_CASE("adjoint identities") {
  Rng rng(29);
  for (const char* name : kProblemNames) {
    const ProblemInstance p = make_by_name(name);
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::VectorXd x = rng.normal_vector(p.dim_x);
      const Eigen::VectorXd d = rng.normal_vector(p.dim_x);
      const SymMatrix s = random_sym(rng, p.n_sdp);
      const double lhs = p.apply_Gp(x, d).inner(s);
      const double rhs = d.dot(p.apply_Gp_adjoint(x, s));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0 + std::abs(lhs)));
      if (p.m_eq > 0) {
        const Eigen::VectorXd v = rng.normal_vector(p.m_eq);
        const double lh = p.apply_hp(x, d).dot(v);
        const double rh = d.dot(p.apply_hp_adjoint(x, v));
        CHECK(lh == doctest::Approx(rh).epsilon(1e-10).scale(1.0 + std::abs(lh)));
      }
    }
  }
}

TEST_CASE("lagrangian hessian is a symmetric bilinear form") {
  Rng rng(37);
  for (const char* name : kProblemNames) {
    const ProblemInstance p = make_by_name(name);
    const KktPoint pt = random_point(rng, p);
    for (int rep = 0; rep < 10; ++rep) {
      const Eigen::VectorXd d1 = rng.normal_vector(p.dim_x);
      const Eigen::VectorXd d2 = rng.normal_vector(p.dim_x);
      const double a = d1.dot(p.apply_hess_lagrangian(pt.x, pt.Y, pt.z, d2));
      const double b = d2.dot(p.apply_hess_lagrangian(pt.x, pt.Y, pt.z, d1));
      CHECK(a == doctest::Approx(b).epsilon(1e-10).scale(1.0 + std::abs(a)));
    }
  }
}

TEST_CASE("lagrangian_grad worked values") {
  const ProblemInstance p = toy_problem();
  const KktPoint st = p.builtin_stationary();
  CHECK(lagrangian_grad(p, st).norm() <= 1e-15);
  CHECK(lagrangian_grad(p, {scalar(1.0), SymMatrix(3), Eigen::VectorXd(0)})[0] ==
        doctest::Approx(1.5));

  const ProblemInstance ph = hadamard_problem(3, 2.0);
  CHECK(lagrangian_grad(ph, ph.builtin_stationary()).norm() <= 1e-15);
}

TEST_CASE("kkt_residual worked values and two-sided zero test") {
  const ProblemInstance p = toy_problem();
  CHECK(kkt_residual(p, p.builtin_stationary()) == 0.0);

  // hand evaluation at (1, 0): |f'(1)| = 3/2 and ||G - Pi_+(G)|| = 1
  const KktPoint pt{scalar(1.0), SymMatrix(3), Eigen::VectorXd(0)};
  CHECK(kkt_residual(p, pt) == doctest::Approx(2.5).epsilon(1e-12));

  // nonzero whenever the point is moved off the KKT set
  Rng rng(43);
  for (const char* name : kProblemNames) {
    const ProblemInstance pr = make_by_name(name);
    KktPoint st = pr.builtin_stationary();
    CHECK(kkt_residual(pr, st) <= 1e-14);
    st.x += 0.1 * rng.normal_vector(pr.dim_x);
    CHECK(kkt_residual(pr, st) > 1e-6);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const ProblemInstance p = toy_problem();
  KktPoint bad{Eigen::VectorXd::Zero(2), SymMatrix(3), Eigen::VectorXd(0)};
  CHECK_THROWS_AS(kkt_residual(p, bad), InvalidInput);
  KktPoint bad_y{Eigen::VectorXd::Zero(1), SymMatrix(2), Eigen::VectorXd(0)};
  CHECK_THROWS_AS(lagrangian_grad(p, bad_y), InvalidInput);
}
