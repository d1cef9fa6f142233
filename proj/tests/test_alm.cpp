#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlsdp/alm.hpp"
#include "nlsdp/errors.hpp"
#include "nlsdp/io.hpp"
#include "test_util.hpp"

using namespace nlsdp;
using namespace nlsdp::testing;

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

/// Starting multiplier with a guaranteed PSD part, used by the fixed-penalty
/// dual-rate experiments.
SymMatrix perturbed_infeasible_y(const ProblemInstance& p, double bump) {
  Rng rng(97);
  SymMatrix y = p.builtin_stationary().Y +
                SymMatrix::from_matrix(0.05 * rng.symmetric_normal(p.n_sdp));
  y.set(0, 0, y(0, 0) + bump);
  return y;
}

}  // namespace

TEST_CASE("multiplier update formulas") {
  // feasible case: G(x)+Y/rho PSD makes the update a pure shrink of Y
  const ProblemInstance p = hadamard_problem(3, 2.0);
  const Eigen::VectorXd x = SymMatrix::identity(3).scaled(5.0).packed();
  const SymMatrix y = SymMatrix::identity(3).scaled(-1.0);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(p.m_eq);
  {
    const PenaltyParams pen{2.0, 0.5};  // rho_tilde = 1.5
    const auto [y_new, z_new] = update_multipliers(p, x, y, z, pen);
    CHECK((y_new - y.scaled(1.0 - 1.5 / 2.0)).norm() <= 1e-12);
  }
  {
    const PenaltyParams pen{2.0, 0.0};
    const auto [y_new, z_new] = update_multipliers(p, x, y, z, pen);
    CHECK(y_new.norm() <= 1e-12);  // rho_tilde = rho wipes the multiplier
  }

  // toy with Y = 0, x_new = 1, rho = rho_tilde = 2
  const ProblemInstance pt = toy_problem();
  const auto [y2, z2] =
      update_multipliers(pt, scalar(1.0), SymMatrix(3), Eigen::VectorXd(0), {2.0, 0.0});
  CHECK(y2(2, 2) == doctest::Approx(-2.0));
  CHECK((y2 - SymMatrix::diagonal(Eigen::Vector3d(0, 0, -2))).norm() <= 1e-14);
}

TEST_CASE("traditional update lands in the NSD cone") {
  Rng rng(3);
  const ProblemInstance p = hadamard_problem(4, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd x = rng.normal_vector(p.dim_x);
    const SymMatrix y = random_sym(rng, 4, 2.0);
    const Eigen::VectorXd z = rng.normal_vector(p.m_eq);
    const auto [y_new, z_new] = update_multipliers(p, x, y, z, {5.0, 0.0});
    CHECK(proj_cone(y_new, ConeSign::plus).norm() <= 1e-10 * (1.0 + y_new.norm()));
  }
}

TEST_CASE("inner criterion arithmetic") {
  AlmConfig cfg;
  cfg.eps_prime0 = 0.01;
  CHECK(cfg.eps_prime(0) == doctest::Approx(0.01));
  CHECK(cfg.eps_prime(1) == doctest::Approx(0.01 / 1.05));

  const PenaltyParams pen{9.5, 0.5};  // rho_tilde = 9
  for (StopCriterion c : {StopCriterion::a, StopCriterion::b, StopCriterion::c}) {
    cfg.criterion = c;
    CHECK(check_inner_criterion(0.0, 0.4, pen, 0, cfg));  // zero gradient always passes
  }

  cfg.criterion = StopCriterion::b;
  CHECK_FALSE(check_inner_criterion(1e-300, 0.0, pen, 0, cfg));  // dual zero needs exact zero

  // sqrt(9)*0.003 = 0.009 <= 0.01 and rho_tilde*dual = 9*(2/9) = 2
  cfg.criterion = StopCriterion::a;
  CHECK(check_inner_criterion(0.003, 2.0 / 9.0, pen, 0, cfg));
  cfg.criterion = StopCriterion::b;
  CHECK(check_inner_criterion(0.003, 2.0 / 9.0, pen, 0, cfg));
  cfg.criterion = StopCriterion::c;
  CHECK(check_inner_criterion(0.003, 2.0 / 9.0, pen, 0, cfg));

  // min-term below one bites in (b); squared bites harder in (c)
  cfg.criterion = StopCriterion::b;
  CHECK(check_inner_criterion(0.003, 0.1, pen, 0, cfg) == (0.009 <= 0.01 * 0.9));
  cfg.criterion = StopCriterion::c;
  CHECK_FALSE(check_inner_criterion(0.003, 0.1, pen, 0, cfg));  // 0.009 > 0.01*0.81

  CHECK_THROWS_AS(check_inner_criterion(-1.0, 0.0, pen, 0, cfg), InvalidInput);
}

TEST_CASE("penalty schedule") {
  AlmConfig cfg;
  cfg.rho_update = RhoUpdate::fixed;
  CHECK(penalty_update(10.0, cfg) == 10.0);
  cfg.rho_update = RhoUpdate::geometric;
  cfg.rho_factor = 1.25;
  cfg.rho_max = 1e8;
  CHECK(penalty_update(10.0, cfg) == doctest::Approx(12.5));
  cfg.rho_factor = 2.0;
  CHECK(penalty_update(1e8, cfg) == doctest::Approx(1e8));  // cap binds
}

TEST_CASE("alm config validation") {
  AlmConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.rho0 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.rho_max = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.eps_prime_decay = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

TEST_CASE("fixed-penalty toy run contracts the dual distance at rho_bar/rho") {
  const ProblemInstance p = toy_problem();
  const KktPoint st = p.builtin_stationary();
  AlmConfig cfg;
  cfg.rho0 = 10.0;
  cfg.rho_bar = 0.5;
  cfg.rho_update = RhoUpdate::fixed;
  cfg.criterion = StopCriterion::a;
  cfg.eps_prime0 = 1e-9;
  cfg.kkt_tol = 0.0;
  cfg.max_outer = 12;
  cfg.keep_infeasible_y0 = true;
  NewtonConfig ncfg;
  ncfg.grad_tol = 1e-12;

  const SymMatrix y0 = perturbed_infeasible_y(p, 0.3);
  const AlmResult res = run_alm(p, scalar(0.4), y0, Eigen::VectorXd(0), cfg, ncfg);
  CHECK(res.trace.y0_infeasible);
  CHECK_FALSE(res.trace.y0_projected);
  REQUIRE(res.trace.rows.size() == 12);

  const double expected = cfg.rho_bar / cfg.rho0;
  int checked = 0;
  for (std::size_t k = 0; k + 1 < res.trace.rows.size(); ++k) {
    const double d0 = *res.trace.rows[k].dist_mult;
    const double d1 = *res.trace.rows[k + 1].dist_mult;
    if (d0 < 1e-12) break;
    const double ratio = d1 / d0;
    CHECK(ratio <= 0.95);
    CHECK(ratio == doctest::Approx(expected).epsilon(0.5));
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("hadamard n=3 converges in the Table-1 ballpark") {
  const ProblemInstance p = hadamard_problem(3, 2.0);
  const StartPoint s = make_start(p, 0, 0.1);
  AlmConfig cfg;
  cfg.criterion = StopCriterion::b;
  cfg.kkt_tol = 1e-5;
  const AlmResult res = run_alm(p, s.x, s.Y, s.z, cfg, {});
  CHECK(res.converged());
  CHECK(res.final_kkt_residual <= 1e-5);
  CHECK(res.outer_iterations >= 2);
  CHECK(res.outer_iterations <= 20);
  CHECK(res.trace.rows.size() == static_cast<std::size_t>(res.outer_iterations));
  for (std::size_t k = 0; k < res.trace.rows.size(); ++k)
    CHECK(res.trace.rows[k].k == static_cast<int>(k));
}

TEST_CASE("starting at the stationary point terminates immediately") {
  const ProblemInstance p = hadamard_problem(3, 2.0);
  const KktPoint st = p.builtin_stationary();
  const AlmResult res = run_alm(p, st.x, st.Y, st.z, {}, {});
  CHECK(res.converged());
  CHECK(res.outer_iterations == 0);
  CHECK(res.trace.rows.empty());
  CHECK(res.final_kkt_residual <= 1e-14);
}

TEST_CASE("infeasible Y0 is projected by default and kept on request") {
  const ProblemInstance p = toy_problem();
  SymMatrix y0(3);
  y0.set(0, 0, 1.0);  // PSD part
  y0.set(2, 2, -1.0);

  AlmConfig cfg;
  cfg.max_outer = 1;
  cfg.kkt_tol = 0.0;
  AlmResult res = run_alm(p, scalar(0.1), y0, Eigen::VectorXd(0), cfg, {});
  CHECK(res.trace.y0_infeasible);
  CHECK(res.trace.y0_projected);

  cfg.keep_infeasible_y0 = true;
  res = run_alm(p, scalar(0.1), y0, Eigen::VectorXd(0), cfg, {});
  CHECK(res.trace.y0_infeasible);
  CHECK_FALSE(res.trace.y0_projected);

  res = run_alm(p, scalar(0.1), p.builtin_stationary().Y, Eigen::VectorXd(0), cfg, {});
  CHECK_FALSE(res.trace.y0_infeasible);
}

TEST_CASE("dual iterates stay NSD under the traditional update") {
  const ProblemInstance p = toy_problem();
  AlmConfig cfg;
  cfg.rho0 = 10.0;
  cfg.rho_update = RhoUpdate::fixed;
  cfg.keep_infeasible_y0 = true;
  cfg.kkt_tol = 0.0;
  cfg.max_outer = 3;
  const AlmResult res =
      run_alm(p, scalar(0.4), perturbed_infeasible_y(p, 0.3), Eigen::VectorXd(0), cfg, {});
  // rho_tilde = rho, so every updated multiplier lies in S^n_-
  CHECK(proj_cone(res.point.Y, ConeSign::plus).norm() <= 1e-10);
}

TEST_CASE("criterion c with the gradient supplement still converges") {
  const ProblemInstance p = hadamard_problem(3, 2.0);
  const StartPoint s = make_start(p, 1, 0.1);
  AlmConfig cfg;
  cfg.criterion = StopCriterion::c;
  cfg.supplement_c = 5.0;
  cfg.kkt_tol = 1e-5;
  const AlmResult res = run_alm(p, s.x, s.Y, s.z, cfg, {});
  CHECK(res.converged());
  CHECK(res.final_kkt_residual <= 1e-5);
}

TEST_CASE("reruns with identical inputs give identical traces") {
  const ProblemInstance p = hadamard_problem(3, 2.0);
  const StartPoint s = make_start(p, 2, 0.1);
  AlmConfig cfg;
  cfg.kkt_tol = 1e-6;
  const AlmResult r1 = run_alm(p, s.x, s.Y, s.z, cfg, {});
  const AlmResult r2 = run_alm(p, s.x, s.Y, s.z, cfg, {});
  REQUIRE(r1.trace.rows.size() == r2.trace.rows.size());
  for (std::size_t k = 0; k < r1.trace.rows.size(); ++k) {
    const TraceRow &a = r1.trace.rows[k], &b = r2.trace.rows[k];
    CHECK(a.rho == b.rho);
    CHECK(a.inner_iters == b.inner_iters);
    CHECK(a.cg_iters == b.cg_iters);
    CHECK(a.alm_value == b.alm_value);
    CHECK(a.grad_norm == b.grad_norm);
    CHECK(a.kkt_residual == b.kkt_residual);
    CHECK(*a.dist_mult == *b.dist_mult);
    CHECK(a.dY_norm == b.dY_norm);
  }
}

TEST_CASE("line search failure surfaces with the partial trace") {
  const ProblemInstance p = flat_valley_instance();
  NewtonConfig ncfg;
  ncfg.max_backtracks = 10;
  AlmConfig cfg;
  cfg.rho0 = 1.0;
  cfg.kkt_tol = 1e-12;
  const AlmResult res = run_alm(p, scalar(100.0), SymMatrix(2), Eigen::VectorXd(0), cfg, ncfg);
  CHECK(res.status == AlmStatus::line_search_failure);
  CHECK_FALSE(res.converged());
}

TEST_CASE("run_alm rejects mismatched shapes") {
  const ProblemInstance p = toy_problem();
  CHECK_THROWS_AS(run_alm(p, Eigen::VectorXd::Zero(2), SymMatrix(3), Eigen::VectorXd(0), {}, {}),
                  InvalidInput);
  CHECK_THROWS_AS(run_alm(p, scalar(0.0), SymMatrix(2), Eigen::VectorXd(0), {}, {}),
                  InvalidInput);
}
