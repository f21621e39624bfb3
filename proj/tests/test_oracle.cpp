#include <cmath>
#include <complex>

#include "doctest.h"
#include "irsopt/errors.hpp"
#include "irsopt/oracle.hpp"
#include "irsopt/power_alloc.hpp"
#include "irsopt/precoder_admm.hpp"
#include "irsopt/rng.hpp"

using namespace irsopt;
using cd = std::complex<double>;

TEST_CASE("finite_diff_gradient on known functions") {
  const auto quadratic = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  Eigen::VectorXd point(2);
  point << 1.0, 2.0;
  const Eigen::VectorXd grad = finite_diff_gradient(quadratic, point, 1e-5);
  CHECK(std::abs(grad(0) - 2.0) <= 1e-8);
  CHECK(std::abs(grad(1) - 4.0) <= 1e-8);

  const auto constant = [](const Eigen::VectorXd&) { return 3.5; };
  CHECK(finite_diff_gradient(constant, point, 1e-5).norm() == 0.0);

  const auto bad = [](const Eigen::VectorXd& x) {
    return x(0) > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  };
  CHECK_THROWS_AS(finite_diff_gradient(bad, point, 1e-3), std::domain_error);
  CHECK_THROWS_AS(finite_diff_gradient(quadratic, point, 0.0), std::invalid_argument);
}

TEST_CASE("grid_power_search saturates monotone single-user instances") {
  Eigen::VectorXcd g(1);
  g << cd(0.5, 0.0);  // 1/G^2 = 4 > budget, so the MSE is decreasing across the grid
  Eigen::VectorXd q(1);
  q << 1.0;
  Eigen::VectorXcd f(1);
  f << cd(1.0, 0.0);
  const auto best = grid_power_search(g, q, f, 1.0, 0.0, 0.2, 100);
  CHECK(best.p(0) == doctest::Approx(1.0));
}

TEST_CASE("grid_power_search refuses large user counts") {
  Eigen::VectorXcd g = Eigen::VectorXcd::Ones(4);
  Eigen::VectorXd q = Eigen::VectorXd::Ones(4);
  Eigen::VectorXcd f = Eigen::VectorXcd::Ones(1);
  CHECK_THROWS_AS(grid_power_search(g, q, f, 1.0, 0.0, 0.1, 10), std::invalid_argument);
}

TEST_CASE("grid and analytic solver agree on infeasible floors") {
  Eigen::VectorXcd g(2);
  g << cd(-0.2, 0.1), cd(-0.1, 0.0);  // no in-phase gain anywhere
  Eigen::VectorXd q = Eigen::VectorXd::Ones(2);
  Eigen::VectorXcd f = Eigen::VectorXcd::Ones(1);
  CHECK_THROWS_AS(grid_power_search(g, q, f, 1.0, 0.2, 0.5, 50), InfeasibleError);
  CHECK_THROWS_AS(solve_power(g, q, f, 1.0, 0.2, 0.5), InfeasibleError);
}

TEST_CASE("exhaustive_phase_search matches the 1-D analytic alignment") {
  Rng rng(101);
  for (int t = 0; t < 5; ++t) {
    const Eigen::MatrixXcd h = Eigen::MatrixXcd::NullaryExpr(
        1, 1, [&](Eigen::Index, Eigen::Index) { return rng.complex_gaussian(1.0); });
    const Eigen::MatrixXcd H = Eigen::MatrixXcd::NullaryExpr(
        1, 2, [&](Eigen::Index, Eigen::Index) { return rng.complex_gaussian(1.0); });
    Eigen::VectorXcd f(2);
    f << rng.complex_gaussian(1.0), rng.complex_gaussian(1.0);
    Eigen::VectorXd q(1), p(1);
    q << 1.0;
    p << 0.3;
    const auto best = exhaustive_phase_search(h, H, f, q, p, 360);
    const cd u = h(0, 0) * (H * f)(0);
    const double analytic = -std::arg(u);
    double diff = std::remainder(best.phases(0) - analytic, 2.0 * M_PI);
    CHECK(std::abs(diff) <= 2.0 * M_PI / 360.0);
  }
}

TEST_CASE("exhaustive_phase_search accepts flat objectives and refuses blowups") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Ones(1, 2);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Ones(2, 2);
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(2);  // F = 0: all phases equal
  Eigen::VectorXd q(1), p(1);
  q << 1.0;
  p << 0.5;
  const auto flat = exhaustive_phase_search(h, H, f, q, p, 4);
  CHECK(flat.phases.size() == 2);
  CHECK(flat.max_modulus_deviation() == 0.0);

  Eigen::MatrixXcd h_big = Eigen::MatrixXcd::Ones(1, 8);
  Eigen::MatrixXcd H_big = Eigen::MatrixXcd::Ones(8, 2);
  CHECK_THROWS_AS(exhaustive_phase_search(h_big, H_big, f, q, p, 100), std::invalid_argument);
}

TEST_CASE("pgd_precoder_reference solves a generous single-user instance") {
  Rng rng(102);
  Eigen::MatrixXcd g(1, 3);
  for (int i = 0; i < 3; ++i) g(0, i) = rng.complex_gaussian(1.0);
  Eigen::VectorXd q(1), p(1);
  q << 1.5;
  p << 0.1;
  // generous budget: the unconstrained optimum c g F = sqrt(q) is reachable
  const Eigen::VectorXcd f = pgd_precoder_reference(g, q, p, 1000.0, 0.0);
  CHECK(precoder_cost(g, q, p, f) <= 1e-8);
}

TEST_CASE("validation suite passes end to end") {
  const auto verdicts = run_validation_suite(20240601);
  REQUIRE(verdicts.size() >= 4);
  for (const auto& v : verdicts) {
    INFO(v.name, " max_rel_error=", v.max_rel_error, " threshold=", v.threshold);
    CHECK(v.passed);
    CHECK(v.passed == (v.max_rel_error <= v.threshold));
  }
}
