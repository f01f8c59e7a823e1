#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "invscheme/baselines.hpp"
#include "invscheme/rk45.hpp"

using namespace invscheme;
using doctest::Approx;

namespace {

// Derivative of order k at 0 of the Lagrange interpolant through the four
// nodes -3h/2, -h/2, h/2, 3h/2: the independent reference for the stencils.
double lagrange_derivative(const std::array<double, 4>& ys, double h, int k) {
  const std::array<double, 4> xs{-1.5 * h, -0.5 * h, 0.5 * h, 1.5 * h};
  // Solve the Vandermonde system for the monomial coefficients.
  double m[4][5];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m[i][j] = std::pow(xs[i], j);
    m[i][4] = ys[i];
  }
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    for (int j = 0; j < 5; ++j) std::swap(m[c][j], m[piv][j]);
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int j = c; j < 5; ++j) m[r][j] -= f * m[c][j];
    }
  }
  const double coef = m[k][4] / m[k][k];
  return coef * std::tgamma(k + 1.0);
}

std::array<double, 4> sample(double (*f)(double), double h) {
  return {f(-1.5 * h), f(-0.5 * h), f(0.5 * h), f(1.5 * h)};
}

}  // namespace

TEST_CASE("stencil examples") {
  const double h = 0.1;
  auto lin = [](double x) { return 2.0 + x; };
  const std::array<double, 4> line{lin(-1.5 * h), lin(-0.5 * h), lin(0.5 * h), lin(1.5 * h)};
  CHECK(stencil_d1_4pt(line, h) == Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(stencil_d2_4pt(line, h)) < 1e-12);
  const std::array<double, 4> flat{3, 3, 3, 3};
  CHECK(stencil_d1_4pt(flat, h) == 0.0);
  CHECK(stencil_d2_4pt(flat, h) == 0.0);
  CHECK(stencil_d3_4pt(flat, h) == 0.0);
  CHECK(stencil_d2_4pt(sample([](double x) { return x * x; }, h), h) == Approx(2.0).epsilon(1e-13));
  CHECK(stencil_d3_4pt(sample([](double x) { return x * x * x; }, h), h) ==
        Approx(6.0).epsilon(1e-12));
  CHECK(std::abs(stencil_d3_4pt(sample([](double x) { return 1.0 - x + x * x; }, h), h)) < 1e-9);
}

TEST_CASE("stencil truncation on the first inexact monomial") {
  for (double h : {0.1, 0.05}) {
    // x^5 for d1 and x^4 for d2; d3 is exact on x^4 by symmetry.
    CHECK(stencil_d1_4pt(sample([](double x) { return std::pow(x, 5); }, h), h) ==
          Approx(-0.5625 * std::pow(h, 4)).epsilon(1e-10));
    CHECK(stencil_d2_4pt(sample([](double x) { return std::pow(x, 4); }, h), h) ==
          Approx(5.0 * h * h).epsilon(1e-10));
    CHECK(std::abs(stencil_d3_4pt(sample([](double x) { return std::pow(x, 4); }, h), h)) < 1e-9);
  }
  const double h = 1e-2, xc = 0.4;
  const std::array<double, 4> s{std::sin(xc - 1.5 * h), std::sin(xc - 0.5 * h),
                                std::sin(xc + 0.5 * h), std::sin(xc + 1.5 * h)};
  CHECK(std::abs(stencil_d3_4pt(s, h) + std::cos(xc)) < 5e-4);
}

TEST_CASE("stencils agree with Lagrange interpolation on their exact degrees") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double h : {0.2, 0.01}) {
    for (int trial = 0; trial < 20; ++trial) {
      double c[5];
      for (double& v : c) v = u(rng);
      for (int degree : {3, 4}) {
        std::array<double, 4> ys{};
        const std::array<double, 4> xs{-1.5 * h, -0.5 * h, 0.5 * h, 1.5 * h};
        double exact1 = c[1], exact3 = 6.0 * c[3];
        for (int i = 0; i < 4; ++i)
          for (int k = 0; k <= degree; ++k) ys[i] += c[k] * std::pow(xs[i], k);
        const double scale1 = std::abs(exact1) + 1.0, scale3 = std::abs(exact3) + 1.0;
        // Cancellation limits the relative accuracy to eps / h^k.
        CHECK(std::abs(stencil_d1_4pt(ys, h) - exact1) <= 1e-12 * scale1 / h);
        CHECK(std::abs(stencil_d3_4pt(ys, h) - exact3) <= 1e-12 * scale3 / (h * h * h));
        if (degree == 3) {
          const double exact2 = 2.0 * c[2];
          CHECK(std::abs(stencil_d2_4pt(ys, h) - exact2) <= 1e-12 * (std::abs(exact2) + 1.0) / (h * h));
          CHECK(stencil_d2_4pt(ys, h) ==
                Approx(lagrange_derivative(ys, h, 2)).epsilon(1e-8).scale(1.0));
        }
        if (degree == 3) CHECK(stencil_d1_4pt(ys, h) == Approx(lagrange_derivative(ys, h, 1)).scale(1.0));
      }
    }
  }
}

TEST_CASE("rk45 on y' = y") {
  const FirstOrderSystem sys{1, [](double, const std::vector<double>& s) { return s; }};
  const Rk45Result r = rk45_integrate(sys, 0.0, {1.0}, 1.0);
  REQUIRE(r.finished());
  CHECK(r.last_x() == 1.0);
  CHECK(std::abs(r.last_state()[0] - std::numbers::e) <= 1e-8);

  auto error_at = [&](double tol) {
    Rk45Options o;
    o.relTol = o.absTol = tol;
    return std::abs(rk45_integrate(sys, 0.0, {1.0}, 1.0, o).last_state()[0] - std::numbers::e);
  };
  const double coarse = error_at(1e-6), fine = error_at(1e-10);
  CHECK(coarse > 1e2 * fine);
  CHECK(coarse < 1e-4);

  const Rk45Result back = rk45_integrate(sys, 1.0, {std::numbers::e}, 0.0);
  CHECK(back.last_state()[0] == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("rk45 on the harmonic oscillator keeps the energy") {
  const FirstOrderSystem sys{2, [](double, const std::vector<double>& s) {
                               return std::vector<double>{s[1], -s[0]};
                             }};
  const Rk45Result r = rk45_integrate(sys, 0.0, {1.0, 0.0}, 2.0 * std::numbers::pi);
  REQUIRE(r.finished());
  const auto& s = r.last_state();
  CHECK(std::abs(s[0] * s[0] + s[1] * s[1] - 1.0) <= 1e-6);
  CHECK(s[0] == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("rk45 reports a blow-up instead of throwing") {
  // y' = y^2, y(0) = 1 blows up at x = 1.
  const FirstOrderSystem sys{1, [](double, const std::vector<double>& s) {
                               return std::vector<double>{s[0] * s[0]};
                             }};
  const Rk45Result r = rk45_integrate(sys, 0.0, {1.0}, 2.0);
  REQUIRE(r.error);
  CHECK((r.error->kind() == ErrorKind::SingularityDetected ||
         r.error->kind() == ErrorKind::StepUnderflow));
  CHECK(r.last_x() == Approx(1.0).epsilon(1e-6));
  CHECK(to_trajectory(r).halt == HaltReason::Error);
}

TEST_CASE("rk45 on the Fig. 2 equation halts near x = 1.28") {
  const OdeModel m = ode_rhs_library(Realization::Sl3, Order::Third, {}, named_function("square"));
  const Rk45Result r = rk45_integrate(m.system, 1.0, {1.0, 1.0, 3.0}, 10.0);
  REQUIRE(r.error);
  CHECK(r.last_x() >= 1.23);
  CHECK(r.last_x() <= 1.33);
}

TEST_CASE("solved forms satisfy the residuals") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const ScalarFunction sq = named_function("square");
  for (Realization r : {Realization::Sl3, Realization::Sl4}) {
    CAPTURE(to_string(r));
    int n = 0;
    while (n < 100) {
      double p = u(rng);
      if (r == Realization::Sl4) {
        if (std::abs(p) < 1.05) continue;
      }
      const double x = 0.3 + std::abs(u(rng)), q = u(rng);
      JetPoint j{x, p, q, std::nullopt};
      j.yppp = solve_top_derivative(r, Order::Third, j, {}, sq);
      const double i1 = cont_I1(r, j);
      const double i2 = cont_I2(r, j);
      CHECK(std::abs(expanded_residual(r, j)) <= 1e-9 * (1.0 + std::abs(*j.yppp) * x * x));
      CHECK(i2 == Approx(i1 * i1).epsilon(1e-9));
      // Off the solution both forms are nonzero together.
      JetPoint off = j;
      *off.yppp += 0.1;
      CHECK(std::abs(expanded_residual(r, off)) > 1e-6);
      CHECK(std::abs(cont_I2(r, off) - i1 * i1) > 1e-6);

      for (double C : {-1.5, 0.7}) {
        JetPoint j2{x, p, 0.0, std::nullopt};
        try {
          j2.ypp = solve_top_derivative(r, Order::Second, j2, C, {});
        } catch (const NumericError&) {
          continue;
        }
        CHECK(cont_I1(r, j2) == Approx(C).epsilon(1e-12));
      }
      ++n;
    }
  }
}

TEST_CASE("ode_rhs_library") {
  CHECK_THROWS_AS(ode_rhs_library(Realization::Sl3, Order::Second, std::nullopt), NumericError);
  CHECK_THROWS_AS(ode_rhs_library(Realization::Sl3, Order::Third, std::nullopt), NumericError);

  const OdeModel m2 = ode_rhs_library(Realization::Sl3, Order::Second, 2.0);
  CHECK(m2.system.dimension == 2);
  CHECK(m2.residual2(1.0, 0.0, 0.0) == -2.0);

  // Cleared form for a right-hand side other than the square.
  const OdeModel cube = ode_rhs_library(Realization::Sl3, Order::Third, {}, named_function("cube"));
  JetPoint j{1.2, 0.4, -0.3, std::nullopt};
  j.yppp = solve_top_derivative(Realization::Sl3, Order::Third, j, {}, named_function("cube"));
  CHECK(std::abs(cube.residual3(j.x, j.yp, j.ypp, *j.yppp)) < 1e-12);
  CHECK(std::abs(m2.residual2(1.0, 0.0, 0.0)) > 0.0);

  // At the Fig. 2 start the solved y''' makes the expanded residual vanish.
  const OdeModel m3 = ode_rhs_library(Realization::Sl3, Order::Third, {}, named_function("square"));
  const auto d = m3.system.rhs(1.0, {1.0, 1.0, 3.0});
  CHECK(std::abs(m3.residual3(1.0, 1.0, 3.0, d[2])) < 1e-12);
}

TEST_CASE("standard FD reproduces a line") {
  const Residual2 flat = [](double, double, double ypp) { return ypp; };
  const UniformMesh mesh{0.0, 0.1};
  const std::array<double, 2> w{1.0, 1.3};
  const NewtonReport r = standard_fd_step(flat, w, mesh, 1, 0.0);
  CHECK(r.value == Approx(1.6).epsilon(1e-12));

  const Residual3 cubicFree = [](double, double, double, double yppp) { return yppp; };
  const std::array<double, 3> w3{0.0, 0.01, 0.04};  // y = x^2 at 0, 0.1, 0.2
  CHECK(standard_fd_step(cubicFree, w3, mesh, 1, 0.0).value == Approx(0.09).epsilon(1e-12));
}

TEST_CASE("standard FD surfaces Newton failure") {
  const Residual2 none = [](double, double, double) { return 1.0; };
  const std::array<double, 2> w{0.0, 0.0};
  CHECK_THROWS_AS(standard_fd_step(none, w, UniformMesh{0.0, 0.1}, 1, 0.0), NumericError);
}

TEST_CASE("standard FD on the Fig. 2 equation stops near the singularity") {
  const OdeModel m = ode_rhs_library(Realization::Sl3, Order::Third, {}, named_function("square"));
  const double h = 0.01;
  // Leading values from the accurate integrator.
  std::vector<double> start{1.0};
  for (int i = 1; i < 3; ++i) {
    Rk45Options o;
    o.relTol = o.absTol = 1e-12;
    start.push_back(rk45_integrate(m.system, 1.0, {1.0, 1.0, 3.0}, 1.0 + i * h, o).last_state()[0]);
  }
  const Trajectory t = standard_fd_run(m, UniformMesh{1.0, h}, start, FdStop{});
  REQUIRE(t.error);
  CHECK(t.points.back().x > 1.2);
  CHECK(t.points.back().x < 1.33);
  CHECK_THROWS(standard_fd_run(m, UniformMesh{1.0, h}, std::vector<double>{1.0}, FdStop{}));
}
