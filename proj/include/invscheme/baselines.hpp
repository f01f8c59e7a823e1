#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "invscheme/core.hpp"
#include "invscheme/invariants.hpp"
#include "invscheme/rk45.hpp"

namespace invscheme {

struct UniformMesh {
  double x0 = 0.0;
  double h = 0.01;

  double node(long n) const { return x0 + static_cast<double>(n) * h; }
};

// Four-point stencils on nodes n-1, n, n+1, n+2 (values y[0..3]), all
// centered at x_{n+1/2}. Exact on polynomials up to degree 4 (d1, d3) and
// degree 3 (d2).
double stencil_d1_4pt(std::span<const double, 4> y, double h);
double stencil_d2_4pt(std::span<const double, 4> y, double h);
double stencil_d3_4pt(std::span<const double, 4> y, double h);

using Residual2 = std::function<double(double x, double yp, double ypp)>;
using Residual3 = std::function<double(double x, double yp, double ypp, double yppp)>;

/// An invariant ODE in the three forms the baselines need.
struct OdeModel {
  Realization realization = Realization::Sl3;
  Order order = Order::Second;
  Residual2 residual2;       // order 2: I1 - C
  Residual3 residual3;       // order 3: polynomial form, zero iff I2 = F(I1)
  FirstOrderSystem system;   // (y, y') or (y, y', y'') with the top derivative solved
};

/// Order-2 models need C; order-3 models need F. For F = "square" the order-3
/// residual is the fully expanded polynomial equation.
OdeModel ode_rhs_library(Realization r, Order order, std::optional<double> C,
                         const ScalarFunction& F = {});

/// The expanded third-order equations for F(u) = u^2 (sl3 and sl4).
double expanded_residual(Realization r, const JetPoint& j);

/// Highest derivative solved from I1 = C (order 2) or I2 = F(I1) (order 3).
double solve_top_derivative(Realization r, Order order, const JetPoint& j, std::optional<double> C,
                            const ScalarFunction& F);

struct NewtonReport {
  double value = 0.0;
  int iterations = 0;
};

/// Next value y_{n+1} of the 3-point central scheme
///   y' ~ (y_{n+1} - y_{n-1}) / 2h,  y'' ~ (y_{n+1} - 2 y_n + y_{n-1}) / h^2
/// at x_n = mesh.node(n). window = {y_{n-1}, y_n}.
NewtonReport standard_fd_step(const Residual2& residual, std::span<const double, 2> window,
                              const UniformMesh& mesh, long n, double guess);

/// Next value y_{n+2} of the 4-point scheme centered at x_{n+1/2}.
/// window = {y_{n-1}, y_n, y_{n+1}}, where x_{n-1} = mesh.node(n - 1).
NewtonReport standard_fd_step(const Residual3& residual, std::span<const double, 3> window,
                              const UniformMesh& mesh, long n, double guess);

struct FdStop {
  std::size_t maxSteps = 5000;
  double xMax = 1e300;
  double yAbsMax = 1e8;  // beyond this the run halts with SingularityDetected
};

/// Marches the standard scheme in +x from the given leading values (2 for
/// order 2, 3 for order 3) on the mesh starting at mesh.x0. Newton failures
/// end the run and are recorded in the trajectory, never retried.
Trajectory standard_fd_run(const OdeModel& model, const UniformMesh& mesh,
                           std::span<const double> start, const FdStop& stop,
                           std::vector<double>* stepSeconds = nullptr);

}  // namespace invscheme
