#include "invscheme/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace invscheme {

namespace {

constexpr int kNewtonMaxIterations = 50;
constexpr double kNewtonTol = 1e-12;
constexpr double kFdRelStep = 1e-7;

template <class Fn>
NewtonReport scalar_newton(Fn&& f, double guess) {
  auto eval = [&](double v) {
    try {
      return f(v);
    } catch (const NumericError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  double v = guess;
  for (int it = 0; it < kNewtonMaxIterations; ++it) {
    const double r = eval(v);
    if (!std::isfinite(r))
      throw NumericError(ErrorKind::NewtonDivergence, "residual not finite at iteration " +
                                                          std::to_string(it));
    if (std::abs(r) <= kNewtonTol) return {v, it};
    const double delta = kFdRelStep * std::max(std::abs(v), 1.0);
    const double slope = (eval(v + delta) - r) / delta;
    if (!std::isfinite(slope) || slope == 0.0)
      throw NumericError(ErrorKind::NewtonDivergence, "singular derivative");
    const double step = r / slope;
    v -= step;
    if (!std::isfinite(v)) throw NumericError(ErrorKind::NewtonDivergence, "iterate not finite");
    if (std::abs(step) <= kNewtonTol * (1.0 + std::abs(v))) return {v, it + 1};
  }
  throw NumericError(ErrorKind::NewtonDivergence,
                     "no convergence in " + std::to_string(kNewtonMaxIterations) + " iterations");
}

double sl4_core(double x, double p, double q) {
  return (p - 1.0) * (p + 1.0) * (p + 1.0) * (3.0 * p * p - 1.0) + 4.0 * x * p * (p + 1.0) * q -
         2.0 * x * x * q * q;
}

}  // namespace

double stencil_d1_4pt(std::span<const double, 4> y, double h) {
  return (27.0 * (y[2] - y[1]) - (y[3] - y[0])) / (24.0 * h);
}

double stencil_d2_4pt(std::span<const double, 4> y, double h) {
  return (y[3] - (y[2] + y[1]) + y[0]) / (2.0 * h * h);
}

double stencil_d3_4pt(std::span<const double, 4> y, double h) {
  return (y[3] - 3.0 * y[2] + 3.0 * y[1] - y[0]) / (h * h * h);
}

double expanded_residual(Realization r, const JetPoint& j) {
  if (!j.yppp) throw NumericError(ErrorKind::DomainViolation, "jet has no third derivative");
  const double x = j.x, p = j.yp, q = j.ypp, t = *j.yppp;
  if (r == Realization::Sl3) {
    const double s = 1.0 + p * p;
    return x * x * s * t - x * x * (3.0 * p - 1.0) * q * q - 2.0 * x * p * s * q + p * p * s * s;
  }
  const double s = p * p - 1.0;
  return 2.0 * x * x * s * t + s * s * (8.0 * p * p - 3.0) + 10.0 * x * p * q * s -
         x * x * q * q * (6.0 * p - 5.0);
}

double solve_top_derivative(Realization r, Order order, const JetPoint& j,
                            std::optional<double> C, const ScalarFunction& F) {
  const double x = j.x, p = j.yp, q = j.ypp;
  if (order == Order::Second) {
    if (!C) throw NumericError(ErrorKind::DomainViolation, "order-2 model needs C");
    if (r == Realization::Sl3) {
      const double s = 1.0 + p * p;
      return (p * s - *C * s * std::sqrt(s)) / x;
    }
    const double s = p * p - 1.0;
    if (!(s > 0.0)) throw NumericError(ErrorKind::DomainViolation, "sl4 needs |y'| > 1");
    return (*C * s * std::sqrt(s) - p * s) / x;
  }
  if (!F) throw NumericError(ErrorKind::DomainViolation, "order-3 model needs F");
  const double f = F(cont_I1(r, j));
  if (r == Realization::Sl3) {
    const double s = 1.0 + p * p;
    return (3.0 * x * x * p * q * q - f * s * s * s) / (x * x * s);
  }
  const double lead = 2.0 * x * x * (p + 1.0);
  if (lead == 0.0)
    throw NumericError(ErrorKind::DomainViolation, "leading coefficient of y''' vanishes");
  return (f * (p - 1.0) * (p - 1.0) * (p + 1.0) * (p + 1.0) * (p + 1.0) - 3.0 * sl4_core(x, p, q)) /
         lead;
}

OdeModel ode_rhs_library(Realization r, Order order, std::optional<double> C,
                         const ScalarFunction& F) {
  OdeModel m;
  m.realization = r;
  m.order = order;
  if (order == Order::Second) {
    if (!C) throw NumericError(ErrorKind::DomainViolation, "order-2 model needs C");
    const double c = *C;
    m.residual2 = [r, c](double x, double yp, double ypp) {
      return cont_I1(r, {x, yp, ypp, std::nullopt}) - c;
    };
    m.system = {2, [r, C](double x, const std::vector<double>& s) {
                  const JetPoint j{x, s[1], 0.0, std::nullopt};
                  return std::vector<double>{s[1], solve_top_derivative(r, Order::Second, j, C, {})};
                }};
    return m;
  }
  if (!F) throw NumericError(ErrorKind::DomainViolation, "order-3 model needs F");
  if (F.name == "square") {
    m.residual3 = [r](double x, double yp, double ypp, double yppp) {
      return expanded_residual(r, {x, yp, ypp, yppp});
    };
  } else {
    m.residual3 = [r, F](double x, double yp, double ypp, double yppp) {
      const JetPoint j{x, yp, ypp, yppp};
      const double gap = cont_I2(r, j) - F(cont_I1(r, j));
      if (r == Realization::Sl3) {
        const double s = 1.0 + yp * yp;
        return -gap * s * s * s;
      }
      const double s = yp * yp - 1.0;
      return gap * s * s * s;
    };
  }
  m.system = {3, [r, F](double x, const std::vector<double>& s) {
                const JetPoint j{x, s[1], s[2], std::nullopt};
                return std::vector<double>{s[1], s[2],
                                           solve_top_derivative(r, Order::Third, j, {}, F)};
              }};
  return m;
}

NewtonReport standard_fd_step(const Residual2& residual, std::span<const double, 2> w,
                              const UniformMesh& mesh, long n, double guess) {
  const double h = mesh.h;
  const double xn = mesh.node(n);
  return scalar_newton(
      [&](double next) {
        const double yp = (next - w[0]) / (2.0 * h);
        const double ypp = (next - 2.0 * w[1] + w[0]) / (h * h);
        return residual(xn, yp, ypp);
      },
      guess);
}

NewtonReport standard_fd_step(const Residual3& residual, std::span<const double, 3> w,
                              const UniformMesh& mesh, long n, double guess) {
  const double h = mesh.h;
  const double xc = mesh.node(n) + 0.5 * h;
  return scalar_newton(
      [&](double next) {
        const std::array<double, 4> y{w[0], w[1], w[2], next};
        return residual(xc, stencil_d1_4pt(y, h), stencil_d2_4pt(y, h), stencil_d3_4pt(y, h));
      },
      guess);
}

Trajectory standard_fd_run(const OdeModel& model, const UniformMesh& mesh,
                           std::span<const double> start, const FdStop& stop,
                           std::vector<double>* stepSeconds) {
  const std::size_t lead = model.order == Order::Second ? 2 : 3;
  if (start.size() != lead)
    throw std::invalid_argument("standard FD run needs " + std::to_string(lead) + " start values");
  Trajectory traj;
  std::vector<double> ys(start.begin(), start.end());
  for (std::size_t i = 0; i < ys.size(); ++i)
    traj.points.push_back({mesh.node(static_cast<long>(i)), ys[i]});

  using clock = std::chrono::steady_clock;
  for (std::size_t step = 0; step < stop.maxSteps; ++step) {
    const std::size_t k = ys.size();  // index of the unknown
    const long n = static_cast<long>(k) - static_cast<long>(lead) + 1;  // window starts at n-1
    const double x = mesh.node(static_cast<long>(k));
    const double guess = 2.0 * ys[k - 1] - ys[k - 2];
    const auto t0 = clock::now();
    NewtonReport rep;
    try {
      if (lead == 2) {
        const std::array<double, 2> w{ys[k - 2], ys[k - 1]};
        rep = standard_fd_step(model.residual2, w, mesh, static_cast<long>(k) - 1, guess);
      } else {
        const std::array<double, 3> w{ys[k - 3], ys[k - 2], ys[k - 1]};
        rep = standard_fd_step(model.residual3, w, mesh, n, guess);
      }
    } catch (const NumericError& e) {
      traj.halt = HaltReason::Error;
      traj.error = NumericError(e.kind(), e.detail() + " (standard FD at x = " +
                                              std::to_string(x) + ")",
                                Point2{x, ys.back()}, k);
      return traj;
    }
    if (stepSeconds)
      stepSeconds->push_back(std::chrono::duration<double>(clock::now() - t0).count());
    ys.push_back(rep.value);
    traj.points.push_back({x, rep.value});
    StepDiagnostic d;
    d.solverIterations = rep.iterations;
    traj.diagnostics.push_back(d);
    if (std::abs(rep.value) > stop.yAbsMax) {
      traj.halt = HaltReason::Error;
      traj.error = NumericError(ErrorKind::SingularityDetected,
                                "standard FD solution blew up at x = " + std::to_string(x),
                                Point2{x, rep.value}, k);
      return traj;
    }
    if (x > stop.xMax) {
      traj.halt = HaltReason::XWindow;
      return traj;
    }
  }
  traj.halt = HaltReason::MaxSteps;
  return traj;
}

}  // namespace invscheme
