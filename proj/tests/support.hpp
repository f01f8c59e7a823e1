#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "invscheme/core.hpp"
#include "invscheme/exact.hpp"
#include "invscheme/invariants.hpp"
#include "invscheme/schemes.hpp"

namespace testsupport {

using invscheme::JetPoint;
using invscheme::Point2;

// A smooth graph with analytic derivatives.
struct Curve {
  std::function<double(double)> y, yp, ypp, yppp;

  Point2 at(double x) const { return {x, y(x)}; }
  JetPoint jet(double x) const { return {x, yp(x), ypp(x), yppp(x)}; }
};

// y = 1.5 x + 0.5 sin x: positive sl3 I1 near x = 1.
inline Curve sl3_curve() {
  return {[](double x) { return 1.5 * x + 0.5 * std::sin(x); },
          [](double x) { return 1.5 + 0.5 * std::cos(x); },
          [](double x) { return -0.5 * std::sin(x); },
          [](double x) { return -0.5 * std::cos(x); }};
}

// y = 2 x + 0.3 sin x: |y'| > 1 and positive sl4 I1 near x = 1.
inline Curve sl4_curve() {
  return {[](double x) { return 2.0 * x + 0.3 * std::sin(x); },
          [](double x) { return 2.0 + 0.3 * std::cos(x); },
          [](double x) { return -0.3 * std::sin(x); },
          [](double x) { return -0.3 * std::cos(x); }};
}

// Jet of the circle (x - cx)^2 + (y - cy)^2 = r^2 at a point on it, by
// implicit differentiation.
inline JetPoint circle_jet(double cx, double cy, Point2 p) {
  const double u = p.x - cx, v = p.y - cy;
  const double yp = -u / v;
  const double ypp = -(1.0 + yp * yp) / v;
  const double yppp = -3.0 * yp * ypp / v;
  return {p.x, yp, ypp, yppp};
}

// Jet of (x - cx)^2 - (y - cy)^2 = r^2.
inline JetPoint hyperbola_jet(double cx, double cy, Point2 p) {
  const double u = p.x - cx, v = p.y - cy;
  const double yp = u / v;
  const double ypp = (1.0 - yp * yp) / v;
  const double yppp = -3.0 * yp * ypp / v;
  return {p.x, yp, ypp, yppp};
}

// Least-squares slope of log(err) against log(h).
inline double fitted_order(const std::vector<double>& hs, const std::vector<double>& errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double lx = std::log(hs[i]), ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// A random admissible scheme window with a Newton starting guess for its
// next point, or nothing when the draw has no admissible window. Order 2
// windows lie on a random exact conic and the guess is the next conic point;
// order 3 windows come from bootstrap and the guess is quadratic
// extrapolation.
inline std::optional<std::pair<invscheme::SchemeState, Point2>> random_window(
    invscheme::Realization r, invscheme::Order order, std::mt19937_64& rng) {
  using namespace invscheme;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 0.003 + 0.04 * u(rng);
  SchemeSpec spec;
  spec.realization = r;
  spec.order = order;
  try {
    if (order == Order::Second) {
      const double a = 0.5 + u(rng), C = 4.0 * u(rng) - 2.0;
      const double x0 = 0.5 + 2.0 * u(rng), y0 = 2.0 * u(rng) - 1.0;
      const int dir = u(rng) < 0.5 ? 1 : -1;
      const double pick = u(rng);
      if (r == Realization::Sl3) {
        const auto fits = fit_circle(x0, y0, C, a);
        const auto& c = fits[static_cast<std::size_t>(pick * fits.size())];
        const double t0 = 6.28 * u(rng);
        spec.C = std::abs(C);
        return std::pair{seed_from_circle(spec, c, t0, dir, h), c.at(t0 + 2.0 * dir * h)};
      }
      const auto fits = fit_hyperbola(x0, y0, std::abs(C) + 1.0, a);
      const auto& c = fits[static_cast<std::size_t>(pick * fits.size())];
      const double t0 = 2.0 * u(rng) - 1.0;
      spec.C = std::abs(C) + 1.0;
      return std::pair{seed_from_hyperbola(spec, c, t0, dir, h), c.at(t0 + 2.0 * dir * h)};
    }
    InitialConditions ic{0.5 + 1.5 * u(rng), 2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0,
                         2.0 * u(rng) - 1.0};
    if (r == Realization::Sl4) ic.yp0 = (1.2 + 2.0 * u(rng)) * (u(rng) < 0.5 ? -1 : 1);
    spec.F = named_function("square");
    SchemeState s = bootstrap(spec, ic, h);
    const Point2 guess = 3.0 * s.window[2] - 3.0 * s.window[1] + s.window[0];
    return std::pair{s, guess};
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

}  // namespace testsupport
