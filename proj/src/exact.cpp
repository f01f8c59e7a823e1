#include "invscheme/exact.hpp"

#include <cmath>

namespace invscheme {

namespace {

void require_nonzero(double a) {
  if (a == 0.0) throw NumericError(ErrorKind::DomainViolation, "integration constant a must be nonzero");
}

// Offsets +-sqrt(rad) (negative first), or nothing when rad < 0.
std::vector<double> signed_roots(double rad) {
  if (rad < 0.0) return {};
  if (rad == 0.0) return {0.0};
  const double s = std::sqrt(rad);
  return {-s, s};
}

}  // namespace

Point2 CircleSolution::at(double theta) const {
  return {cx + r * std::cos(theta), cy + r * std::sin(theta)};
}

Point2 HyperbolaSolution::at(double u) const {
  return {cx + side * r * std::cosh(u), cy + r * std::sinh(u)};
}

std::vector<CircleSolution> fit_circle(double x0, double y0, double C, double a) {
  require_nonzero(a);
  const double r = 1.0 / std::abs(a);
  std::vector<CircleSolution> out;
  for (int sign : {1, -1}) {
    const double cx = sign * C / a;
    // (y0 - cy)^2 = r^2 - (x0 - cx)^2; cy = y0 - offset keeps "below" first.
    for (double off : signed_roots(r * r - (x0 - cx) * (x0 - cx))) {
      out.push_back({cx, y0 + off, r, sign});
    }
    if (C == 0.0) break;  // both signs give the same circle
  }
  if (out.empty())
    throw NumericError(ErrorKind::DomainViolation, "no circle of the family passes through the point",
                       Point2{x0, y0});
  return out;
}

std::vector<HyperbolaSolution> fit_hyperbola(double x0, double y0, double C, double a) {
  require_nonzero(a);
  const double r = 1.0 / std::abs(a);
  std::vector<HyperbolaSolution> out;
  for (int sign : {1, -1}) {
    const double cx = sign * C / a;
    const int side = x0 >= cx ? 1 : -1;
    for (double off : signed_roots((x0 - cx) * (x0 - cx) - r * r)) {
      out.push_back({cx, y0 + off, r, sign, side});
    }
    if (C == 0.0) break;
  }
  if (out.empty())
    throw NumericError(ErrorKind::DomainViolation,
                       "no hyperbola of the family passes through the point", Point2{x0, y0});
  return out;
}

double conic_distance(const CircleSolution& s, Point2 p) {
  return std::abs(std::hypot(p.x - s.cx, p.y - s.cy) - s.r);
}

double conic_distance(const HyperbolaSolution& s, Point2 p) {
  const double u = p.x - s.cx;
  const double v = p.y - s.cy;
  const double f = u * u - v * v - s.r * s.r;
  const double g = 2.0 * std::hypot(u, v);
  if (g == 0.0) return std::sqrt(std::abs(f));  // the center
  return std::abs(f) / g;
}

std::vector<double> initial_slope_from_solution(const CircleSolution& s, double x0) {
  const double u = x0 - s.cx;
  const double rad = s.r * s.r - u * u;
  if (rad < 0.0)
    throw NumericError(ErrorKind::DomainViolation, "x0 outside the circle's x-range", Point2{x0, s.cy});
  if (rad == 0.0)
    throw NumericError(ErrorKind::DomainViolation, "vertical tangent at x0", Point2{x0, s.cy});
  const double v = std::sqrt(rad);
  // (x - cx) + (y - cy) y' = 0
  return {-u / v, u / v};
}

std::vector<double> initial_slope_from_solution(const HyperbolaSolution& s, double x0) {
  const double u = x0 - s.cx;
  const double rad = u * u - s.r * s.r;
  if (rad < 0.0)
    throw NumericError(ErrorKind::DomainViolation, "x0 between the hyperbola's branches",
                       Point2{x0, s.cy});
  if (rad == 0.0)
    throw NumericError(ErrorKind::DomainViolation, "vertical tangent at the vertex", Point2{x0, s.cy});
  const double v = std::sqrt(rad);
  // (x - cx) - (y - cy) y' = 0
  return {u / v, -u / v};
}

double parameter_of(const CircleSolution& s, Point2 p) {
  return std::atan2(p.y - s.cy, p.x - s.cx);
}

double parameter_of(const HyperbolaSolution& s, Point2 p) {
  return std::asinh((p.y - s.cy) / s.r);
}

}  // namespace invscheme
