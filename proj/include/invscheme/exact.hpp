#pragma once

#include <vector>

#include "invscheme/core.hpp"

namespace invscheme {

// Solutions of the squared second-order equations I1^2 = C^2.
//   sl3: (x - cx)^2 + (y - cy)^2 = r^2   with cx = +-C/a, r = 1/|a|
//   sl4: (x - cx)^2 - (y - cy)^2 = r^2
// centerSign records which of cx = +C/a (+1) or cx = -C/a (-1) was taken.

struct CircleSolution {
  double cx = 0.0, cy = 0.0, r = 1.0;
  int centerSign = 1;

  Point2 at(double theta) const;
  double invariant() const { return cx / r; }  // |I1| on the circle
};

struct HyperbolaSolution {
  double cx = 0.0, cy = 0.0, r = 1.0;
  int centerSign = 1;
  int side = -1;  // branch: sign of (x - cx)

  Point2 at(double u) const;
};

/// All circles of the family through (x0, y0), ordered by centerSign (+1
/// first) and then by cy (below the point first). Throws DomainViolation when
/// a == 0 or no branch contains the point.
std::vector<CircleSolution> fit_circle(double x0, double y0, double C, double a);
std::vector<HyperbolaSolution> fit_hyperbola(double x0, double y0, double C, double a);

double conic_distance(const CircleSolution& s, Point2 p);
/// First-order geometric distance |f| / |grad f| with
/// f = (x - cx)^2 - (y - cy)^2 - r^2.
double conic_distance(const HyperbolaSolution& s, Point2 p);

/// Slopes dy/dx at the points of the conic above x0, upper point first.
/// Throws DomainViolation outside the x-range and at vertical tangents.
std::vector<double> initial_slope_from_solution(const CircleSolution& s, double x0);
std::vector<double> initial_slope_from_solution(const HyperbolaSolution& s, double x0);

/// Conic parameter of a point known to lie on the conic.
double parameter_of(const CircleSolution& s, Point2 p);
double parameter_of(const HyperbolaSolution& s, Point2 p);

}  // namespace invscheme
