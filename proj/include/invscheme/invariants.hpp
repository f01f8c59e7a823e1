#pragma once

#include <optional>
#include <span>

#include "invscheme/core.hpp"

namespace invscheme {

/// Jet of a graph y(x) at one point. y itself does not enter any invariant.
struct JetPoint {
  double x = 0.0;
  double yp = 0.0;
  double ypp = 0.0;
  std::optional<double> yppp;
};

/// Three-point basis {I1^n, I1^{n+1}, I2^{n+1}} on points n-1, n, n+1.
struct DiscreteInvariantTriple {
  double i1n = 0.0;
  double i1n1 = 0.0;
  double i2n1 = 0.0;
};

// Continuous differential invariants. I1 is the signed curvature of the graph
// taken with x increasing; for sl3 it equals the hyperbolic geodesic curvature
// in the upper half-plane x > 0. On a circle with center (cx, cy) and radius r
// it is +cx/r on the upper arc and -cx/r on the lower arc.
double cont_I1_sl3(const JetPoint& j);
double cont_I2_sl3(const JetPoint& j);
double cont_I1_sl4(const JetPoint& j);
double cont_I2_sl4(const JetPoint& j);
double cont_I1(Realization r, const JetPoint& j);
double cont_I2(Realization r, const JetPoint& j);

// Two-point invariants. disc_I1 and disc_I2 share one formula; the names
// distinguish neighbouring pairs from the outer pair of a three-point window.
double disc_I1_sl3(Point2 a, Point2 b);
double disc_I2_sl3(Point2 a, Point2 c);
double disc_I1_sl4(Point2 a, Point2 b);
double disc_I2_sl4(Point2 a, Point2 c);
double pair_invariant(Realization r, Point2 a, Point2 b);

DiscreteInvariantTriple triple_of(Realization r, Point2 a, Point2 b, Point2 c);

double J1_sl3(const DiscreteInvariantTriple& t);
double J1_sl4(const DiscreteInvariantTriple& t);
double J1(Realization r, const DiscreteInvariantTriple& t);

double J2_sl3(double i1n, double i1n1, double i1n2, double j1n1, double j1n2);
double J2_sl4(double i1n, double i1n1, double i1n2, double j1n1, double j1n2);

/// Quantity under the root of J1, normalized so that J1 = sqrt(radicand) for
/// both realizations. May be negative; no domain check on the sign.
double j1_radicand(Realization r, const DiscreteInvariantTriple& t);

/// Outer-pair invariant I2^{n+1} for which J1(i1n, i1n1, I2) = j1.
double outer_invariant_for(Realization r, double i1n, double i1n1, double j1);

double J1_of_window(Realization r, std::span<const Point2> window3);
double J2_of_window(Realization r, std::span<const Point2> window4);

/// Group-invariant measure of which side of the invariant "geodesic" through
/// a, b the point c lies on. Odd under the orientation-reversing symmetry that
/// fixes a and b, so the two roots of a scheme step have opposite values.
double turning(Realization r, Point2 a, Point2 b, Point2 c);

}  // namespace invscheme
