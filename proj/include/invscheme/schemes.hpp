#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "invscheme/core.hpp"
#include "invscheme/exact.hpp"

namespace invscheme {

/// Everything a step needs. The window holds the last 2 (order 2) or 3
/// (order 3) points; consecutive pairs satisfy the mesh condition I1 = K.
struct SchemeState {
  std::vector<Point2> window;
  SchemeSpec spec;
  double lastJ1 = 0.0;     // J1 of the current window (order 3)
  int curvatureSign = 1;   // sign of the continuous I1 at the start (order 3)
  double turningRef = 0.0; // turning() of the last three points
};

// Coefficients are relative to `origin`: the line is A u + B v = D and the
// conic q(u, v) = 0 with (u, v) = (x, y) - origin.
struct LineCoeffs {
  double A = 0.0, B = 0.0, D = 0.0;
  Point2 origin;
};

struct ConicCoeffs {
  double qxx = 0.0, qxy = 0.0, qyy = 0.0, qx = 0.0, qy = 0.0, q0 = 0.0;
  Point2 origin;

  double operator()(Point2 p) const;  // evaluated at a global point
};

/// Level set {P : pair_invariant(r, center, P) = value} as a conic in the
/// frame centered at origin. sl3 gives a circle, sl4 a hyperbola.
ConicCoeffs invariant_conic(Realization r, Point2 center, double value, Point2 origin);

/// Value of the outer invariant I2(p_{n}, p_{n+2}) the next point must have,
/// and the J1 the new triple must reach.
struct StepTarget {
  double outer = 0.0;
  double J1 = 0.0;
};

/// Throws NoIntersection when the third-order update asks for J1 < 0.
StepTarget step_target(const SchemeState& state);

/// The step's two equations as line (outer conic minus mesh conic) and mesh
/// conic, both centered at the last window point.
std::pair<LineCoeffs, ConicCoeffs> reduce_to_line_conic(const SchemeState& state);

/// Both intersection points (one at tangency). Parametrizes the line from
/// the projection of its origin and solves the quadratic in stable form.
/// Throws NoIntersection when the normalized discriminant is below -1e-12.
std::vector<Point2> intersect_line_conic(const LineCoeffs& line, const ConicCoeffs& conic);

/// Root whose displacement from prev has positive inner product with
/// prevDir; the farther one when both do.
Point2 solve_line_conic(const LineCoeffs& line, const ConicCoeffs& conic, Point2 prev,
                        Point2 prevDir);

struct StepResidual {
  double mesh = 0.0;    // |I1(p_{n+1}, P) - K|
  double scheme = 0.0;  // |I2(p_n, P) - target outer invariant|
};

StepResidual step_residual(const SchemeState& state, Point2 next);

struct StepOutcome {
  Point2 point;
  int iterations = 0;  // polishing or fallback Newton iterations
  bool usedFallback = false;
};

/// One step of the order-2 / order-3 invariant scheme along the conic path.
/// Of the two roots the one whose turning() is closest to turningRef is kept.
/// Throws DomainViolation when the window violates the mesh condition.
StepOutcome step_conic(const SchemeState& state);
Point2 step_order2(const SchemeState& state);
Point2 step_order3(const SchemeState& state);

/// Damped 2-D Newton on the J-equations {I1(p_{n+1}, P) = K,
/// J1(p_n, p_{n+1}, P) = target}, the latter cleared of its denominator.
/// Finite-difference Jacobian, step halving (20 at most), 50 iterations.
StepOutcome newton_fallback_step(const SchemeState& state, Point2 guess);

/// Window shifted by one with next appended; turningRef and lastJ1 updated.
SchemeState advance(const SchemeState& state, Point2 next);

struct InitialConditions {
  double x0 = 1.0, y0 = 0.0, yp0 = 0.0;
  std::optional<double> ypp0;
};

/// Starting window from classical initial data. The ODE is integrated at
/// tolerance 1e-12; the second point sits at arc length ~h, K is its pair
/// invariant and the third point is placed by bisection so that it matches K.
/// The K of spec is ignored and replaced.
SchemeState bootstrap(const SchemeSpec& spec, const InitialConditions& ics, double h);

/// Order-2 windows taken directly on an exact solution, starting at
/// parameter t0 and stepping by dir * h in the conic parameter.
SchemeState seed_from_circle(const SchemeSpec& spec, const CircleSolution& c, double t0, int dir,
                             double h);
SchemeState seed_from_hyperbola(const SchemeSpec& spec, const HyperbolaSolution& c, double t0,
                                int dir, double h);

struct StopRule {
  std::size_t maxSteps = 5000;
  double xMin = 0.0;
  double xMax = 1e300;
  double yAbsMax = 1e8;
};

/// Marches until the stop rule fires or a step fails on both paths. Failures
/// end up in the trajectory's error field.
Trajectory run_scheme(const SchemeState& state, const StopRule& stop,
                      std::vector<double>* stepSeconds = nullptr);

}  // namespace invscheme
