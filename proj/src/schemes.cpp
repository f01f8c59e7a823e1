#include "invscheme/schemes.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "invscheme/baselines.hpp"
#include "invscheme/invariants.hpp"
#include "invscheme/rk45.hpp"

namespace invscheme {

namespace {

constexpr double kStepTol = 1e-12;
constexpr double kPolishTol = 1e-15;
constexpr double kMeshRelTol = 1e-8;
constexpr double kDiscriminantTol = 1e-12;
constexpr double kJacobianRelStep = 1e-5;  // relative to the last chord
constexpr int kNewtonMaxIterations = 50;
constexpr int kMaxHalvings = 20;

using Residual = std::array<double, 2>;

double max_abs(const Residual& r) { return std::max(std::abs(r[0]), std::abs(r[1])); }

// Damped Newton in the plane. Converges when max|r| <= tol, or when the
// update stagnates at rounding level with max|r| <= looseTol. The Jacobian
// uses central differences on the scale of the last chord: the two curves
// meet at a small angle, so a sloppy Jacobian stalls the iteration.
template <class Fn>
StepOutcome damped_newton(Fn&& f, Point2 p, double chord, double tol, double looseTol) {
  auto eval = [&](Point2 q) -> std::optional<Residual> {
    try {
      const Residual r = f(q);
      if (!std::isfinite(r[0]) || !std::isfinite(r[1])) return std::nullopt;
      return r;
    } catch (const NumericError&) {
      return std::nullopt;
    }
  };
  std::optional<Residual> r = eval(p);
  if (!r) throw NumericError(ErrorKind::NewtonDivergence, "residual undefined at the guess", p);
  for (int it = 0; it < kNewtonMaxIterations; ++it) {
    const double nr = max_abs(*r);
    if (nr <= tol) return {p, it, false};

    double jac[2][2];
    const double delta = kJacobianRelStep * chord;
    for (int k = 0; k < 2; ++k) {
      Point2 hi = p, lo = p;
      (k == 0 ? hi.x : hi.y) += delta;
      (k == 0 ? lo.x : lo.y) -= delta;
      const std::optional<Residual> rh = eval(hi), rl = eval(lo);
      if (!rh || !rl) throw NumericError(ErrorKind::NewtonDivergence, "Jacobian probe left the domain", p);
      jac[0][k] = ((*rh)[0] - (*rl)[0]) / (2.0 * delta);
      jac[1][k] = ((*rh)[1] - (*rl)[1]) / (2.0 * delta);
    }
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    const double scale = std::abs(jac[0][0] * jac[1][1]) + std::abs(jac[0][1] * jac[1][0]);
    if (!std::isfinite(det) || std::abs(det) <= 1e-14 * scale || scale == 0.0)
      throw NumericError(ErrorKind::NewtonDivergence, "singular Jacobian", p);
    const Point2 step{(jac[1][1] * (*r)[0] - jac[0][1] * (*r)[1]) / det,
                      (jac[0][0] * (*r)[1] - jac[1][0] * (*r)[0]) / det};

    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k <= kMaxHalvings; ++k, lambda *= 0.5) {
      const Point2 q = p - lambda * step;
      const std::optional<Residual> rq = eval(q);
      if (rq && max_abs(*rq) < nr) {
        p = q;
        r = rq;
        accepted = true;
        break;
      }
    }
    const bool stagnant = norm(step) <= 1e-15 * (1.0 + norm(p));
    if (!accepted || stagnant) {
      if (max_abs(*r) <= looseTol) return {p, it + 1, false};
      if (!accepted)
        throw NumericError(ErrorKind::NewtonDivergence, "damping failed to reduce the residual", p);
    }
  }
  if (max_abs(*r) <= tol) return {p, kNewtonMaxIterations, false};
  throw NumericError(ErrorKind::NewtonDivergence,
                     "no convergence in " + std::to_string(kNewtonMaxIterations) + " iterations", p);
}

std::size_t window_size(Order order) { return order == Order::Second ? 2 : 3; }

void check_window(const SchemeState& s) {
  const Realization r = s.spec.realization;
  if (s.window.size() != window_size(s.spec.order))
    throw NumericError(ErrorKind::DomainViolation, "window size does not match the scheme order");
  for (std::size_t i = 0; i + 1 < s.window.size(); ++i) {
    const double k = pair_invariant(r, s.window[i], s.window[i + 1]);
    if (!(std::abs(k - s.spec.K) <= kMeshRelTol * s.spec.K))
      throw NumericError(ErrorKind::DomainViolation,
                         "window violates the mesh condition I1 = K", s.window[i], i);
  }
}

// Bisection for g(t) = 0 with g(lo) < 0 < g(hi) (hi may be extended).
template <class G>
double bisect(G&& g, double lo, double hi) {
  double step = hi - lo;
  int grow = 0;
  while (!(g(hi) > 0.0)) {
    if (++grow > 8) throw NumericError(ErrorKind::DomainViolation, "could not bracket the third point");
    hi += step;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
}

SchemeState finish_order2_seed(SchemeSpec spec, Point2 p0, Point2 p1, Point2 p2) {
  spec.K = pair_invariant(spec.realization, p0, p1);
  SchemeState s;
  s.spec = spec;
  s.window = {p0, p1};
  s.lastJ1 = std::abs(*spec.C);
  s.curvatureSign = *spec.C < 0.0 ? -1 : 1;
  s.turningRef = turning(spec.realization, p0, p1, p2);
  return s;
}

template <class Conic>
SchemeState seed_on_conic(const SchemeSpec& spec, const Conic& c, double t0, int dir, double h) {
  if (spec.order != Order::Second || !spec.C)
    throw NumericError(ErrorKind::DomainViolation, "conic seeding is for order-2 schemes with C");
  if (!(h > 0.0) || (dir != 1 && dir != -1))
    throw std::invalid_argument("seeding needs h > 0 and dir = +-1");
  const Realization r = spec.realization;
  const Point2 p0 = c.at(t0);
  const Point2 p1 = c.at(t0 + dir * h);
  if (!validate_point(p0, r) || !validate_point(p1, r))
    throw NumericError(ErrorKind::DomainViolation, "seed leaves x > 0", p0);
  const double K = pair_invariant(r, p0, p1);
  const double t1 = t0 + dir * h;
  // Bisect on the distance along the parameter so the bracket is increasing.
  const double s = bisect([&](double u) { return pair_invariant(r, p1, c.at(t1 + dir * u)) - K; },
                          0.0, 2.0 * h);
  return finish_order2_seed(spec, p0, p1, c.at(t1 + dir * s));
}

}  // namespace

double ConicCoeffs::operator()(Point2 p) const {
  const double u = p.x - origin.x;
  const double v = p.y - origin.y;
  return qxx * u * u + qxy * u * v + qyy * v * v + qx * u + qy * v + q0;
}

ConicCoeffs invariant_conic(Realization r, Point2 center, double value, Point2 origin) {
  const Point2 e = center - origin;
  ConicCoeffs q;
  q.origin = origin;
  if (r == Realization::Sl3) {
    // |P - Q|^2 = value^2 xQ xP
    const double rho = value * value;
    q.qxx = 1.0;
    q.qyy = 1.0;
    q.qx = -2.0 * e.x - rho * center.x;
    q.qy = -2.0 * e.y;
    q.q0 = e.x * e.x + e.y * e.y - rho * center.x * origin.x;
  } else {
    // dy^2 - dx^2 = 4 mu xQ xP,  mu = value^2 / (1 + value^2)
    const double mu = value * value / (1.0 + value * value);
    q.qxx = -1.0;
    q.qyy = 1.0;
    q.qx = 2.0 * e.x - 4.0 * mu * center.x;
    q.qy = -2.0 * e.y;
    q.q0 = e.y * e.y - e.x * e.x - 4.0 * mu * center.x * origin.x;
  }
  return q;
}

StepTarget step_target(const SchemeState& s) {
  const Realization r = s.spec.realization;
  const auto& w = s.window;
  const double K = s.spec.K;
  if (s.spec.order == Order::Second) {
    const double j = std::abs(*s.spec.C);
    return {outer_invariant_for(r, pair_invariant(r, w[0], w[1]), K, j), j};
  }
  const double a0 = pair_invariant(r, w[0], w[1]);
  const double a1 = pair_invariant(r, w[1], w[2]);
  const double sum = a0 + a1 + K;
  const double J = s.lastJ1;
  const double sigma = s.spec.signedCurvature ? static_cast<double>(s.curvatureSign) : 1.0;
  double rhs = s.spec.F(sigma * J);
  if (r == Realization::Sl4) rhs -= 6.0 * J * J + 3.0;
  const double next = J + sigma * sum / 3.0 * rhs;
  if (!(next >= 0.0))
    throw NumericError(ErrorKind::NoIntersection,
                       "third-order update asks for J1 = " + std::to_string(next) + " < 0", w.back());
  return {outer_invariant_for(r, a1, K, next), next};
}

std::pair<LineCoeffs, ConicCoeffs> reduce_to_line_conic(const SchemeState& s) {
  const Realization r = s.spec.realization;
  const Point2 B = s.window.back();
  const Point2 A = s.window[s.window.size() - 2];
  const StepTarget t = step_target(s);
  const ConicCoeffs mesh = invariant_conic(r, B, s.spec.K, B);
  const ConicCoeffs outer = invariant_conic(r, A, t.outer, B);
  LineCoeffs line{outer.qx - mesh.qx, outer.qy - mesh.qy, mesh.q0 - outer.q0, B};
  if (line.A == 0.0 && line.B == 0.0)
    throw NumericError(ErrorKind::DomainViolation, "degenerate line in the reduction", B);
  return {line, mesh};
}

std::vector<Point2> intersect_line_conic(const LineCoeffs& line, const ConicCoeffs& q) {
  const double n2 = line.A * line.A + line.B * line.B;
  if (!(n2 > 0.0)) throw NumericError(ErrorKind::DomainViolation, "line has A = B = 0");
  const double n = std::sqrt(n2);
  const Point2 foot{line.A * line.D / n2, line.B * line.D / n2};  // in the line's frame
  const Point2 d{-line.B / n, line.A / n};
  const Point2 w0 = (line.origin - q.origin) + foot;  // in the conic's frame

  const double c2 = q.qxx * d.x * d.x + q.qxy * d.x * d.y + q.qyy * d.y * d.y;
  const double c1 = 2.0 * q.qxx * w0.x * d.x + q.qxy * (w0.x * d.y + w0.y * d.x) +
                    2.0 * q.qyy * w0.y * d.y + q.qx * d.x + q.qy * d.y;
  const double c0 = q.qxx * w0.x * w0.x + q.qxy * w0.x * w0.y + q.qyy * w0.y * w0.y +
                    q.qx * w0.x + q.qy * w0.y + q.q0;

  const Point2 base = line.origin + foot;
  auto at = [&](double t) { return base + t * d; };

  if (c2 == 0.0) {
    if (c1 == 0.0) throw NumericError(ErrorKind::NoIntersection, "line does not meet the conic");
    return {at(-c0 / c1)};
  }
  double disc = c1 * c1 - 4.0 * c2 * c0;
  const double scale = c1 * c1 + std::abs(4.0 * c2 * c0);
  if (disc < 0.0) {
    if (disc < -kDiscriminantTol * scale)
      throw NumericError(ErrorKind::NoIntersection, "line misses the conic", base);
    disc = 0.0;
  }
  if (disc == 0.0) return {at(-c1 / (2.0 * c2))};
  const double root = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  return {at(root / c2), at(c0 / root)};
}

Point2 solve_line_conic(const LineCoeffs& line, const ConicCoeffs& conic, Point2 prev,
                        Point2 prevDir) {
  const std::vector<Point2> roots = intersect_line_conic(line, conic);
  if (roots.size() == 1) return roots.front();
  std::optional<Point2> best;
  for (const Point2& p : roots) {
    if (!(dot(p - prev, prevDir) > 0.0)) continue;
    if (!best || norm(p - prev) > norm(*best - prev)) best = p;
  }
  if (!best) throw NumericError(ErrorKind::NoIntersection, "no root ahead of the previous point", prev);
  return *best;
}

StepResidual step_residual(const SchemeState& s, Point2 next) {
  const Realization r = s.spec.realization;
  const Point2 B = s.window.back();
  const Point2 A = s.window[s.window.size() - 2];
  const StepTarget t = step_target(s);
  return {std::abs(pair_invariant(r, B, next) - s.spec.K),
          std::abs(pair_invariant(r, A, next) - t.outer)};
}

StepOutcome step_conic(const SchemeState& s) {
  check_window(s);
  const Realization r = s.spec.realization;
  const Point2 B = s.window.back();
  const Point2 A = s.window[s.window.size() - 2];
  const StepTarget target = step_target(s);
  const auto [line, conic] = reduce_to_line_conic(s);

  std::optional<Point2> best;
  double bestGap = std::numeric_limits<double>::infinity();
  for (const Point2& p : intersect_line_conic(line, conic)) {
    if (!validate_point(p, r)) continue;
    const double gap = std::abs(turning(r, A, B, p) - s.turningRef);
    if (!best || gap < bestGap || (std::isnan(bestGap) && !std::isnan(gap))) {
      best = p;
      bestGap = gap;
    }
  }
  if (!best) throw NumericError(ErrorKind::NoIntersection, "no intersection inside x > 0", B);

  auto residual = [&](Point2 p) -> Residual {
    return {pair_invariant(r, B, p) - s.spec.K, pair_invariant(r, A, p) - target.outer};
  };
  // The two level sets cross at a small angle, so residuals at the 1e-12
  // level still move the point by ~1e-9. Polish to rounding level.
  try {
    return damped_newton(residual, *best, norm(B - A), kPolishTol, kStepTol);
  } catch (const NumericError&) {
    if (max_abs(residual(*best)) <= kStepTol) return {*best, 0, false};
    throw;
  }
}

Point2 step_order2(const SchemeState& s) {
  if (s.spec.order != Order::Second)
    throw NumericError(ErrorKind::DomainViolation, "step_order2 called on an order-3 state");
  return step_conic(s).point;
}

Point2 step_order3(const SchemeState& s) {
  if (s.spec.order != Order::Third)
    throw NumericError(ErrorKind::DomainViolation, "step_order3 called on an order-2 state");
  return step_conic(s).point;
}

StepOutcome newton_fallback_step(const SchemeState& s, Point2 guess) {
  check_window(s);
  const Realization r = s.spec.realization;
  const Point2 B = s.window.back();
  const Point2 A = s.window[s.window.size() - 2];
  const double a = pair_invariant(r, A, B);
  const double j = step_target(s).J1;
  // J1(a, b, c)^2 = j^2 multiplied by ab(a+b)/8 (sl3) or ab(a+b)/2 (sl4).
  auto residual = [&](Point2 p) -> Residual {
    const double b = pair_invariant(r, B, p);
    const double c = pair_invariant(r, A, p);
    const double den = a * b * (a + b) / (r == Realization::Sl3 ? 8.0 : 2.0);
    const double rad = j1_radicand(r, {a, b, c});
    return {b - s.spec.K, (rad - j * j) * den};
  };
  const double chord = norm(B - A);
  StepOutcome out = damped_newton(residual, guess, chord, kPolishTol, 1e-10);
  out.usedFallback = true;

  // The mirror root can be arbitrarily close when the window is nearly a
  // geodesic, and Newton may land on either. Keep the root-selection rule
  // of the conic path: if the mirror side fits turningRef better, deflate
  // the root found and look for the other one.
  const double t = turning(r, A, B, out.point);
  if (std::isnan(t) || std::isnan(s.turningRef) ||
      std::abs(t - s.turningRef) <= std::abs(-t - s.turningRef))
    return out;
  const Point2 first = out.point;
  auto deflated = [&](Point2 p) -> Residual {
    const Residual v = residual(p);
    const double m = 1.0 + chord / norm(p - first);
    return {v[0] * m, v[1] * m};
  };
  // Deflated Newton from the guess often stalls against the pole at the
  // first root, so it is also started on the far side of it, along the
  // mesh level curve.
  const double sep = std::max(norm(guess - first), 1e-6 * chord);
  const double eps = kJacobianRelStep * chord;
  const double gx = (residual({first.x + eps, first.y})[0] - residual({first.x - eps, first.y})[0]);
  const double gy = (residual({first.x, first.y + eps})[0] - residual({first.x, first.y - eps})[0]);
  const double gn = std::hypot(gx, gy);
  std::vector<Point2> starts{guess, 2.0 * first - guess};
  if (gn > 0.0) {
    const Point2 tangent{-gy / gn, gx / gn};
    starts.push_back(first + sep * tangent);
    starts.push_back(first - sep * tangent);
  }
  int iterations = out.iterations;
  for (const Point2& start : starts) {
    try {
      const StepOutcome other = damped_newton(deflated, start, chord, kPolishTol, 1e-10);
      const StepOutcome polished = damped_newton(residual, other.point, chord, kPolishTol, 1e-10);
      iterations += other.iterations + polished.iterations;
      const double t2 = turning(r, A, B, polished.point);
      if (norm(polished.point - first) > 1e-3 * sep &&
          std::abs(t2 - s.turningRef) < std::abs(t - s.turningRef))
        return {polished.point, iterations, true};
    } catch (const NumericError&) {
    }
  }
  return out;
}

SchemeState advance(const SchemeState& s, Point2 next) {
  SchemeState out = s;
  const Realization r = s.spec.realization;
  const double t = turning(r, s.window[s.window.size() - 2], s.window.back(), next);
  if (!std::isnan(t)) out.turningRef = t;
  if (s.spec.order == Order::Third) out.lastJ1 = step_target(s).J1;
  out.window.erase(out.window.begin());
  out.window.push_back(next);
  return out;
}

SchemeState bootstrap(const SchemeSpec& specIn, const InitialConditions& ics, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("bootstrap needs h > 0");
  SchemeSpec spec = specIn;
  const Realization r = spec.realization;
  const bool second = spec.order == Order::Second;
  if (second && !spec.C) throw NumericError(ErrorKind::DomainViolation, "order 2 needs C");
  if (!second && (!spec.F || !ics.ypp0))
    throw NumericError(ErrorKind::DomainViolation, "order 3 needs F and y''(x0)");
  const Point2 p0{ics.x0, ics.y0};
  if (!validate_point(p0, r))
    throw NumericError(ErrorKind::DomainViolation, "initial point outside x > 0", p0);

  const OdeModel model = ode_rhs_library(r, spec.order, spec.C, spec.F);
  std::vector<double> s0{ics.y0, ics.yp0};
  if (!second) s0.push_back(*ics.ypp0);
  Rk45Options opt;
  opt.relTol = 1e-12;
  opt.absTol = 1e-12;
  auto reference = [&](double X) {
    const Rk45Result res = rk45_integrate(model.system, ics.x0, s0, X, opt);
    if (res.error) throw *res.error;
    return Point2{X, res.last_state()[0]};
  };

  const double dx = h / std::sqrt(1.0 + ics.yp0 * ics.yp0);
  const Point2 p1 = reference(ics.x0 + dx);
  spec.K = pair_invariant(r, p0, p1);
  if (!(spec.K > 0.0)) throw NumericError(ErrorKind::DomainViolation, "zero first chord", p0);
  const double x2 =
      bisect([&](double X) { return pair_invariant(r, p1, reference(X)) - spec.K; }, p1.x,
             p1.x + 2.0 * dx);
  const Point2 p2 = reference(x2);
  if (std::abs(pair_invariant(r, p1, p2) - spec.K) > 1e-6 * spec.K)
    throw NumericError(ErrorKind::DomainViolation, "bootstrap could not match the mesh constant", p2);

  if (second) return finish_order2_seed(spec, p0, p1, p2);
  SchemeState st;
  st.spec = spec;
  st.window = {p0, p1, p2};
  st.lastJ1 = J1_of_window(r, st.window);
  st.curvatureSign = cont_I1(r, {ics.x0, ics.yp0, *ics.ypp0, std::nullopt}) < 0.0 ? -1 : 1;
  st.turningRef = turning(r, p0, p1, p2);
  return st;
}

SchemeState seed_from_circle(const SchemeSpec& spec, const CircleSolution& c, double t0, int dir,
                             double h) {
  if (spec.realization != Realization::Sl3)
    throw NumericError(ErrorKind::DomainViolation, "circles solve the sl3 equation");
  return seed_on_conic(spec, c, t0, dir, h);
}

SchemeState seed_from_hyperbola(const SchemeSpec& spec, const HyperbolaSolution& c, double t0,
                                int dir, double h) {
  if (spec.realization != Realization::Sl4)
    throw NumericError(ErrorKind::DomainViolation, "hyperbolas solve the sl4 equation");
  return seed_on_conic(spec, c, t0, dir, h);
}

Trajectory run_scheme(const SchemeState& initial, const StopRule& stop,
                      std::vector<double>* stepSeconds) {
  initial.spec.validate();
  Trajectory traj;
  traj.points = initial.window;
  SchemeState s = initial;
  const Realization r = s.spec.realization;
  using clock = std::chrono::steady_clock;

  for (std::size_t step = 0; step < stop.maxSteps; ++step) {
    const auto t0 = clock::now();
    StepTarget target;
    StepOutcome out;
    try {
      target = step_target(s);
      try {
        out = step_conic(s);
      } catch (const NumericError& conicError) {
        const auto& pts = traj.points;
        const std::size_t n = pts.size();
        const Point2 guess = n >= 3 ? 3.0 * pts[n - 1] - 3.0 * pts[n - 2] + pts[n - 3]
                                    : 2.0 * pts[n - 1] - pts[n - 2];
        try {
          out = newton_fallback_step(s, guess);
        } catch (const NumericError& e) {
          throw NumericError(e.kind(),
                             "conic path: " + conicError.detail() + "; fallback: " + e.detail(),
                             e.where());
        }
      }
    } catch (const NumericError& e) {
      traj.halt = HaltReason::Error;
      traj.error = NumericError(e.kind(), e.detail(), e.where() ? e.where() : traj.points.back(),
                                traj.points.size());
      return traj;
    }
    if (stepSeconds)
      stepSeconds->push_back(std::chrono::duration<double>(clock::now() - t0).count());

    const StepResidual res = step_residual(s, out.point);
    StepDiagnostic d;
    d.J1 = target.J1;
    if (s.spec.order == Order::Third) {
      const auto& w = s.window;
      const double a0 = pair_invariant(r, w[0], w[1]);
      const double a1 = pair_invariant(r, w[1], w[2]);
      d.J2 = r == Realization::Sl3 ? J2_sl3(a0, a1, s.spec.K, s.lastJ1, target.J1)
                                   : J2_sl4(a0, a1, s.spec.K, s.lastJ1, target.J1);
    }
    d.meshResidual = res.mesh;
    d.schemeResidual = res.scheme;
    d.solverIterations = out.iterations;
    d.usedFallback = out.usedFallback;
    traj.diagnostics.push_back(d);
    traj.points.push_back(out.point);
    s = advance(s, out.point);

    if (out.point.x < stop.xMin || out.point.x > stop.xMax) {
      traj.halt = HaltReason::XWindow;
      return traj;
    }
    if (std::abs(out.point.y) > stop.yAbsMax) {
      traj.halt = HaltReason::YBound;
      return traj;
    }
  }
  traj.halt = HaltReason::MaxSteps;
  return traj;
}

}  // namespace invscheme
