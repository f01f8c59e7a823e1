// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "invscheme/baselines.hpp"
#include "invscheme/exact.hpp"
#include "invscheme/group_action.hpp"
#include "invscheme/harness.hpp"
#include "invscheme/invariants.hpp"
#include "invscheme/rk45.hpp"
#include "invscheme/schemes.hpp"
#include "support.hpp"

using namespace invscheme;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& measured) {
  std::printf("%s  [%2d] %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), measured.c_str());
  if (!ok) ++failures;
}

void info(const std::string& what, const std::string& measured) {
  std::printf("INFO       %s: %s\n", what.c_str(), measured.c_str());
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig only(const std::string& name, Method m) {
  ExperimentConfig c = *builtin_experiment(name);
  c.methods = {m};
  return c;
}

double max_residual(const MethodReport& m) {
  return std::max(m.maxMeshResidual.value_or(0.0), m.maxSchemeResidual.value_or(0.0));
}

void circle_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport r = simulate(only("fig1", Method::Invariant));
  const double secs = seconds_since(t0);
  const MethodReport& m = r.methods[0];
  const bool ok = m.trajectory.points.size() >= 600 && m.winding && *m.winding >= 2.0 * std::numbers::pi &&
                  *m.maxConicDistance <= 1e-3 && max_residual(m) <= 1e-9 && secs < 5.0;
  report(1, ok, "circle exactness (fig1)",
         fmt("%zu points, winding %.2f rad, max conic distance %.2e, max step residual %.1e, %.3f s",
             m.trajectory.points.size(), m.winding.value_or(0.0), m.maxConicDistance.value_or(-1.0),
             max_residual(m), secs));
}

void hyperbola_exactness() {
  const RunReport r = simulate(only("fig3", Method::Invariant));
  const MethodReport& m = r.methods[0];
  const auto& s = m.singularity;
  const std::size_t after = s ? m.trajectory.points.size() - 1 - s->index : 0;
  const bool ok = s && s->x > 3.99 && after >= 10 && *m.maxConicDistance <= 1e-3;
  report(2, ok, "hyperbola exactness (fig3)",
         fmt("%s at x = %.6f, %zu points after it, max conic distance %.2e",
             s ? to_string(s->kind).c_str() : "no vertex crossing", s ? s->x : 0.0, after,
             m.maxConicDistance.value_or(-1.0)));
}

void singularity_location() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport r = simulate(only("fig2", Method::Rk45));
  const double secs = seconds_since(t0);
  const MethodReport& m = r.methods[0];
  const auto& e = m.trajectory.error;
  const bool kindOk = e && (e->kind() == ErrorKind::StepUnderflow ||
                            e->kind() == ErrorKind::SingularityDetected);
  const bool ok = kindOk && m.haltX >= 1.23 && m.haltX <= 1.33 && secs < 5.0;
  report(3, ok, "singularity location (fig2, RK4(5))",
         fmt("%s at x = %.6f, %.3f s", e ? to_string(e->kind()).c_str() : "no halt", m.haltX, secs));
}

void continuation() {
  bool ok = true;
  std::string measured;
  for (const char* name : {"fig2", "fig4"}) {
    ExperimentConfig c = *builtin_experiment(name);
    c.methods = {Method::Invariant, Method::Rk45};
    const RunReport r = simulate(c);
    const MethodReport& inv = *r.find(Method::Invariant);
    const MethodReport& rk = *r.find(Method::Rk45);
    double ymax = 0.0;
    for (const Point2& p : inv.trajectory.points) ymax = std::max(ymax, std::abs(p.y));
    const double beyond = inv.xMaxReached - rk.haltX;
    ok = ok && beyond >= 0.05 && ymax < 1e3 && max_residual(inv) <= 1e-10;
    measured += fmt("%s%s: invariant x_max %.6f vs baseline halt %.6f (%+.2e), max |y| %.3g, residual %.1e",
                    measured.empty() ? "" : "; ", name, inv.xMaxReached, rk.haltX, beyond, ymax,
                    max_residual(inv));
    if (inv.singularity && inv.singularity->kind == SingularityKind::TangentCrossing)
      info(std::string("invariant scheme passes the vertical tangent (") + name + ")",
           fmt("turns at x = %.6f and continues for %zu points with max |y| %.3g", inv.singularity->x,
               inv.trajectory.points.size() - 1 - inv.singularity->index, ymax));
  }
  report(4, ok, "continuation beyond the baseline halt (fig2, fig4)", measured);
}

void baseline_failure() {
  const RunReport r = simulate(only("fig1", Method::StandardFD));
  const MethodReport& m = r.methods[0];
  const auto& e = m.trajectory.error;
  const bool diverged = e && e->kind() == ErrorKind::NewtonDivergence && m.haltX < 3.0;
  const bool inaccurate = m.maxConicDistance && *m.maxConicDistance > 0.1;
  report(5, diverged || inaccurate, "standard FD fails before the tangent (fig1, h = 0.01)",
         fmt("%s at x = %.4f, max conic distance %.2e", e ? to_string(e->kind()).c_str() : "no error",
             m.haltX, m.maxConicDistance.value_or(-1.0)));
}

void group_invariance() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worstInv = 0.0;
  int trials = 0;
  for (Realization r : {Realization::Sl3, Realization::Sl4}) {
    int done = 0;
    for (std::uint64_t seed = 0; done < 1000 && seed < 10000; ++seed) {
      const GroupElement g = random_group_element(seed, 1.0);
      const Point2 a{0.5 + u(rng), 2.0 * u(rng) - 1.0};
      const double dx = 0.2 * (u(rng) - 0.5);
      const Point2 c{a.x + dx, a.y + std::abs(dx) + 0.05 + 0.2 * u(rng)};
      try {
        const Point2 ga = act(r, g, a), gc = act(r, g, c);
        const double i1 = r == Realization::Sl3 ? disc_I1_sl3(a, c) : disc_I1_sl4(a, c);
        const double i2 = r == Realization::Sl3 ? disc_I2_sl3(a, c) : disc_I2_sl4(a, c);
        const double j1 = r == Realization::Sl3 ? disc_I1_sl3(ga, gc) : disc_I1_sl4(ga, gc);
        const double j2 = r == Realization::Sl3 ? disc_I2_sl3(ga, gc) : disc_I2_sl4(ga, gc);
        worstInv = std::max({worstInv, std::abs(j1 - i1) / i1, std::abs(j2 - i2) / i2});
        ++done;
      } catch (const NumericError&) {
      }
    }
    trials += done;
  }
  double worstFlow = 0.0;
  for (Realization r : {Realization::Sl3, Realization::Sl4})
    for (Generator gen : {Generator::X1, Generator::X2, Generator::X3})
      for (int i = 0; i < 20; ++i) {
        const Point2 p{0.5 + 0.125 * (i % 5), -0.5 + (i / 5) / 3.0};
        const double t = i % 2 ? 0.5 : -0.25;
        const Point2 a = act(r, one_parameter(gen, t), p), b = flow_oracle(r, gen, t, p);
        worstFlow = std::max(worstFlow, norm(a - b) / (1.0 + norm(b)));
      }
  report(6, trials >= 2000 && worstInv <= 1e-10 && worstFlow <= 1e-8, "group invariance",
         fmt("%d in-domain actions, max relative change %.1e; closed form vs flow %.1e on 20 points "
             "per generator",
             trials, worstInv, worstFlow));
}

void continuous_limit() {
  double worst = 1e9;
  std::string measured;
  for (Realization r : {Realization::Sl3, Realization::Sl4}) {
    const testsupport::Curve c = r == Realization::Sl3 ? testsupport::sl3_curve() : testsupport::sl4_curve();
    const double xc = 1.0;
    std::vector<double> hs, e1, e2;
    for (double h : {0.02, 0.01, 0.005, 0.0025}) {
      const std::array<Point2, 3> w3{c.at(xc - h), c.at(xc), c.at(xc + h)};
      const std::array<Point2, 4> w4{c.at(xc - 1.5 * h), c.at(xc - 0.5 * h), c.at(xc + 0.5 * h),
                                     c.at(xc + 1.5 * h)};
      hs.push_back(h);
      e1.push_back(std::abs(J1_of_window(r, w3) - std::abs(cont_I1(r, c.jet(xc)))));
      e2.push_back(std::abs(J2_of_window(r, w4) - cont_I2(r, c.jet(xc))));
    }
    const double o1 = testsupport::fitted_order(hs, e1), o2 = testsupport::fitted_order(hs, e2);
    worst = std::min({worst, o1, o2});
    measured += fmt("%s%s J1 order %.2f, J2 order %.2f", measured.empty() ? "" : "; ",
                    to_string(r).c_str(), o1, o2);
  }
  report(7, worst >= 0.9, "continuous limit", measured);
}

void oracle_equivalence() {
  std::mt19937_64 rng(8);
  double worstAgree = 0.0, worstReduce = 0.0;
  int pairs = 0;
  bool complete = true;
  for (Realization r : {Realization::Sl3, Realization::Sl4}) {
    for (Order o : {Order::Second, Order::Third}) {
      int n = 0;
      for (int attempt = 0; n < 100 && attempt < 2000; ++attempt) {
        const auto w = testsupport::random_window(r, o, rng);
        if (!w) continue;
        const auto& [s, guess] = *w;
        try {
          const Point2 a = step_conic(s).point;
          const Point2 b = newton_fallback_step(s, guess).point;
          worstAgree = std::max(worstAgree, norm(a - b));
          const auto [line, conic] = reduce_to_line_conic(s);
          for (const Point2& p : intersect_line_conic(line, conic)) {
            if (!validate_point(p, r)) continue;
            const StepResidual res = step_residual(s, p);
            worstReduce = std::max({worstReduce, res.mesh / s.spec.K, res.scheme / s.spec.K});
          }
          ++n;
        } catch (const NumericError&) {
        }
      }
      complete = complete && n == 100;
      pairs += n;
    }
  }
  report(8, complete && worstAgree <= 1e-10 && worstReduce <= 1e-9, "conic path vs Newton oracle",
         fmt("%d windows, max disagreement %.1e, reduction roots solve the invariant system to %.1e "
             "(relative to K)",
             pairs, worstAgree, worstReduce));
}

void stencil_and_integrator() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double h = 0.05 + 0.2 * (u(rng) + 1.0);
    double c[5];
    for (double& v : c) v = u(rng);
    const std::array<double, 4> xs{-1.5 * h, -0.5 * h, 0.5 * h, 1.5 * h};
    std::array<double, 4> y4{}, y3{};
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k <= 4; ++k) {
        y4[i] += c[k] * std::pow(xs[i], k);
        if (k <= 3) y3[i] += c[k] * std::pow(xs[i], k);
      }
    auto rel = [](double got, double want, double scale) { return std::abs(got - want) / scale; };
    // Scale: the largest term of the combination, so 1e-12 is a relative bound.
    double s1 = 0, s2 = 0, s3 = 0;
    for (int i = 0; i < 4; ++i) {
      s1 = std::max(s1, 28.0 * std::abs(y4[i]) / (24.0 * h));
      s2 = std::max(s2, 2.0 * std::abs(y3[i]) / (2.0 * h * h));
      s3 = std::max(s3, 3.0 * std::abs(y4[i]) / (h * h * h));
    }
    worst = std::max({worst, rel(stencil_d1_4pt(y4, h), c[1], s1),
                      rel(stencil_d2_4pt(y3, h), 2.0 * c[2], s2),
                      rel(stencil_d3_4pt(y4, h), 6.0 * c[3], s3)});
  }
  const FirstOrderSystem exp1{1, [](double, const std::vector<double>& s) { return s; }};
  const Rk45Result e = rk45_integrate(exp1, 0.0, {1.0}, 1.0);
  const double eErr = std::abs(e.last_state()[0] - std::numbers::e);
  report(9, worst <= 1e-12 && eErr <= 1e-8, "stencil exactness and RK4(5) accuracy",
         fmt("stencils (d1, d3 on quartics, d2 on cubics) max relative error %.1e; |y(1) - e| = %.1e",
             worst, eErr));
}

void ode_consistency() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const ScalarFunction sq = named_function("square");
  double worstOn = 0.0;
  bool iff = true;
  int jets = 0;
  for (Realization r : {Realization::Sl3, Realization::Sl4}) {
    for (int n = 0; n < 100;) {
      const double p = u(rng);
      if (r == Realization::Sl4 && std::abs(p) < 1.05) continue;
      JetPoint j{0.3 + std::abs(u(rng)), p, u(rng), std::nullopt};
      j.yppp = solve_top_derivative(r, Order::Third, j, {}, sq);
      const double i1 = cont_I1(r, j);
      const double lead = r == Realization::Sl3 ? j.x * j.x * (1.0 + p * p) : 2.0 * j.x * j.x * std::abs(p * p - 1.0);
      worstOn = std::max({worstOn, std::abs(expanded_residual(r, j)) / (lead * (1.0 + std::abs(*j.yppp))),
                          std::abs(cont_I2(r, j) - i1 * i1) / (1.0 + i1 * i1)});
      JetPoint off = j;
      *off.yppp += 0.01 * (1.0 + std::abs(*j.yppp));
      iff = iff && std::abs(expanded_residual(r, off)) > 1e-9 && std::abs(cont_I2(r, off) - i1 * i1) > 1e-9;
      ++n;
      ++jets;
    }
  }
  report(10, worstOn <= 1e-9 && iff, "ODE consistency (expanded equations vs I2 = I1^2)",
         fmt("%d jets, max scaled residual on solutions %.1e, both forms nonzero off solutions: %s", jets,
             worstOn, iff ? "yes" : "no"));
}

void cost_report() {
  bool ok = true;
  std::string measured;
  for (const char* name : {"fig2", "fig4"}) {
    const auto costs = benchmark_step_cost(*builtin_experiment(name));
    ok = ok && costs.size() == 3;
    auto get = [&](Method m) { return costs.count(m) ? costs.at(m) : -1.0; };
    const double inv = get(Method::Invariant), fd = get(Method::StandardFD), rk = get(Method::Rk45);
    measured += fmt("%s%s: invariant %.2e s, standard_fd %.2e s, rk45 %.2e s per step (invariant <= fd: %s)",
                    measured.empty() ? "" : "; ", name, inv, fd, rk, inv <= fd ? "yes" : "no");
  }
  report(11, ok, "cost report", measured);
}

}  // namespace

int main() {
  circle_exactness();
  hyperbola_exactness();
  singularity_location();
  continuation();
  baseline_failure();
  group_invariance();
  continuous_limit();
  oracle_equivalence();
  stencil_and_integrator();
  ode_consistency();
  cost_report();
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
