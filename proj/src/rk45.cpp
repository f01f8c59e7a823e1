#include "invscheme/rk45.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace invscheme {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

using Vec = std::vector<double>;

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out = y;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (const auto& [w, k] : terms) acc += w * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

double weighted_norm(const Vec& err, const Vec& y0, const Vec& y1, double atol, double rtol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    sum += (err[i] / sc) * (err[i] / sc);
  }
  return std::sqrt(sum / static_cast<double>(err.size()));
}

double initial_step(const FirstOrderSystem& sys, double x0, const Vec& y0, const Vec& f0,
                    double dir, const Rk45Options& opt) {
  const Vec zero(y0.size(), 0.0);
  const double d0 = weighted_norm(y0, y0, y0, opt.absTol, opt.relTol);
  const double d1 = weighted_norm(f0, y0, y0, opt.absTol, opt.relTol);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  Vec y1 = axpy(y0, dir * h0, {{1.0, &f0}});
  Vec f1 = sys.rhs(x0 + dir * h0, y1);
  Vec df(y0.size());
  for (std::size_t i = 0; i < df.size(); ++i) df[i] = f1[i] - f0[i];
  const double d2 = weighted_norm(df, y0, y0, opt.absTol, opt.relTol) / h0;
  const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                               : std::pow(0.01 / std::max(d1, d2), 0.2);
  return std::min(100.0 * h0, h1);
}

}  // namespace

Rk45Result rk45_integrate(const FirstOrderSystem& sys, double x0, Vec y, double xEnd,
                          const Rk45Options& opt) {
  if (!(opt.relTol > 0.0) || !(opt.absTol > 0.0))
    throw std::invalid_argument("rk45 tolerances must be positive");
  Rk45Result res;
  res.xs.push_back(x0);
  res.states.push_back(y);
  if (opt.observer) opt.observer(x0, y);
  if (xEnd == x0) return res;

  const double dir = xEnd > x0 ? 1.0 : -1.0;
  double x = x0;
  Vec k1 = sys.rhs(x, y);
  double h = opt.initialStep > 0.0 ? opt.initialStep : initial_step(sys, x, y, k1, dir, opt);
  h = std::min(h, std::abs(xEnd - x0));

  while (dir * (xEnd - x) > 0.0) {
    if (res.accepted + res.rejected >= opt.maxSteps) {
      res.error = NumericError(ErrorKind::StepUnderflow, "step budget exhausted",
                               Point2{x, y.empty() ? 0.0 : y[0]}, res.accepted);
      return res;
    }
    const double minStep = opt.underflowFactor * std::max(std::abs(x), 1.0);
    if (h < minStep) {
      res.error = NumericError(ErrorKind::StepUnderflow,
                               "step size fell below " + std::to_string(minStep) + " at x = " +
                                   std::to_string(x),
                               Point2{x, y.empty() ? 0.0 : y[0]}, res.accepted);
      return res;
    }
    bool last = false;
    if (h >= std::abs(xEnd - x)) {
      h = std::abs(xEnd - x);
      last = true;
    }
    const double hs = dir * h;

    Vec y5, k7;
    double errNorm = 0.0;
    bool ok = true;
    try {
      const Vec k2 = sys.rhs(x + c2 * hs, axpy(y, hs, {{a21, &k1}}));
      const Vec k3 = sys.rhs(x + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
      const Vec k4 = sys.rhs(x + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const Vec k5 =
          sys.rhs(x + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const Vec k6 = sys.rhs(
          x + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      y5 = axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      k7 = sys.rhs(x + hs, y5);
      Vec err(y.size());
      for (std::size_t i = 0; i < err.size(); ++i)
        err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                       e7 * k7[i]);
      ok = all_finite(y5) && all_finite(k7) && all_finite(err);
      if (ok) errNorm = weighted_norm(err, y, y5, opt.absTol, opt.relTol);
    } catch (const NumericError&) {
      ok = false;  // rhs left its domain inside the step: shrink
    }

    if (!ok || errNorm > 1.0) {
      ++res.rejected;
      const double factor =
          ok ? std::max(kMinFactor, kSafety * std::pow(errNorm, -0.2)) : kMinFactor;
      h *= factor;
      continue;
    }

    x = last ? xEnd : x + hs;
    y = std::move(y5);
    k1 = std::move(k7);
    ++res.accepted;
    res.xs.push_back(x);
    res.states.push_back(y);
    if (opt.observer) opt.observer(x, y);

    for (double v : y) {
      if (std::abs(v) > opt.blowUp) {
        res.error = NumericError(ErrorKind::SingularityDetected,
                                 "state exceeded " + std::to_string(opt.blowUp) + " at x = " +
                                     std::to_string(x),
                                 Point2{x, y[0]}, res.accepted);
        return res;
      }
    }

    const double factor =
        errNorm == 0.0 ? kMaxFactor
                       : std::clamp(kSafety * std::pow(errNorm, -0.2), kMinFactor, kMaxFactor);
    h *= factor;
  }
  return res;
}

Trajectory to_trajectory(const Rk45Result& result) {
  Trajectory t;
  t.points.reserve(result.xs.size());
  for (std::size_t i = 0; i < result.xs.size(); ++i)
    t.points.push_back({result.xs[i], result.states[i].empty() ? 0.0 : result.states[i][0]});
  if (result.error) {
    t.halt = HaltReason::Error;
    t.error = result.error;
  } else {
    t.halt = HaltReason::XWindow;
  }
  return t;
}

}  // namespace invscheme
