#include "invscheme/group_action.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "invscheme/rk45.hpp"

namespace invscheme {

namespace {

constexpr double kPoleGuard = 1e-300;

}  // namespace

GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
  GroupElement g{g1.a * g2.a + g1.b * g2.c, g1.a * g2.b + g1.b * g2.d,
                 g1.c * g2.a + g1.d * g2.c, g1.c * g2.b + g1.d * g2.d};
  const double s = std::sqrt(g.det());
  return {g.a / s, g.b / s, g.c / s, g.d / s};
}

Point2 vector_field(Realization r, Generator gen, Point2 p) {
  switch (gen) {
    case Generator::X1: return {0.0, 1.0};
    case Generator::X2: return {p.x, p.y};
    case Generator::X3: {
      const double sign = r == Realization::Sl3 ? -1.0 : 1.0;
      return {2.0 * p.x * p.y, p.y * p.y + sign * p.x * p.x};
    }
  }
  return {};
}

GroupElement one_parameter(Generator gen, double t) {
  switch (gen) {
    case Generator::X1: return {1.0, t, 0.0, 1.0};
    case Generator::X2: return {std::exp(0.5 * t), 0.0, 0.0, std::exp(-0.5 * t)};
    case Generator::X3: return {1.0, 0.0, -t, 1.0};
  }
  return {};
}

Point2 act_sl3(const GroupElement& g, Point2 p) {
  if (!(p.x > 0.0)) throw NumericError(ErrorKind::DomainViolation, "sl3 action needs x > 0", p);
  const std::complex<double> z{p.y, p.x};
  const std::complex<double> den = g.c * z + g.d;
  if (std::abs(den) < kPoleGuard)
    throw NumericError(ErrorKind::DomainViolation, "sl3 action hits a pole", p);
  const std::complex<double> img = (g.a * z + g.b) / den;
  const Point2 out{img.imag(), img.real()};
  if (!validate_point(out, Realization::Sl3))
    throw NumericError(ErrorKind::DomainViolation, "sl3 image left x > 0", p);
  return out;
}

Point2 act_sl4(const GroupElement& g, Point2 p) {
  if (!(p.x > 0.0)) throw NumericError(ErrorKind::DomainViolation, "sl4 action needs x > 0", p);
  const double z = p.y + p.x;
  const double w = p.y - p.x;
  const double dz = g.c * z + g.d;
  const double dw = g.c * w + g.d;
  if (std::abs(dz) < kPoleGuard || std::abs(dw) < kPoleGuard)
    throw NumericError(ErrorKind::DomainViolation, "sl4 action hits a pole", p);
  const double zi = (g.a * z + g.b) / dz;
  const double wi = (g.a * w + g.b) / dw;
  const Point2 out{0.5 * (zi - wi), 0.5 * (zi + wi)};
  if (!validate_point(out, Realization::Sl4))
    throw NumericError(ErrorKind::DomainViolation, "sl4 image left x > 0", p);
  return out;
}

Point2 act(Realization r, const GroupElement& g, Point2 p) {
  return r == Realization::Sl3 ? act_sl3(g, p) : act_sl4(g, p);
}

Point2 flow_oracle(Realization r, Generator gen, double t, Point2 p) {
  FirstOrderSystem sys{2, [r, gen](double, const std::vector<double>& s) {
                         const Point2 v = vector_field(r, gen, {s[0], s[1]});
                         return std::vector<double>{v.x, v.y};
                       }};
  Rk45Options opt;
  opt.relTol = 1e-13;
  opt.absTol = 1e-13;
  opt.blowUp = 1e12;
  const Rk45Result res = rk45_integrate(sys, 0.0, {p.x, p.y}, t, opt);
  if (res.error)
    throw NumericError(ErrorKind::StepUnderflow, "flow left the domain: " + res.error->detail(),
                       p);
  const Point2 out{res.last_state()[0], res.last_state()[1]};
  if (!validate_point(out, r))
    throw NumericError(ErrorKind::StepUnderflow, "flow left x > 0 before time t", p);
  return out;
}

GroupElement random_group_element(std::uint64_t seed, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double shift = scale * u(rng);
  const double logDilation = 0.5 * scale * u(rng);
  const double special = 0.25 * scale * u(rng);
  GroupElement g = compose(one_parameter(Generator::X1, shift),
                           one_parameter(Generator::X2, logDilation));
  g = compose(g, one_parameter(Generator::X3, special));
  // Trailing translation so that every entry is generically nonzero.
  return compose(g, one_parameter(Generator::X1, 0.5 * scale * u(rng)));
}

}  // namespace invscheme
