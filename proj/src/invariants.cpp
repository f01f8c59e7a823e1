#include "invscheme/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace invscheme {

namespace {

// Radicands this far below zero are rounding noise on an exact zero.
constexpr double kRadicandFloor = -1e-12;

double require_third(const JetPoint& j) {
  if (!j.yppp) throw NumericError(ErrorKind::DomainViolation, "jet has no third derivative");
  return *j.yppp;
}

double checked_sqrt(double radicand, const char* what, Point2 where = {}) {
  if (!(radicand >= kRadicandFloor))
    throw NumericError(ErrorKind::DomainViolation, std::string(what) + ": negative radicand",
                       where);
  return std::sqrt(std::max(radicand, 0.0));
}

}  // namespace

double cont_I1_sl3(const JetPoint& j) {
  const double s = 1.0 + j.yp * j.yp;
  return (j.yp * s - j.x * j.ypp) / (s * std::sqrt(s));
}

double cont_I2_sl3(const JetPoint& j) {
  const double yppp = require_third(j);
  const double s = 1.0 + j.yp * j.yp;
  const double x2 = j.x * j.x;
  return (3.0 * x2 * j.yp * j.ypp * j.ypp - x2 * yppp * s) / (s * s * s);
}

double cont_I1_sl4(const JetPoint& j) {
  const double s = j.yp * j.yp - 1.0;
  if (!(s > 0.0))
    throw NumericError(ErrorKind::DomainViolation, "sl4 I1 needs |y'| > 1", Point2{j.x, 0.0});
  return (j.x * j.ypp + j.yp * s) / (s * std::sqrt(s));
}

double cont_I2_sl4(const JetPoint& j) {
  const double yppp = require_third(j);
  const double p = j.yp;
  if (p == 1.0 || p == -1.0)
    throw NumericError(ErrorKind::DomainViolation, "sl4 I2 needs |y'| != 1", Point2{j.x, 0.0});
  const double x = j.x;
  const double q = j.ypp;
  const double num = 2.0 * x * x * (p + 1.0) * yppp +
                     3.0 * ((p - 1.0) * (p + 1.0) * (p + 1.0) * (3.0 * p * p - 1.0) +
                            4.0 * x * p * (p + 1.0) * q - 2.0 * x * x * q * q);
  const double den = (p - 1.0) * (p - 1.0) * (p + 1.0) * (p + 1.0) * (p + 1.0);
  return num / den;
}

double cont_I1(Realization r, const JetPoint& j) {
  return r == Realization::Sl3 ? cont_I1_sl3(j) : cont_I1_sl4(j);
}

double cont_I2(Realization r, const JetPoint& j) {
  return r == Realization::Sl3 ? cont_I2_sl3(j) : cont_I2_sl4(j);
}

double disc_I1_sl3(Point2 a, Point2 b) {
  const double prod = a.x * b.x;
  if (!(prod > 0.0))
    throw NumericError(ErrorKind::DomainViolation, "sl3 invariant needs x_a * x_b > 0", a);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return std::sqrt((dx * dx + dy * dy) / prod);
}

double disc_I2_sl3(Point2 a, Point2 c) { return disc_I1_sl3(a, c); }

double disc_I1_sl4(Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  // (dy^2 - dx^2) as a product keeps the sign exact for nearly null pairs.
  const double num = (dy - dx) * (dy + dx);
  const double den = 4.0 * a.x * b.x - num;
  if (!(num >= 0.0) || !(den > 0.0))
    throw NumericError(ErrorKind::DomainViolation, "sl4 invariant outside its real domain", a);
  return std::sqrt(num / den);
}

double disc_I2_sl4(Point2 a, Point2 c) { return disc_I1_sl4(a, c); }

double pair_invariant(Realization r, Point2 a, Point2 b) {
  return r == Realization::Sl3 ? disc_I1_sl3(a, b) : disc_I1_sl4(a, b);
}

DiscreteInvariantTriple triple_of(Realization r, Point2 a, Point2 b, Point2 c) {
  return {pair_invariant(r, a, b), pair_invariant(r, b, c), pair_invariant(r, a, c)};
}

double j1_radicand(Realization r, const DiscreteInvariantTriple& t) {
  const double sum = t.i1n + t.i1n1;
  const double den = t.i1n * t.i1n1 * sum;
  if (!(t.i1n > 0.0) || !(t.i1n1 > 0.0))
    throw NumericError(ErrorKind::DomainViolation, "J1 needs nonzero chords");
  if (r == Realization::Sl3) return 1.0 - 8.0 * (t.i2n1 - sum) / den;
  return 2.0 * ((t.i2n1 - sum) / den - 1.0);
}

double J1_sl3(const DiscreteInvariantTriple& t) {
  return checked_sqrt(j1_radicand(Realization::Sl3, t), "sl3 J1");
}

double J1_sl4(const DiscreteInvariantTriple& t) {
  return checked_sqrt(j1_radicand(Realization::Sl4, t), "sl4 J1");
}

double J1(Realization r, const DiscreteInvariantTriple& t) {
  return r == Realization::Sl3 ? J1_sl3(t) : J1_sl4(t);
}

double J2_sl3(double i1n, double i1n1, double i1n2, double j1n1, double j1n2) {
  const double sum = i1n + i1n1 + i1n2;
  if (!(sum > 0.0)) throw NumericError(ErrorKind::DomainViolation, "J2 needs a positive I1 sum");
  return 3.0 / sum * (j1n2 - j1n1);
}

double J2_sl4(double i1n, double i1n1, double i1n2, double j1n1, double j1n2) {
  // The bare J1 in 6 J1^2 is the earlier window's value.
  return J2_sl3(i1n, i1n1, i1n2, j1n1, j1n2) + 6.0 * j1n1 * j1n1 + 3.0;
}

double outer_invariant_for(Realization r, double i1n, double i1n1, double j1) {
  const double sum = i1n + i1n1;
  const double prod = i1n * i1n1 * sum;
  if (r == Realization::Sl3) return sum - (j1 * j1 - 1.0) * prod / 8.0;
  return sum + prod * (1.0 + 0.5 * j1 * j1);
}

double J1_of_window(Realization r, std::span<const Point2> w) {
  return J1(r, triple_of(r, w[0], w[1], w[2]));
}

double J2_of_window(Realization r, std::span<const Point2> w) {
  const double i1n = pair_invariant(r, w[0], w[1]);
  const double i1n1 = pair_invariant(r, w[1], w[2]);
  const double i1n2 = pair_invariant(r, w[2], w[3]);
  const double j1n1 = J1(r, {i1n, i1n1, pair_invariant(r, w[0], w[2])});
  const double j1n2 = J1(r, {i1n1, i1n2, pair_invariant(r, w[1], w[3])});
  return r == Realization::Sl3 ? J2_sl3(i1n, i1n1, i1n2, j1n1, j1n2)
                               : J2_sl4(i1n, i1n1, i1n2, j1n1, j1n2);
}

double turning(Realization r, Point2 a, Point2 b, Point2 c) {
  if (r == Realization::Sl3) {
    using cplx = std::complex<double>;
    const cplx za{a.y, a.x}, zb{b.y, b.x}, zc{c.y, c.x};
    const cplx prod = (za - std::conj(zb)) * (zb - std::conj(zc)) * (zc - std::conj(za));
    const double mag = std::abs(prod);
    if (!(mag > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return prod.real() / mag;
  }
  // Light-cone coordinates z = y + x, w = y - x.
  const double z1 = a.y + a.x, w1 = a.y - a.x;
  const double z2 = b.y + b.x, w2 = b.y - b.x;
  const double z3 = c.y + c.x, w3 = c.y - c.x;
  const double num = (z1 - w2) * (z2 - w3) * (z3 - w1);
  const double den = (z1 - w3) * (z2 - w1) * (z3 - w2);
  if (num == 0.0 || den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::log(std::abs(num / den));
}

}  // namespace invscheme
