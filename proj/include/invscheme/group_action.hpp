#pragma once

#include <cstdint>

#include "invscheme/core.hpp"

namespace invscheme {

/// Element of SL(2,R), stored as the matrix [[a, b], [c, d]] with ad - bc = 1.
struct GroupElement {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
};

/// Matrix product g1 * g2, rescaled back to unit determinant.
GroupElement compose(const GroupElement& g1, const GroupElement& g2);

enum class Generator { X1, X2, X3 };

/// Vector field of a generator: X1 = d_y, X2 = x d_x + y d_y,
/// X3 = 2xy d_x + (y^2 -/+ x^2) d_y (minus for sl3, plus for sl4).
Point2 vector_field(Realization r, Generator gen, Point2 p);

/// exp(t X) as a matrix: X1 -> (1, t; 0, 1), X2 -> diag(e^{t/2}, e^{-t/2}),
/// X3 -> (1, 0; -t, 1).
GroupElement one_parameter(Generator gen, double t);

// sl3 acts by the Moebius map on z = y + i x, which preserves x > 0.
Point2 act_sl3(const GroupElement& g, Point2 p);
// sl4 acts by the same real Moebius map on z = y + x and on w = y - x.
Point2 act_sl4(const GroupElement& g, Point2 p);
Point2 act(Realization r, const GroupElement& g, Point2 p);

/// Time-t flow of a generator, integrated numerically (tolerance 1e-13).
/// Independent of the closed-form actions; used as their ground truth.
Point2 flow_oracle(Realization r, Generator gen, double t, Point2 p);

/// Deterministic pseudo-random element. Translation, dilation and the X3
/// parameter are drawn with spread proportional to scale.
GroupElement random_group_element(std::uint64_t seed, double scale);

}  // namespace invscheme
