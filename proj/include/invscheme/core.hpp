#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace invscheme {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

double norm(Point2 p);
double dot(Point2 a, Point2 b);

/// Which sl(2,R) realization the formulas refer to. Both act on x > 0.
enum class Realization { Sl3, Sl4 };

enum class Order { Second = 2, Third = 3 };

std::string to_string(Realization r);
Realization parse_realization(const std::string& text);

enum class ErrorKind {
  DomainViolation,
  NoIntersection,
  NewtonDivergence,
  StepUnderflow,
  SingularityDetected,
};

std::string to_string(ErrorKind kind);

/// Numerical failure raised by every module. Carries either the point or the
/// index at which it happened; SingularityDetected always carries an x.
class NumericError : public std::runtime_error {
 public:
  NumericError(ErrorKind kind, std::string detail, std::optional<Point2> where = std::nullopt,
               std::optional<std::size_t> index = std::nullopt);

  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }
  const std::optional<Point2>& where() const { return where_; }
  const std::optional<std::size_t>& index() const { return index_; }

 private:
  ErrorKind kind_;
  std::string detail_;
  std::optional<Point2> where_;
  std::optional<std::size_t> index_;
};

/// Right-hand side F of the third-order equation I2 = F(I1).
struct ScalarFunction {
  std::string name;
  std::function<double(double)> fn;

  double operator()(double u) const { return fn(u); }
  explicit operator bool() const { return static_cast<bool>(fn); }
};

/// Named right-hand sides: "square" (u^2), "zero", "identity", "cube".
ScalarFunction named_function(const std::string& name);

struct SchemeSpec {
  Realization realization = Realization::Sl3;
  Order order = Order::Second;
  std::optional<double> C;  // second-order invariant constant
  ScalarFunction F;         // third-order right-hand side
  double K = 0.0;           // mesh constant: common value of consecutive I1
  // When false the third-order scheme uses the unsigned J1 as is
  // (J2 = F(J1)); when true the curvature sign fixed at bootstrap is applied.
  bool signedCurvature = true;

  /// Throws DomainViolation when the order-specific data is missing or K <= 0.
  void validate() const;
};

struct StepDiagnostic {
  double J1 = 0.0;
  std::optional<double> J2;
  double meshResidual = 0.0;
  double schemeResidual = 0.0;
  int solverIterations = 0;
  bool usedFallback = false;
};

enum class HaltReason { MaxSteps, XWindow, YBound, Error };

std::string to_string(HaltReason reason);

struct Trajectory {
  std::vector<Point2> points;
  std::vector<StepDiagnostic> diagnostics;
  HaltReason halt = HaltReason::MaxSteps;
  std::optional<NumericError> error;
};

/// True iff p lies in the admissible half-plane x > 0 (both realizations).
bool validate_point(Point2 p, Realization realization);

/// |a - b| <= relTol * (1 + max(|a|, |b|)).
bool near_equal(double a, double b, double relTol);

}  // namespace invscheme
