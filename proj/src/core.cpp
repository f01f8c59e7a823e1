#include "invscheme/core.hpp"

#include <algorithm>
#include <cmath>

namespace invscheme {

double norm(Point2 p) { return std::hypot(p.x, p.y); }

double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

std::string to_string(Realization r) { return r == Realization::Sl3 ? "sl3" : "sl4"; }

Realization parse_realization(const std::string& text) {
  if (text == "sl3" || text == "Sl3" || text == "SL3") return Realization::Sl3;
  if (text == "sl4" || text == "Sl4" || text == "SL4") return Realization::Sl4;
  throw std::invalid_argument("unknown realization '" + text + "' (expected sl3 or sl4)");
}

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::NoIntersection: return "NoIntersection";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::SingularityDetected: return "SingularityDetected";
  }
  return "Unknown";
}

std::string to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::MaxSteps: return "maxSteps";
    case HaltReason::XWindow: return "xWindow";
    case HaltReason::YBound: return "yBound";
    case HaltReason::Error: return "error";
  }
  return "unknown";
}

NumericError::NumericError(ErrorKind kind, std::string detail, std::optional<Point2> where,
                           std::optional<std::size_t> index)
    : std::runtime_error(to_string(kind) + ": " + detail),
      kind_(kind),
      detail_(std::move(detail)),
      where_(where),
      index_(index) {}

ScalarFunction named_function(const std::string& name) {
  if (name == "square") return {name, [](double u) { return u * u; }};
  if (name == "zero") return {name, [](double) { return 0.0; }};
  if (name == "identity") return {name, [](double u) { return u; }};
  if (name == "cube") return {name, [](double u) { return u * u * u; }};
  throw std::invalid_argument("unknown right-hand side '" + name + "'");
}

void SchemeSpec::validate() const {
  if (order == Order::Second && !C)
    throw NumericError(ErrorKind::DomainViolation, "second-order scheme needs C");
  if (order == Order::Third && !F)
    throw NumericError(ErrorKind::DomainViolation, "third-order scheme needs F");
  if (!(K > 0.0) || !std::isfinite(K))
    throw NumericError(ErrorKind::DomainViolation, "mesh constant K must be positive");
}

bool validate_point(Point2 p, Realization) {
  return std::isfinite(p.x) && std::isfinite(p.y) && p.x > 0.0;
}

bool near_equal(double a, double b, double relTol) {
  return std::abs(a - b) <= relTol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace invscheme
