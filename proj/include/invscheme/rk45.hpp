#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "invscheme/core.hpp"

namespace invscheme {

struct FirstOrderSystem {
  std::size_t dimension = 0;
  std::function<std::vector<double>(double, const std::vector<double>&)> rhs;
};

struct Rk45Options {
  double relTol = 1e-10;
  double absTol = 1e-10;
  double initialStep = 0.0;  // 0 selects a starting step automatically
  std::size_t maxSteps = 1000000;
  double blowUp = 1e8;            // any |state_i| above this is a singularity
  double underflowFactor = 1e-14;  // minimum |h| relative to max(|x|, 1)
  // Called after every accepted step (and once at the start).
  std::function<void(double, const std::vector<double>&)> observer;
};

struct Rk45Result {
  std::vector<double> xs;
  std::vector<std::vector<double>> states;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::optional<NumericError> error;

  bool finished() const { return !error; }
  double last_x() const { return xs.back(); }
  const std::vector<double>& last_state() const { return states.back(); }
};

/// Dormand-Prince 5(4) with an elementary step controller (safety 0.9,
/// growth factor clamped to [0.2, 5]). Integrates in either direction.
/// Halts with StepUnderflow when |h| < underflowFactor * max(|x|, 1) and with
/// SingularityDetected when the state exceeds blowUp; both are reported in
/// the result rather than thrown.
Rk45Result rk45_integrate(const FirstOrderSystem& system, double x0, std::vector<double> state0,
                          double xEnd, const Rk45Options& options = {});

/// Graph of the first state component as a trajectory.
Trajectory to_trajectory(const Rk45Result& result);

}  // namespace invscheme
