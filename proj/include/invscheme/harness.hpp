#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invscheme/core.hpp"

namespace invscheme {

enum class Method { Invariant, StandardFD, Rk45 };

std::string to_string(Method m);
Method parse_method(const std::string& text);

/// Invalid or incomplete experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Realization realization = Realization::Sl3;
  Order order = Order::Second;
  double x0 = 1.0, y0 = 0.0;
  std::optional<double> yp0, ypp0, C, a;
  std::string F = "square";
  double h = 0.01;
  std::size_t maxSteps = 5000;
  std::optional<double> xMin, xMax;  // default [max(x0 - 5, x0 / 100), x0 + 5]
  double yBound = 1e8;
  std::vector<Method> methods{Method::Invariant, Method::StandardFD, Method::Rk45};
  std::string output;  // empty: $INVSCHEME_OUT, else "out"
  bool signedCurvature = true;
  std::uint64_t seed = 0;

  /// Throws ConfigError when the config is unusable.
  void validate() const;
  double x_min() const;
  double x_max() const;
  std::string output_dir() const;
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// fig1..fig4 with the caption data, h = 0.01 and 5000 steps.
std::vector<ExperimentConfig> builtin_experiments();
std::optional<ExperimentConfig> builtin_experiment(const std::string& name);

enum class SingularityKind { BlowUp, TangentCrossing };

struct Singularity {
  double x = 0.0;
  std::size_t index = 0;
  SingularityKind kind = SingularityKind::BlowUp;
};

std::string to_string(SingularityKind k);

/// First segment whose secant slope exceeds 1e4 in magnitude, or first point
/// where the x-direction reverses, whichever comes first.
std::optional<Singularity> detect_singularity(const Trajectory& traj);

struct MethodReport {
  Method method = Method::Invariant;
  std::string file;
  Trajectory trajectory;
  double haltX = 0.0;
  double xMaxReached = 0.0;
  std::optional<double> maxConicDistance;  // order 2 with a fitted conic
  std::optional<double> winding;           // circles only, radians about the center
  std::optional<double> maxMeshResidual;   // invariant method
  std::optional<double> maxSchemeResidual;
  // detect_singularity, or a blow-up at haltX when the method itself
  // stopped with SingularityDetected or StepUnderflow.
  std::optional<Singularity> singularity;
  std::optional<double> secondsPerStep;
};

struct RunReport {
  std::string name;
  std::vector<MethodReport> methods;
  std::string reportFile;

  const MethodReport* find(Method m) const;
};

/// Runs every requested method, writes <name>_<method>.csv and
/// <name>_report.json into the output directory. A failing method is
/// recorded in its report, never fatal.
RunReport run_experiment(const ExperimentConfig& cfg);

/// Runs the requested methods without writing anything.
RunReport simulate(const ExperimentConfig& cfg);

/// Median wall time per accepted step for each method. Short runs are
/// repeated until at least 500 steps were timed (at most 50 repeats).
std::map<Method, double> benchmark_step_cost(const ExperimentConfig& cfg);

/// Full-precision CSV: index,x,y plus J1,J2,mesh_residual,scheme_residual
/// for the invariant method.
std::string trajectory_csv(const Trajectory& traj, bool withDiagnostics);
std::vector<Point2> parse_trajectory_csv(const std::string& text);

/// Entry point of the command line tool. Exit codes: 0 success, 1 config or
/// usage error, 2 when every method failed with a NumericError.
int cli_main(int argc, char** argv);

}  // namespace invscheme
