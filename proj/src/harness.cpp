#include "invscheme/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "invscheme/baselines.hpp"
#include "invscheme/exact.hpp"
#include "invscheme/invariants.hpp"
#include "invscheme/rk45.hpp"
#include "invscheme/schemes.hpp"

namespace invscheme {

using nlohmann::json;

namespace {

// Start offset used when x0 sits on a vertical tangent of the exact conic.
constexpr double kTangentNudge = 1e-6;
constexpr double kSlopeLimit = 1e4;
constexpr std::size_t kMinTimedSteps = 500;
constexpr int kMaxTimedRepeats = 50;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}

using Conic = std::variant<std::monostate, CircleSolution, HyperbolaSolution>;

// Exact solution the order-2 experiment starts on, with the marching
// direction in its parameter (the one that increases x first; +1 on a tie).
struct ConicStart {
  Conic conic;
  double t0 = 0.0;
  int dir = 1;
};

template <class S>
int march_direction(const S& s, double t0) {
  const double d = 1e-4;
  const double plus = s.at(t0 + d).x, minus = s.at(t0 - d).x;
  if (std::abs(plus - minus) <= 1e-12 * std::max(1.0, std::abs(plus))) return 1;
  return plus > minus ? 1 : -1;
}

std::optional<ConicStart> conic_start(const ExperimentConfig& cfg) {
  if (cfg.order != Order::Second || !cfg.a) return std::nullopt;
  ConicStart out;
  const Point2 p0{cfg.x0, cfg.y0};
  if (cfg.realization == Realization::Sl3) {
    const auto fits = fit_circle(cfg.x0, cfg.y0, *cfg.C, *cfg.a);
    auto it = std::find_if(fits.begin(), fits.end(), [](const auto& c) { return c.cx >= 0.0; });
    const CircleSolution c = it != fits.end() ? *it : fits.front();
    out.t0 = parameter_of(c, p0);
    out.dir = march_direction(c, out.t0);
    out.conic = c;
  } else {
    const auto fits = fit_hyperbola(cfg.x0, cfg.y0, *cfg.C, *cfg.a);
    auto it = std::find_if(fits.begin(), fits.end(), [](const auto& c) { return c.cx >= 0.0; });
    const HyperbolaSolution c = it != fits.end() ? *it : fits.front();
    out.t0 = parameter_of(c, p0);
    out.dir = march_direction(c, out.t0);
    out.conic = c;
  }
  return out;
}

double distance_to(const Conic& c, Point2 p) {
  if (const auto* s = std::get_if<CircleSolution>(&c)) return conic_distance(*s, p);
  return conic_distance(std::get<HyperbolaSolution>(c), p);
}

// Graph y(x) of the branch of the conic the march starts on, with its first
// two derivatives by implicit differentiation.
struct Branch {
  std::function<double(double)> y;
  std::function<double(double)> slope;
  std::function<double(double)> curvature;  // y''
};

Branch branch_of(const ConicStart& cs) {
  return std::visit(
      [&](const auto& s) -> Branch {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, std::monostate>) {
          return {};
        } else {
          const double side = s.at(cs.t0 + cs.dir * 1e-3).y >= s.cy ? 1.0 : -1.0;
          constexpr bool circle = std::is_same_v<S, CircleSolution>;
          auto y = [s, side](double x) {
            const double u = x - s.cx;
            const double rad = circle ? s.r * s.r - u * u : u * u - s.r * s.r;
            if (rad < 0.0)
              throw NumericError(ErrorKind::DomainViolation, "x outside the conic's range");
            return s.cy + side * std::sqrt(rad);
          };
          auto slope = [s, y](double x) {
            const double u = x - s.cx, v = y(x) - s.cy;
            return circle ? -u / v : u / v;
          };
          auto curvature = [s, y, slope](double x) {
            const double p = slope(x), v = y(x) - s.cy;
            return circle ? -(1.0 + p * p) / v : (1.0 - p * p) / v;
          };
          return {y, slope, curvature};
        }
      },
      cs.conic);
}

StopRule stop_rule(const ExperimentConfig& cfg) {
  return {cfg.maxSteps, cfg.x_min(), cfg.x_max(), cfg.yBound};
}

SchemeSpec spec_of(const ExperimentConfig& cfg) {
  SchemeSpec s;
  s.realization = cfg.realization;
  s.order = cfg.order;
  s.C = cfg.C;
  if (cfg.order == Order::Third) s.F = named_function(cfg.F);
  s.signedCurvature = cfg.signedCurvature;
  return s;
}

Trajectory error_trajectory(const ExperimentConfig& cfg, const NumericError& e) {
  Trajectory t;
  t.points = {{cfg.x0, cfg.y0}};
  t.halt = HaltReason::Error;
  t.error = e;
  return t;
}

Trajectory run_invariant(const ExperimentConfig& cfg, std::vector<double>* times) {
  const SchemeSpec spec = spec_of(cfg);
  SchemeState st;
  if (const auto cs = conic_start(cfg)) {
    if (const auto* c = std::get_if<CircleSolution>(&cs->conic))
      st = seed_from_circle(spec, *c, cs->t0, cs->dir, cfg.h);
    else
      st = seed_from_hyperbola(spec, std::get<HyperbolaSolution>(cs->conic), cs->t0, cs->dir,
                               cfg.h);
  } else {
    st = bootstrap(spec, {cfg.x0, cfg.y0, *cfg.yp0, cfg.ypp0}, cfg.h);
  }
  return run_scheme(st, stop_rule(cfg), times);
}

// Initial data for the x-marching baselines: start x, y, y' (and y''), and
// the signed C of the branch. The exact conics solve I1^2 = C^2, and on a
// given arc I1 is +C or -C; the baselines need the signed equation.
struct ClassicalStart {
  double x = 0.0;
  std::vector<double> state;
  std::optional<double> C;
};

ClassicalStart classical_start(const ExperimentConfig& cfg) {
  if (const auto cs = conic_start(cfg)) {
    const Branch b = branch_of(*cs);
    double x = cfg.x0;
    double slope = b.slope(x);
    if (!std::isfinite(slope)) {
      x += kTangentNudge;
      slope = b.slope(x);
    }
    const double i1 = cont_I1(cfg.realization, {x, slope, b.curvature(x), std::nullopt});
    return {x, {b.y(x), slope}, std::copysign(std::abs(*cfg.C), i1)};
  }
  std::vector<double> s{cfg.y0, *cfg.yp0};
  if (cfg.order == Order::Third) s.push_back(*cfg.ypp0);
  return {cfg.x0, s, cfg.C};
}

OdeModel model_of(const ExperimentConfig& cfg, std::optional<double> C) {
  return ode_rhs_library(cfg.realization, cfg.order, C,
                         cfg.order == Order::Third ? named_function(cfg.F) : ScalarFunction{});
}

Trajectory run_standard_fd(const ExperimentConfig& cfg, std::vector<double>* times) {
  const ClassicalStart start = classical_start(cfg);
  const OdeModel model = model_of(cfg, start.C);
  const UniformMesh mesh{start.x, cfg.h};
  const std::size_t lead = cfg.order == Order::Second ? 2 : 3;
  std::vector<double> ys{start.state[0]};
  if (const auto cs = conic_start(cfg)) {
    const Branch b = branch_of(*cs);
    for (std::size_t i = 1; i < lead; ++i) ys.push_back(b.y(mesh.node(static_cast<long>(i))));
  } else {
    Rk45Options opt;
    opt.relTol = 1e-12;
    opt.absTol = 1e-12;
    for (std::size_t i = 1; i < lead; ++i) {
      const Rk45Result r =
          rk45_integrate(model.system, start.x, start.state, mesh.node(static_cast<long>(i)), opt);
      if (r.error) throw *r.error;
      ys.push_back(r.last_state()[0]);
    }
  }
  FdStop stop;
  stop.maxSteps = cfg.maxSteps;
  stop.xMax = cfg.x_max();
  stop.yAbsMax = cfg.yBound;
  return standard_fd_run(model, mesh, ys, stop, times);
}

Trajectory run_rk45(const ExperimentConfig& cfg, std::vector<double>* times, std::size_t* steps) {
  const ClassicalStart start = classical_start(cfg);
  const OdeModel model = model_of(cfg, start.C);
  const auto t0 = std::chrono::steady_clock::now();
  const Rk45Result res = rk45_integrate(model.system, start.x, start.state, cfg.x_max());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (times && res.accepted > 0) times->push_back(secs / static_cast<double>(res.accepted));
  if (steps) *steps = res.accepted;
  return to_trajectory(res);
}

// One run of one method; step times are appended to times.
Trajectory run_method(const ExperimentConfig& cfg, Method m, std::vector<double>* times,
                      std::size_t* steps) {
  try {
    switch (m) {
      case Method::Invariant: {
        Trajectory t = run_invariant(cfg, times);
        if (steps) *steps = t.diagnostics.size();
        return t;
      }
      case Method::StandardFD: {
        Trajectory t = run_standard_fd(cfg, times);
        if (steps) *steps = t.diagnostics.size();
        return t;
      }
      case Method::Rk45:
        return run_rk45(cfg, times, steps);
    }
  } catch (const NumericError& e) {
    if (steps) *steps = 0;
    return error_trajectory(cfg, e);
  }
  return {};
}

double step_cost(const ExperimentConfig& cfg, Method m, std::vector<double> times,
                 std::size_t steps) {
  // RK timings are one total per run, so they are weighted by steps.
  std::size_t timed = steps;
  for (int rep = 1; rep < kMaxTimedRepeats && timed < kMinTimedSteps && steps > 0; ++rep) {
    std::size_t more = 0;
    run_method(cfg, m, &times, &more);
    timed += more;
  }
  return median(std::move(times));
}

double winding_about(const CircleSolution& c, const std::vector<Point2>& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double d = std::atan2(pts[i].y - c.cy, pts[i].x - c.cx) -
               std::atan2(pts[i - 1].y - c.cy, pts[i - 1].x - c.cx);
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    total += d;
  }
  return total;
}

MethodReport analyse(const ExperimentConfig& cfg, Method m, Trajectory traj) {
  MethodReport rep;
  rep.method = m;
  rep.haltX = traj.points.back().x;
  rep.xMaxReached = traj.points.front().x;
  for (const Point2& p : traj.points) rep.xMaxReached = std::max(rep.xMaxReached, p.x);
  std::optional<ConicStart> cs;
  try {
    cs = conic_start(cfg);
  } catch (const NumericError&) {
  }
  if (cs) {
    double worst = 0.0;
    for (const Point2& p : traj.points) worst = std::max(worst, distance_to(cs->conic, p));
    rep.maxConicDistance = worst;
    if (const auto* c = std::get_if<CircleSolution>(&cs->conic))
      rep.winding = winding_about(*c, traj.points);
  }
  if (m == Method::Invariant && !traj.diagnostics.empty()) {
    double mesh = 0.0, scheme = 0.0;
    for (const auto& d : traj.diagnostics) {
      mesh = std::max(mesh, d.meshResidual);
      scheme = std::max(scheme, d.schemeResidual);
    }
    rep.maxMeshResidual = mesh;
    rep.maxSchemeResidual = scheme;
  }
  if (traj.points.size() >= 3) rep.singularity = detect_singularity(traj);
  // An integrator that stops on a blowing-up derivative (y'' for the
  // third-order system) may not reach a 1e4 secant slope first.
  if (!rep.singularity && traj.error &&
      (traj.error->kind() == ErrorKind::SingularityDetected ||
       traj.error->kind() == ErrorKind::StepUnderflow))
    rep.singularity = Singularity{rep.haltX, traj.points.size() - 1, SingularityKind::BlowUp};
  rep.trajectory = std::move(traj);
  return rep;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json report_json(const ExperimentConfig& cfg, const RunReport& run) {
  json methods = json::array();
  std::optional<double> inv, fd;
  for (const MethodReport& m : run.methods) {
    json e;
    e["method"] = to_string(m.method);
    e["file"] = m.file;
    e["points"] = m.trajectory.points.size();
    e["halt_reason"] = to_string(m.trajectory.halt);
    e["halt_x"] = m.haltX;
    e["x_max_reached"] = m.xMaxReached;
    if (m.trajectory.error)
      e["error"] = {{"kind", to_string(m.trajectory.error->kind())},
                    {"detail", m.trajectory.error->detail()}};
    else
      e["error"] = nullptr;
    e["max_conic_distance"] = optional_json(m.maxConicDistance);
    e["winding"] = optional_json(m.winding);
    e["max_mesh_residual"] = optional_json(m.maxMeshResidual);
    e["max_scheme_residual"] = optional_json(m.maxSchemeResidual);
    if (m.singularity)
      e["singularity"] = {{"x", m.singularity->x}, {"kind", to_string(m.singularity->kind)}};
    else
      e["singularity"] = nullptr;
    e["seconds_per_step"] = optional_json(m.secondsPerStep);
    methods.push_back(e);
    if (m.method == Method::Invariant) inv = m.secondsPerStep;
    if (m.method == Method::StandardFD) fd = m.secondsPerStep;
  }
  json out;
  out["name"] = run.name;
  out["config"] = json::parse(config_to_json(cfg));
  out["methods"] = methods;
  out["invariant_not_costlier"] = inv && fd ? json(*inv <= *fd) : json(nullptr);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

template <class T>
std::optional<T> opt_get(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Invariant: return "invariant";
    case Method::StandardFD: return "standard_fd";
    case Method::Rk45: return "rk45";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "invariant") return Method::Invariant;
  if (text == "standard_fd" || text == "standardFD" || text == "fd") return Method::StandardFD;
  if (text == "rk45") return Method::Rk45;
  throw ConfigError("unknown method '" + text + "'");
}

std::string to_string(SingularityKind k) {
  return k == SingularityKind::BlowUp ? "blow_up" : "tangent_crossing";
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("name must not be empty");
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h must be positive");
  if (!std::isfinite(x0) || !std::isfinite(y0)) throw ConfigError("x0, y0 must be finite");
  if (!validate_point({x0, y0}, realization)) throw ConfigError("initial point needs x0 > 0");
  if (order == Order::Second) {
    if (!C) throw ConfigError("order-2 configs need C");
    if (!a && !yp0) throw ConfigError("order-2 configs need a or yp0");
    if (a && *a == 0.0) throw ConfigError("a must be nonzero");
  } else {
    if (!yp0 || !ypp0) throw ConfigError("order-3 configs need yp0 and ypp0");
    try {
      named_function(F);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (!(x_min() < x0) || !(x0 < x_max())) throw ConfigError("x0 must lie inside the x window");
  if (!(yBound > 0.0)) throw ConfigError("y_bound must be positive");
}

double ExperimentConfig::x_min() const { return xMin ? *xMin : std::max(x0 - 5.0, x0 / 100.0); }
double ExperimentConfig::x_max() const { return xMax ? *xMax : x0 + 5.0; }

std::string ExperimentConfig::output_dir() const {
  if (!output.empty()) return output;
  if (const char* env = std::getenv("INVSCHEME_OUT"); env && *env) return env;
  return "out";
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    if (j.contains("realization")) c.realization = parse_realization(j["realization"].get<std::string>());
    if (j.contains("order")) {
      const int o = j["order"].get<int>();
      if (o != 2 && o != 3) throw ConfigError("order must be 2 or 3");
      c.order = o == 2 ? Order::Second : Order::Third;
    }
    if (!j.contains("x0") || !j.contains("y0")) throw ConfigError("x0 and y0 are required");
    c.x0 = j["x0"].get<double>();
    c.y0 = j["y0"].get<double>();
    c.yp0 = opt_get<double>(j, "yp0");
    c.ypp0 = opt_get<double>(j, "ypp0");
    c.C = opt_get<double>(j, "C");
    c.a = opt_get<double>(j, "a");
    c.F = j.value("F", c.F);
    c.h = j.value("h", c.h);
    c.maxSteps = j.value("max_steps", c.maxSteps);
    c.xMin = opt_get<double>(j, "x_min");
    c.xMax = opt_get<double>(j, "x_max");
    c.yBound = j.value("y_bound", c.yBound);
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j["methods"]) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    c.output = j.value("output", c.output);
    c.signedCurvature = j.value("signed_curvature", c.signedCurvature);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["realization"] = to_string(c.realization);
  j["order"] = static_cast<int>(c.order);
  j["x0"] = c.x0;
  j["y0"] = c.y0;
  j["yp0"] = optional_json(c.yp0);
  j["ypp0"] = optional_json(c.ypp0);
  j["C"] = optional_json(c.C);
  j["a"] = optional_json(c.a);
  j["F"] = c.F;
  j["h"] = c.h;
  j["max_steps"] = c.maxSteps;
  j["x_min"] = c.x_min();
  j["x_max"] = c.x_max();
  j["y_bound"] = c.yBound;
  j["methods"] = json::array();
  for (Method m : c.methods) j["methods"].push_back(to_string(m));
  j["output"] = c.output;
  j["signed_curvature"] = c.signedCurvature;
  j["seed"] = c.seed;
  return j.dump(2);
}

std::vector<ExperimentConfig> builtin_experiments() {
  std::vector<ExperimentConfig> out(4);
  out[0].name = "fig1";
  out[0].realization = Realization::Sl3;
  out[0].order = Order::Second;
  out[0].x0 = 1.0;
  out[0].y0 = 8.0;
  out[0].C = 2.0;
  out[0].a = 1.0;

  out[1].name = "fig2";
  out[1].realization = Realization::Sl3;
  out[1].order = Order::Third;
  out[1].x0 = 1.0;
  out[1].y0 = 1.0;
  out[1].yp0 = 1.0;
  out[1].ypp0 = 3.0;

  out[2].name = "fig3";
  out[2].realization = Realization::Sl4;
  out[2].order = Order::Second;
  out[2].x0 = 2.0;
  out[2].y0 = 5.0;
  out[2].C = 5.0;
  out[2].a = 1.0;

  out[3].name = "fig4";
  out[3].realization = Realization::Sl4;
  out[3].order = Order::Third;
  out[3].x0 = 2.0;
  out[3].y0 = 1.0;
  out[3].yp0 = -1.5;
  out[3].ypp0 = -1.5;
  return out;
}

std::optional<ExperimentConfig> builtin_experiment(const std::string& name) {
  for (auto& c : builtin_experiments())
    if (c.name == name) return c;
  return std::nullopt;
}

std::optional<Singularity> detect_singularity(const Trajectory& traj) {
  const auto& p = traj.points;
  if (p.size() < 3) return std::nullopt;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double dx = p[i].x - p[i - 1].x;
    const double dy = p[i].y - p[i - 1].y;
    if (std::abs(dy) > kSlopeLimit * std::abs(dx)) return Singularity{p[i].x, i, SingularityKind::BlowUp};
    if (i >= 2) {
      const double prev = p[i - 1].x - p[i - 2].x;
      if (dx * prev < 0.0) return Singularity{p[i - 1].x, i - 1, SingularityKind::TangentCrossing};
    }
  }
  return std::nullopt;
}

const MethodReport* RunReport::find(Method m) const {
  for (const auto& r : methods)
    if (r.method == m) return &r;
  return nullptr;
}

RunReport simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  RunReport run;
  run.name = cfg.name;
  for (Method m : cfg.methods) {
    std::vector<double> times;
    std::size_t steps = 0;
    Trajectory t = run_method(cfg, m, &times, &steps);
    MethodReport rep = analyse(cfg, m, std::move(t));
    if (steps > 0) rep.secondsPerStep = step_cost(cfg, m, std::move(times), steps);
    run.methods.push_back(std::move(rep));
  }
  return run;
}

std::map<Method, double> benchmark_step_cost(const ExperimentConfig& cfg) {
  cfg.validate();
  std::map<Method, double> out;
  for (Method m : cfg.methods) {
    std::vector<double> times;
    std::size_t steps = 0;
    run_method(cfg, m, &times, &steps);
    if (steps > 0) out[m] = step_cost(cfg, m, std::move(times), steps);
  }
  return out;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport run = simulate(cfg);
  const std::filesystem::path dir = cfg.output_dir();
  std::filesystem::create_directories(dir);
  for (MethodReport& m : run.methods) {
    const std::filesystem::path file = dir / (cfg.name + "_" + to_string(m.method) + ".csv");
    write_file(file, trajectory_csv(m.trajectory, m.method == Method::Invariant));
    m.file = file.string();
  }
  const std::filesystem::path report = dir / (cfg.name + "_report.json");
  write_file(report, report_json(cfg, run).dump(2) + "\n");
  run.reportFile = report.string();
  return run;
}

std::string trajectory_csv(const Trajectory& traj, bool withDiagnostics) {
  std::string out = withDiagnostics ? "index,x,y,J1,J2,mesh_residual,scheme_residual\n" : "index,x,y\n";
  const std::size_t lead = traj.points.size() - traj.diagnostics.size();
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    out += std::to_string(i) + "," + fmt17(traj.points[i].x) + "," + fmt17(traj.points[i].y);
    if (withDiagnostics) {
      if (i >= lead) {
        const StepDiagnostic& d = traj.diagnostics[i - lead];
        out += "," + fmt17(d.J1) + "," + (d.J2 ? fmt17(*d.J2) : "") + "," + fmt17(d.meshResidual) +
               "," + fmt17(d.schemeResidual);
      } else {
        out += ",,,,";
      }
    }
    out += "\n";
  }
  return out;
}

std::vector<Point2> parse_trajectory_csv(const std::string& text) {
  std::vector<Point2> pts;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = line.find(',', c1 + 1);
    const std::size_t c3 = line.find(',', c2 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("malformed CSV line: " + line);
    pts.push_back({std::strtod(line.substr(c1 + 1, c2 - c1 - 1).c_str(), nullptr),
                   std::strtod(line.substr(c2 + 1, c3 - c2 - 1).c_str(), nullptr)});
  }
  return pts;
}

}  // namespace invscheme
