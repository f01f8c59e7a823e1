#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "invscheme/harness.hpp"
#include "invscheme/invariants.hpp"

namespace invscheme {

namespace {

std::vector<Point2> parse_points(const std::string& text) {
  std::vector<Point2> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw ConfigError("point '" + item + "' is not x,y");
    try {
      pts.push_back({std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1))});
    } catch (const std::exception&) {
      throw ConfigError("point '" + item + "' is not numeric");
    }
  }
  return pts;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_method(item));
  return out;
}

ExperimentConfig resolve(const std::string& target) {
  if (auto b = builtin_experiment(target)) return *b;
  return load_config(target);
}

nlohmann::json invariants_json(Realization r, const std::vector<Point2>& p) {
  nlohmann::json j;
  j["realization"] = to_string(r);
  j["pair"] = nlohmann::json::array();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) j["pair"].push_back(pair_invariant(r, p[i], p[i + 1]));
  if (p.size() >= 3) {
    j["outer"] = pair_invariant(r, p[0], p[2]);
    j["J1"] = J1_of_window(r, std::span<const Point2>(p.data(), 3));
  }
  if (p.size() == 4) j["J2"] = J2_of_window(r, std::span<const Point2>(p.data(), 4));
  return j;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Invariant difference schemes for sl(2,R)-invariant ODEs"};
  app.require_subcommand(1);
  // --h is the step size, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");

  std::string target, outDir, methods;
  double h = 0.0;
  std::size_t maxSteps = 0;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run a builtin experiment or a JSON config");
  run->add_option("target", target, "fig1..fig4 or a config file")->required();
  auto* hOpt = run->add_option("--h", h, "Step size (arc length for the invariant scheme)");
  auto* stepsOpt = run->add_option("--max-steps", maxSteps, "Step limit per method");
  run->add_option("--out", outDir, "Output directory (default $INVSCHEME_OUT or ./out)");
  auto* methodsOpt =
      run->add_option("--methods", methods, "Comma list of invariant,standard_fd,rk45");
  auto* seedOpt = run->add_option("--seed", seed, "Seed recorded in the report");

  app.add_subcommand("list", "List the builtin experiments");

  std::string validatePath;
  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", validatePath)->required();

  std::string realization = "sl3", points;
  auto* inv = app.add_subcommand("invariants", "Evaluate discrete invariants of 2 to 4 points");
  inv->add_option("--realization", realization)->check(CLI::IsMember({"sl3", "sl4"}));
  inv->add_option("--points", points, "x,y;x,y;...")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& c : builtin_experiments()) std::cout << c.name << "\n";
      return 0;
    }
    if (app.got_subcommand("validate")) {
      const ExperimentConfig c = load_config(validatePath);
      c.validate();
      std::cout << "ok: " << c.name << "\n";
      return 0;
    }
    if (app.got_subcommand("invariants")) {
      const auto p = parse_points(points);
      if (p.size() < 2 || p.size() > 4) throw ConfigError("need 2 to 4 points");
      std::cout << invariants_json(parse_realization(realization), p).dump(2) << "\n";
      return 0;
    }

    ExperimentConfig cfg = resolve(target);
    if (*hOpt) cfg.h = h;
    if (*stepsOpt) cfg.maxSteps = maxSteps;
    if (!outDir.empty()) cfg.output = outDir;
    if (*methodsOpt) cfg.methods = parse_methods(methods);
    if (*seedOpt) cfg.seed = seed;
    cfg.validate();
    const RunReport rep = run_experiment(cfg);
    std::size_t failed = 0;
    for (const auto& m : rep.methods) {
      std::printf("%-12s %-9s points=%zu halt_x=%.6f%s%s\n", to_string(m.method).c_str(),
                  to_string(m.trajectory.halt).c_str(), m.trajectory.points.size(), m.haltX,
                  m.trajectory.error ? "  " : "",
                  m.trajectory.error ? m.trajectory.error->what() : "");
      if (m.trajectory.error) ++failed;
    }
    std::printf("report: %s\n", rep.reportFile.c_str());
    return !rep.methods.empty() && failed == rep.methods.size() ? 2 : 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace invscheme
