#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include <suitaeq/cli.hpp>

int main(int argc, char** argv) {
  std::ostringstream commands;
  for (std::string_view name : suitaeq::cli::command_names()) commands << "\n  " << name;

  CLI::App app{"suitaeq: conformal invariants and minimal-L2 equality tooling on "
               "multiply-connected planar domains"};
  std::string command;
  suitaeq::cli::Flags flags;
  unsigned seed = 0;
  double tolerance = 0.0;
  int degree = 0;
  bool no_timings = false;

  app.add_option("command", command, "one of:" + commands.str())->required();
  app.add_option("--config", flags.config_path, "JSON config path")->required();
  app.add_option("--out", flags.out_path,
                 "write the report here (dump-field: the CSV grid)");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  auto* tol_opt = app.add_option("--tolerance", tolerance, "override the config tolerance");
  auto* deg_opt = app.add_option("--degree", degree, "override the solver degree");
  app.add_flag("--no-timings", no_timings, "omit timings for byte-stable reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return suitaeq::cli::kExitConfig;
  }

  if (seed_opt->count()) flags.seed = seed;
  if (tol_opt->count()) flags.tolerance = tolerance;
  if (deg_opt->count()) flags.degree = degree;
  flags.timings = !no_timings;

  return suitaeq::cli::run(command, flags, std::cout, std::cerr);
}
