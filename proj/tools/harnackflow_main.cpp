#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "harnackflow/errors.hpp"
#include "harnackflow/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"contraction flows of convex rotationally symmetric hypersurfaces in space "
               "forms, with pointwise verification of differential Harnack estimates"};
  app.require_subcommand(1);

  hflow::RunOverrides ov;
  std::optional<std::string> out;
  std::optional<double> tol_scale;
  std::optional<unsigned long> seed;
  std::optional<int> nodes;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "output directory for series/snapshots/summary");
    sub->add_option("--tol-scale", tol_scale, "multiply all monitor tolerances");
    sub->add_option("--seed", seed, "override the scenario random seed");
    sub->add_option("--nodes", nodes, "override the scenario node count");
    sub->add_flag("--quiet", ov.quiet, "suppress progress output");
  };

  std::string run_file, suite_dir;
  CLI::App* run = app.add_subcommand("run", "run one scenario file");
  run->add_option("scenario", run_file, "scenario file (key = value lines)")->required();
  add_common(run);
  CLI::App* suite = app.add_subcommand("suite", "run every *.cfg in a directory");
  suite->add_option("dir", suite_dir, "directory of scenario files")->required();
  add_common(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hflow::kExitConfigError;
  }

  ov.out = out;
  ov.tol_scale = tol_scale;
  ov.seed = seed;
  ov.nodes = nodes;

  try {
    if (run->parsed()) {
      const hflow::Scenario sc = hflow::parse_scenario_file(run_file);
      const hflow::RunOutcome oc = hflow::run_scenario(sc, ov, std::cout);
      if (ov.quiet && oc.exit_code != hflow::kExitPass)
        std::cout << "reason=" << oc.reason << "\n";
      return oc.exit_code;
    }
    return hflow::run_suite(suite_dir, ov, std::cout);
  } catch (const hflow::ConfigError& e) {
    std::cout << "reason=config_error:" << e.what() << "\n";
    return hflow::kExitConfigError;
  }
}
