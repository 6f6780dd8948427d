#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "qgeo/cli.hpp"

int main(int argc, char** argv) {
  using namespace qgeo;
  cli::RunConfig cfg;
  std::string metric = "fs", branch = "principal", format = "csv";

  CLI::App app{"Information geometry of qubit states"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--metric", metric, "fs | sjoqvist | bures | bsm")
      ->check(CLI::IsMember({"fs", "sjoqvist", "bures", "bsm"}));
  app.add_option("--r0", cfg.r0, "initial Bloch radius");
  app.add_option("--theta0", cfg.theta0, "initial polar angle");
  app.add_option("--phi0", cfg.phi0, "initial azimuth");
  app.add_option("--rdot0", cfg.rdot0, "initial radial rate");
  app.add_option("--thetadot0", cfg.thetadot0, "initial polar rate");
  app.add_option("--phidot0", cfg.phidot0, "initial azimuthal rate (c_FS for the fitted laws)");
  app.add_option("--eta-max", cfg.eta_max, "end of the affine-parameter grid");
  app.add_option("--tau-max", cfg.tau_max, "end of the complexity time grid");
  app.add_option("--grid", cfg.grid, "number of grid points")->check(CLI::PositiveNumber);
  app.add_option("--branch", branch, "principal | unwrapped")->check(CLI::IsMember({"principal", "unwrapped"}));
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out, "write the artifact to a file instead of stdout");
  app.add_option("--seed", cfg.seed, "seed for the randomized verification suite");
  app.add_flag("--accessible", cfg.accessible, "volume: report the accessible volume");

  const std::map<std::string, std::string> commands{
      {"curvature", "scalar and sectional curvature at (r0, theta0, phi0)"},
      {"geodesic", "closed-form and RK4 samples of the geodesic"},
      {"length", "geodesic length on the eta grid"},
      {"volume", "explored (or accessible) volume"},
      {"complexity", "complexity and entropy trace, plus fitted laws for sjoqvist"},
      {"compare", "volume-ratio and length orderings"},
      {"verify", "run the oracle cross-checks"}};
  for (const auto& [name, help] : commands)
    app.add_subcommand(name, help)->callback([&cfg, n = name] { cfg.command = cli::parse_command(n); });

  CLI11_PARSE(app, argc, argv);
  cfg.metric = parse_metric_kind(metric);
  cfg.branch = parse_branch_mode(branch);
  cfg.format = format == "json" ? cli::Format::Json : cli::Format::Csv;
  return cli::run(cfg);
}
