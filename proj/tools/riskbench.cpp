// riskbench: validate risk models, derive assurance cases, run falsification
// campaigns, explain their archives and replay single assignments.
#include <iostream>

#include "CLI11.hpp"

#include "cais/cli.hpp"

int main(int argc, char** argv) {
  using namespace cais::cli;
  CLI::App app{"Risk-driven testing of a collaborative robot cell"};
  app.require_subcommand(1);

  std::string model, scenario, config, out, archive, assignment, situation;
  std::uint64_t seed = 1;
  int budget = 0;
  int replicates = 1;
  double threshold = 0.0;

  auto* validate = app.add_subcommand("validate", "Parse and check a .riskml model");
  validate->add_option("--model", model, "Risk model")->required();

  auto* cases = app.add_subcommand("cases", "Derive assurance cases as JSON");
  cases->add_option("--model", model, "Risk model")->required();
  cases->add_option("--out", out, "Output JSON file")->required();

  auto* run = app.add_subcommand("run", "Run a falsification campaign");
  run->add_option("--config", config, "Campaign config")->required();
  auto* run_budget = run->add_option("--budget", budget, "Override search.budget");
  auto* run_seed = run->add_option("--seed", seed, "Override search.seed");
  auto* run_out = run->add_option("--out", out, "Override output directory");

  auto* explain = app.add_subcommand("explain", "Induce a tree and rules from an archive");
  explain->add_option("--archive", archive, "archive.csv written by run")->required();
  explain->add_option("--model", model, "Risk model the archive came from")->required();
  explain->add_option("--out", out, "Output directory")->required();
  auto* explain_threshold = explain->add_option("--threshold", threshold, "Rule likelihood threshold in [0, 1]");

  auto* replay = app.add_subcommand("replay", "Simulate one assignment and export its trace");
  replay->add_option("--model", model, "Risk model")->required();
  replay->add_option("--scenario", scenario, "Scenario file (default: the situation's)");
  replay->add_option("--assignment", assignment, "JSON object of feature values")->required();
  replay->add_option("--out", out, "Output directory")->required();
  replay->add_option("--seed", seed, "Simulator seed");
  replay->add_option("--replicates", replicates, "Seeds averaged per verdict");
  replay->add_option("--situation", situation, "Situation (default: first)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  if (*validate) return cmd_validate(model, std::cout, std::cerr);
  if (*cases) return cmd_cases(model, out, std::cout, std::cerr);
  if (*run) {
    RunOptions o{config, {}, {}, {}};
    if (*run_budget) o.budget = budget;
    if (*run_seed) o.seed = seed;
    if (*run_out) o.out = out;
    return cmd_run(o, std::cout, std::cerr);
  }
  if (*explain) {
    ExplainOptions o{archive, model, out, {}};
    if (*explain_threshold) o.threshold = threshold;
    return cmd_explain(o, std::cout, std::cerr);
  }
  return cmd_replay({model, scenario, assignment, out, situation, seed, replicates}, std::cout, std::cerr);
}
