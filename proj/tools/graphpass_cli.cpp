#include <iostream>

#include <CLI11.hpp>

#include "graphpass/graphpass.hpp"

int main(int argc, char** argv) {
  CLI::App app{"graphpass: biharmonic-Kirchhoff systems on finite weighted graphs"};
  app.require_subcommand(1);

  graphpass::RunManifest mf;
  auto add_common = [&](CLI::App* sub, bool needs_model) {
    sub->add_option("--graph", mf.graph_path, "graph file")->required();
    if (needs_model) sub->add_option("--model", mf.model_path, "model file")->required();
    sub->add_option("--out", mf.out_dir, "output directory");
    sub->add_option("--seed", mf.seed, "random seed");
    sub->add_option("--tol", mf.tol, "residual tolerance");
  };

  auto* validate = app.add_subcommand("validate", "check graph file invariants");
  validate->add_option("--graph", mf.graph_path, "graph file")->required();

  auto* auditc = app.add_subcommand("audit", "run the hypothesis audit");
  add_common(auditc, true);

  auto* solve = app.add_subcommand("solve", "compute distinct nontrivial solutions");
  add_common(solve, true);
  solve->add_option("-K,--count", mf.K, "number of solution pairs");
  solve->add_option("--method", mf.method, "newton | mp | both")
      ->check(CLI::IsMember({"newton", "mp", "both"}));

  auto* verify = app.add_subcommand("verify", "re-verify exported solutions");
  add_common(verify, true);
  verify->add_option("--solutions", mf.solutions_path, "solutions.json")->required();

  auto* report = app.add_subcommand("report", "summary table from prior outputs");
  report->add_option("--out", mf.out_dir, "output directory with prior solve results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : graphpass::kExitInputError;
  }

  mf.command = app.get_subcommands().front()->get_name();
  return graphpass::run_checked(mf, std::cout, std::cerr);
}
