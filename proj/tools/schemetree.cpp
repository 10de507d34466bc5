#include <iostream>

#include <CLI11.hpp>

#include "schemetree/commands.hpp"

namespace cli = schemetree::cli;

int main(int argc, char** argv) {
  CLI::App app{"Run, check and treeify first-order program schemes over finite structures"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  cli::GlobalOptions global;
  app.add_option("--root", global.root, "Directory all file references are resolved against");
  app.add_option("--seed", global.seed, "Seed for randomized tooling (current commands are deterministic)");
  app.add_option("--max-nodes", global.max_nodes, "Treeify node limit");
  app.add_option("--max-depth", global.max_depth, "Treeify depth limit");

  auto add_class = [](CLI::App* cmd, cli::ClassSource& src) {
    cmd->add_option("--class", src.class_ref, "Class manifest");
    cmd->add_option("--structure", src.structure_ref, "Single structure file");
  };

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "Check scheme, structure, signature, class or family files");
  validate->add_option("paths", validate_paths)->required();

  cli::RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Execute a scheme on one input tuple");
  run_cmd->add_option("--scheme", run.scheme)->required();
  run_cmd->add_option("--structure", run.structure)->required();
  run_cmd->add_option("--input", run.input, "Comma-separated element names")->required();
  run_cmd->add_flag("--explain", run.explain, "Print the path record with its path condition");

  cli::TotalityOptions totality;
  auto* totality_cmd = app.add_subcommand("totality", "Decide whether a scheme is total over a class");
  totality_cmd->add_option("--scheme", totality.scheme)->required();
  add_class(totality_cmd, totality.source);
  totality_cmd->add_flag("--table", totality.table, "Also print the implemented function as TSV");

  cli::TreeifyOptions treeify;
  auto* treeify_cmd = app.add_subcommand("treeify", "Compile a total scheme into a strongly equivalent finite tree");
  treeify_cmd->add_option("--scheme", treeify.scheme)->required();
  add_class(treeify_cmd, treeify.source);
  treeify_cmd->add_option("--family", treeify.family, "'cyclic' or a family spec file");
  treeify_cmd->add_option("--bound", treeify.bound, "Number of family members to explore");
  treeify_cmd->add_option("--out", treeify.out_scheme, "Tree scheme output file");
  treeify_cmd->add_option("--dot", treeify.out_dot, "DOT output file");
  treeify_cmd->add_option("--report", treeify.out_report, "Report output file");

  cli::EquivOptions equiv;
  auto* equiv_cmd = app.add_subcommand("equiv", "Check strong equivalence of two schemes over a class");
  equiv_cmd->add_option("--a", equiv.a)->required();
  equiv_cmd->add_option("--b", equiv.b)->required();
  add_class(equiv_cmd, equiv.source);

  cli::CounterexampleOptions cex;
  auto* cex_cmd = app.add_subcommand("counterexample", "Build and treeify a chain scheme for a formula family");
  cex_cmd->add_option("--family", cex.family, "Formula family (distinct)");
  cex_cmd->add_option("--prefix-len", cex.prefix_len, "Number of tests in the chain")->required();
  add_class(cex_cmd, cex.source);
  cex_cmd->add_option("--bound", cex.bound, "Use the class Z_1..Z_bound");
  cex_cmd->add_option("--signature", cex.signature, "Signature file for generated structures");
  cex_cmd->add_option("--out", cex.out_scheme, "Chain scheme output file");
  cex_cmd->add_option("--tree", cex.out_tree, "Tree scheme output file");
  cex_cmd->add_option("--dot", cex.out_dot, "DOT output file for the tree");
  cex_cmd->add_option("--report", cex.out_report, "Report output file");

  cli::ExportDotOptions dot;
  auto* dot_cmd = app.add_subcommand("export-dot", "Render a scheme as Graphviz DOT");
  dot_cmd->add_option("--scheme", dot.scheme)->required();
  dot_cmd->add_option("--out", dot.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitInput;
  }

  if (*validate) return cli::command_validate(global, validate_paths, std::cout, std::cerr);
  if (*run_cmd) return cli::command_run(global, run, std::cout, std::cerr);
  if (*totality_cmd) return cli::command_totality(global, totality, std::cout, std::cerr);
  if (*treeify_cmd) return cli::command_treeify(global, treeify, std::cout, std::cerr);
  if (*equiv_cmd) return cli::command_equiv(global, equiv, std::cout, std::cerr);
  if (*cex_cmd) return cli::command_counterexample(global, cex, std::cout, std::cerr);
  if (*dot_cmd) return cli::command_export_dot(global, dot, std::cout, std::cerr);
  return cli::kExitInput;
}
