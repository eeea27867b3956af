// arche: parse, validate, repair-prompt and score Reasoning Logic Trees.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "arche/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reasoning Logic Tree toolkit: DOT parsing, structural validation,\n"
               "repair prompts, and EC/REA scoring with a pluggable judge panel."};
  app.require_subcommand(1);

  // validate
  std::string graph_path;
  bool json_out = false;
  auto* validate = app.add_subcommand("validate", "Structurally validate a DOT graph");
  validate->add_option("graph", graph_path, "Path to the DOT file")->required();
  validate->add_flag("--json", json_out, "Emit the report as JSON");

  // score
  arche::cli::ScoreArgs score_args;
  std::string aes_mode = "weak";
  std::string ec_nodes = "both";
  auto* score = app.add_subcommand("score", "Evaluate a graph against its source document");
  score->add_option("graph", score_args.graph_path, "Path to the DOT file")->required();
  score->add_option("doc", score_args.doc_path, "Path to the document JSON")->required();
  score->add_option("--judges", score_args.config_path, "Backend config JSON")->required();
  score->add_flag("--json", score_args.json, "Emit the report as JSON");
  score->add_flag("--csv", score_args.csv, "Emit one CSV row (paper_id,ec,rea)");
  score->add_option("--parallel", score_args.parallel, "Max concurrent judge calls");
  score->add_option("--aes", aes_mode, "Effective-step connectivity: weak|directed")
      ->check(CLI::IsMember({"weak", "directed"}));
  score->add_option("--ec-nodes", ec_nodes, "Nodes contributing to EC: both|premises")
      ->check(CLI::IsMember({"both", "premises"}));

  // stats
  std::string corpus_dir;
  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "Corpus statistics over a directory of documents");
  stats->add_option("corpus", corpus_dir, "Directory of document JSON files")->required();
  stats->add_flag("--json", stats_json, "Emit the statistics as JSON");

  // gen-prompt
  std::string gen_doc;
  auto* gen = app.add_subcommand("gen-prompt", "Print the Stage-1 generation prompt");
  gen->add_option("doc", gen_doc, "Path to the document JSON")->required();

  // repair-prompt
  std::string repair_graph, repair_doc;
  auto* repair = app.add_subcommand("repair-prompt", "Print the Stage-2 repair prompt");
  repair->add_option("graph", repair_graph, "Path to the defective DOT file")->required();
  repair->add_option("doc", repair_doc, "Path to the document JSON")->required();

  // run
  arche::cli::RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the two-stage generation pipeline");
  run->add_option("doc", run_args.doc_path, "Document JSON or a directory of them")->required();
  run->add_option("--config", run_args.config_path, "Backend config JSON")->required();
  run->add_option("--out-dir", run_args.out_dir, "Directory for JSON run logs");
  run->add_option("--max-rounds", run_args.max_rounds, "Generation + repair round budget")
      ->check(CLI::PositiveNumber);
  run->add_option("--parallel", run_args.parallel, "Concurrent papers (rounds stay sequential)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? arche::cli::kExitOk : arche::cli::kExitUsage;
  }

  try {
    if (validate->parsed()) {
      return arche::cli::cmd_validate(graph_path, json_out, std::cout, std::cerr);
    }
    if (score->parsed()) {
      score_args.aes_connectivity = aes_mode == "directed"
                                        ? arche::ScoreOptions::AesConnectivity::DirectedPathToRoot
                                        : arche::ScoreOptions::AesConnectivity::WeakComponent;
      score_args.ec_nodes = ec_nodes == "premises"
                                ? arche::ScoreOptions::EcNodes::PremisesOnly
                                : arche::ScoreOptions::EcNodes::PremisesAndConclusion;
      return arche::cli::cmd_score(score_args, std::cout, std::cerr);
    }
    if (stats->parsed()) {
      return arche::cli::cmd_stats(corpus_dir, stats_json, std::cout, std::cerr);
    }
    if (gen->parsed()) {
      return arche::cli::cmd_gen_prompt(gen_doc, std::cout, std::cerr);
    }
    if (repair->parsed()) {
      return arche::cli::cmd_repair_prompt(repair_graph, repair_doc, std::cout, std::cerr);
    }
    if (run->parsed()) {
      return arche::cli::cmd_run(run_args, std::cout, std::cerr);
    }
  } catch (const arche::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return arche::cli::kExitIo;
  }
  return arche::cli::kExitUsage;
}
