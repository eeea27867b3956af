#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "arche/config.hpp"
#include "arche/corpus.hpp"
#include "arche/dot.hpp"
#include "arche/metrics.hpp"
#include "arche/pipeline.hpp"
#include "arche/validate.hpp"

namespace arche::cli {

// Exit codes are a documented, stable contract.
inline constexpr int kExitOk = 0;                // success / graph valid
inline constexpr int kExitValidationFailed = 1;  // `validate` found defects
inline constexpr int kExitUsage = 2;             // bad invocation
inline constexpr int kExitIo = 3;                // unreadable input or schema error
inline constexpr int kExitBackend = 4;           // judge/entity/generator failure

namespace detail_cli {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void print_warnings(const dot::ParseDiagnostics& diags, std::ostream& err) {
  for (const auto& w : diags.warnings) {
    err << "warning: " << dot::to_string(w.where) << ": " << w.message << "\n";
  }
}

inline std::string sanitize_filename(std::string name) {
  for (char& c : name) {
    if (c == '/' || c == '\\' || c == '\0') c = '_';
  }
  return name;
}

}  // namespace detail_cli

/// `validate <graph.dot>`: structural report, exit 0 only when clean.
inline int cmd_validate(const std::string& graph_path, bool as_json, std::ostream& out,
                        std::ostream& err) {
  dot::ParseResult parsed;
  try {
    parsed = dot::parse(detail_cli::read_file(graph_path));
  } catch (const dot::ParseError& e) {
    err << "error: " << graph_path << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  detail_cli::print_warnings(parsed.diagnostics, err);

  ValidationReport report = validate(parsed.graph);
  if (as_json) {
    out << to_json(report).dump(2) << "\n";
  } else if (report.is_valid()) {
    out << "valid: " << parsed.graph.nodes.size() << " nodes, " << parsed.graph.edges.size()
        << " edges, root \"" << root_of(parsed.graph) << "\"\n";
    for (const auto& note : report.notes) out << "note: " << note << "\n";
  } else {
    out << "invalid: " << report.defects.size() << " defect(s)\n";
    for (const auto& defect : report.defects) {
      out << "- [" << to_string(defect.kind) << "] " << defect.message << "\n";
    }
    for (const auto& note : report.notes) out << "note: " << note << "\n";
  }
  return report.is_valid() ? kExitOk : kExitValidationFailed;
}

struct ScoreArgs {
  std::string graph_path;
  std::string doc_path;
  std::string config_path;
  bool json = false;
  bool csv = false;
  int parallel = 0;  // overrides config when > 0
  ScoreOptions::AesConnectivity aes_connectivity = ScoreOptions::AesConnectivity::WeakComponent;
  ScoreOptions::EcNodes ec_nodes = ScoreOptions::EcNodes::PremisesAndConclusion;
};

/// `score <graph.dot> <doc.json> --judges config.json`: the full evaluation
/// for one paper. Reports go to stdout, logs to stderr.
inline int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err,
                     std::shared_ptr<Transport> transport = nullptr) {
  dot::ParseResult parsed;
  CorpusDocument doc;
  BackendSet backends;
  try {
    parsed = dot::parse(detail_cli::read_file(args.graph_path));
    doc = load_document_file(args.doc_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  detail_cli::print_warnings(parsed.diagnostics, err);

  WarningSink warn = [&err](const std::string& message) { err << "warning: " << message << "\n"; };
  try {
    backends = build_backends(load_config_file(args.config_path), transport, warn);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  if (!backends.panel) {
    err << "error: config has no judges\n";
    return kExitUsage;
  }
  if (!backends.entity_backend) {
    err << "error: config has no entity_backend\n";
    return kExitUsage;
  }

  ScoreOptions options;
  options.parallel = args.parallel > 0 ? args.parallel : backends.parallel;
  options.aes_connectivity = args.aes_connectivity;
  options.ec_nodes = args.ec_nodes;

  EvaluationReport report;
  try {
    report = score_graph(doc.paper_id, parsed.graph, doc, *backends.panel,
                         *backends.entity_backend, options, warn);
  } catch (const BackendUnavailable& e) {
    err << "error: " << e.what() << "\n";
    return kExitBackend;
  }

  if (args.json) {
    out << to_json(report).dump(2) << "\n";
  } else if (args.csv) {
    out << csv_header() << to_csv_row(report);
  } else {
    out << render_report_table(report);
  }
  return kExitOk;
}

/// `stats <corpus-dir>`: corpus statistics over every *.json document.
inline int cmd_stats(const std::string& corpus_dir, bool as_json, std::ostream& out,
                     std::ostream& err) {
  std::vector<CorpusDocument> docs;
  std::error_code ec;
  std::filesystem::directory_iterator it(corpus_dir, ec);
  if (ec) {
    err << "error: cannot read directory " << corpus_dir << ": " << ec.message() << "\n";
    return kExitIo;
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : it) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    try {
      docs.push_back(load_document_file(path.string()));
    } catch (const Error& e) {
      err << "error: " << path.string() << ": " << e.what() << "\n";
      return kExitIo;
    }
  }
  if (docs.empty()) {
    err << "error: no documents found in " << corpus_dir << "\n";
    return kExitIo;
  }
  CorpusStats stats = corpus_stats(docs);
  if (as_json) {
    out << to_json(stats).dump(2) << "\n";
  } else {
    out << render_table(stats);
  }
  return kExitOk;
}

/// `gen-prompt <doc.json>`: the Stage-1 prompt on stdout.
inline int cmd_gen_prompt(const std::string& doc_path, std::ostream& out, std::ostream& err) {
  try {
    out << build_generation_prompt(load_document_file(doc_path));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

/// `repair-prompt <graph.dot> <doc.json>`: validates the graph and prints
/// the Stage-2 prompt; a clean graph is a usage error (nothing to repair).
inline int cmd_repair_prompt(const std::string& graph_path, const std::string& doc_path,
                             std::ostream& out, std::ostream& err) {
  std::string raw;
  CorpusDocument doc;
  try {
    raw = detail_cli::read_file(graph_path);
    doc = load_document_file(doc_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }

  std::vector<std::string> issues;
  try {
    dot::ParseResult parsed = dot::parse(raw);
    ValidationReport report = validate(parsed.graph);
    if (report.is_valid()) {
      err << "error: graph has no defects; nothing to repair\n";
      return kExitUsage;
    }
    issues = issue_lines(report);
  } catch (const dot::ParseError& e) {
    issues = {std::string("The graph could not be parsed as DOT: ") + e.what()};
  }
  out << prompts::render_repair_prompt(raw, issues, doc);
  return kExitOk;
}

struct RunArgs {
  std::string doc_path;  // one document or a directory of them
  std::string config_path;
  std::string out_dir;  // run logs land here, one file per paper
  int max_rounds = 3;
  int parallel = 1;  // concurrent papers; rounds within a paper stay sequential
};

/// `run <doc.json|dir> --config config.json`: the two-stage generation
/// pipeline; writes a JSON run log per paper and prints the trigger summary.
inline int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err,
                   std::shared_ptr<Transport> transport = nullptr) {
  if (args.max_rounds < 1) {
    err << "error: --max-rounds must be >= 1\n";
    return kExitUsage;
  }
  WarningSink warn = [&err](const std::string& message) { err << "warning: " << message << "\n"; };

  BackendSet backends;
  try {
    backends = build_backends(load_config_file(args.config_path), transport, warn);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  if (!backends.generator) {
    err << "error: config has no generator\n";
    return kExitUsage;
  }

  std::vector<std::string> doc_paths;
  std::error_code ec;
  if (std::filesystem::is_directory(args.doc_path, ec)) {
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(args.doc_path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        paths.push_back(entry.path());
      }
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) doc_paths.push_back(p.string());
    if (doc_paths.empty()) {
      err << "error: no documents found in " << args.doc_path << "\n";
      return kExitIo;
    }
  } else {
    doc_paths.push_back(args.doc_path);
  }

  std::vector<CorpusDocument> docs;
  for (const auto& path : doc_paths) {
    try {
      docs.push_back(load_document_file(path));
    } catch (const Error& e) {
      err << "error: " << path << ": " << e.what() << "\n";
      return kExitIo;
    }
  }

  // Papers run concurrently when asked; rounds inside one paper are
  // inherently sequential. Output stays in input order either way.
  std::vector<GenerationRecord> records(docs.size());
  int workers = std::max(1, std::min<int>(args.parallel, static_cast<int>(docs.size())));
  if (workers <= 1) {
    for (size_t i = 0; i < docs.size(); ++i) {
      records[i] = run_generation(docs[i], *backends.generator, args.max_rounds);
    }
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= docs.size()) return;
        records[i] = run_generation(docs[i], *backends.generator, args.max_rounds);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& record : records) {
    if (!args.out_dir.empty()) {
      std::filesystem::create_directories(args.out_dir, ec);
      std::filesystem::path log_path =
          std::filesystem::path(args.out_dir) /
          detail_cli::sanitize_filename(record.paper_id + "__" + record.generator_id + ".json");
      std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
      if (!log) {
        err << "error: cannot write run log " << log_path.string() << "\n";
        return kExitIo;
      }
      log << to_json(record).dump(2) << "\n";
    }
    out << record.paper_id << ": rounds " << record.rounds.size() << ", stage2 "
        << (record.stage2_triggered ? "yes" : "no") << ", final "
        << (record.final_graph ? (record.final_valid ? "valid" : "invalid") : "absent");
    if (record.generator_failed) out << " (generator failed)";
    out << "\n";
  }

  out << "stage2 trigger rate: " << detail::format1(stage2_trigger_rate(records)) << "% ("
      << records.size() << " paper" << (records.size() == 1 ? "" : "s") << ")\n";
  bool any_failed = false;
  for (const auto& r : records) any_failed = any_failed || r.generator_failed;
  return any_failed ? kExitBackend : kExitOk;
}

}  // namespace arche::cli
