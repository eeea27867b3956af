#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "arche/corpus.hpp"
#include "arche/dot.hpp"
#include "arche/judge.hpp"
#include "arche/prompts.hpp"
#include "arche/validate.hpp"

namespace arche {

/// One generator round: the prompt that was sent, the raw response, and what
/// the parser/validator made of it.
struct GenerationRound {
  std::string prompt;
  std::string raw_response;
  bool parse_ok = false;
  std::string parse_error;  // set when parse_ok is false
  ValidationReport report;  // empty when the response did not parse
  std::optional<Rlt> graph;
};

struct GenerationRecord {
  std::string paper_id;
  std::string generator_id;
  std::vector<GenerationRound> rounds;
  bool stage2_triggered = false;  // equivalent to rounds.size() > 1
  bool generator_failed = false;  // hard backend failure ended the run
  std::optional<Rlt> final_graph; // latest parseable graph, even if invalid
  bool final_valid = false;
};

inline std::string build_generation_prompt(const CorpusDocument& doc) {
  return prompts::render_generation_prompt(doc);
}

/// Human-readable bullet lines, one per defect.
inline std::vector<std::string> issue_lines(const ValidationReport& report) {
  std::vector<std::string> lines;
  lines.reserve(report.defects.size());
  for (const auto& defect : report.defects) lines.push_back(defect.message);
  return lines;
}

/// Stage-2 prompt from a validation report. The report must have defects.
inline std::string build_repair_prompt(std::string_view previous_response,
                                       const ValidationReport& report,
                                       const CorpusDocument& doc) {
  if (report.is_valid()) {
    throw NoDefects("cannot build a repair prompt from a defect-free report");
  }
  return prompts::render_repair_prompt(previous_response, issue_lines(report), doc);
}

/// Stage 1 generation followed by up to max_rounds-1 repair rounds. Rounds
/// stop early once a graph validates cleanly; a response that does not even
/// parse is repaired via its parse error. The generator backend carries its
/// own cache, so a cached run replays byte-for-byte.
inline GenerationRecord run_generation(const CorpusDocument& doc, TextBackend& generator,
                                       int max_rounds = 3) {
  if (max_rounds < 1) throw Error("run_generation requires max_rounds >= 1");

  GenerationRecord record;
  record.paper_id = doc.paper_id;
  record.generator_id = generator.id();

  std::string prompt = build_generation_prompt(doc);
  for (int round = 0; round < max_rounds; ++round) {
    GenerationRound r;
    r.prompt = prompt;
    try {
      r.raw_response = generator.complete(prompt);
    } catch (const TransportError& e) {
      r.parse_error = std::string("generator failed: ") + e.what();
      record.rounds.push_back(std::move(r));
      record.generator_failed = true;
      break;
    }

    std::vector<std::string> issues;
    try {
      dot::ParseResult parsed = dot::parse(r.raw_response);
      r.parse_ok = true;
      r.graph = std::move(parsed.graph);
      r.report = validate(*r.graph);
      issues = issue_lines(r.report);
    } catch (const dot::ParseError& e) {
      r.parse_error = e.what();
      issues = {std::string("The graph could not be parsed as DOT: ") + e.what()};
    }

    bool valid = r.parse_ok && r.report.is_valid();
    std::string raw = r.raw_response;
    if (r.graph) {
      record.final_graph = r.graph;
      record.final_valid = r.report.is_valid();
    }
    record.rounds.push_back(std::move(r));
    if (valid) break;
    if (round + 1 < max_rounds) {
      prompt = prompts::render_repair_prompt(raw, issues, doc);
    }
  }

  record.stage2_triggered = record.rounds.size() > 1;
  return record;
}

/// Share of runs that needed at least one repair round.
inline double stage2_trigger_rate(std::span<const GenerationRecord> records) {
  if (records.empty()) throw EmptyInput("stage2_trigger_rate requires at least one record");
  int triggered = 0;
  for (const auto& r : records) {
    if (r.stage2_triggered) ++triggered;
  }
  return 100.0 * triggered / static_cast<double>(records.size());
}

inline nlohmann::json to_json(const GenerationRecord& record) {
  nlohmann::json rounds = nlohmann::json::array();
  for (size_t i = 0; i < record.rounds.size(); ++i) {
    const GenerationRound& r = record.rounds[i];
    nlohmann::json jr{{"round", i + 1},
                      {"prompt", r.prompt},
                      {"response", r.raw_response},
                      {"parse_ok", r.parse_ok}};
    if (!r.parse_ok) {
      jr["parse_error"] = r.parse_error;
      jr["report"] = nullptr;
    } else {
      jr["report"] = to_json(r.report);
    }
    rounds.push_back(std::move(jr));
  }
  return nlohmann::json{
      {"schema_version", 1},
      {"paper_id", record.paper_id},
      {"generator_id", record.generator_id},
      {"template_versions",
       {{"generation", std::string(prompts::kGenerationTemplateVersion)},
        {"repair", std::string(prompts::kRepairTemplateVersion)}}},
      {"stage2_triggered", record.stage2_triggered},
      {"generator_failed", record.generator_failed},
      {"final_valid", record.final_valid},
      {"final_graph_dot",
       record.final_graph ? nlohmann::json(dot::serialize(*record.final_graph))
                          : nlohmann::json(nullptr)},
      {"rounds", rounds}};
}

}  // namespace arche
