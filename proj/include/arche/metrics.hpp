#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "arche/corpus.hpp"
#include "arche/judge.hpp"
#include "arche/rlt.hpp"
#include "arche/text.hpp"
#include "arche/validate.hpp"

namespace arche {

enum class StepStatus { Correct, Wrong, FormatError };

constexpr std::string_view to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Correct: return "correct";
    case StepStatus::Wrong: return "wrong";
    case StepStatus::FormatError: return "format_error";
  }
  return "";  // unreachable
}

/// Outcome for one reasoning step. format_error means the step never
/// reached the panel (malformed pairing or unrecognized label), so it has
/// no vote.
struct StepResult {
  std::string step_id;  // conclusion node id
  StepStatus status = StepStatus::FormatError;
  std::optional<VoteOutcome> vote;
};

struct ScoreOptions {
  /// Which nodes of a correct step contribute content to entity coverage.
  enum class EcNodes { PremisesAndConclusion, PremisesOnly };
  /// What "relevant to the final answer" means for effective steps.
  enum class AesConnectivity { WeakComponent, DirectedPathToRoot };

  EcNodes ec_nodes = EcNodes::PremisesAndConclusion;
  AesConnectivity aes_connectivity = AesConnectivity::WeakComponent;
  int parallel = 0;  // max concurrent (step, judge) tasks; 0 = hardware concurrency
};

namespace detail_metrics {

inline JudgeRequest build_request(const ReasoningStep& step, const Rlt& graph,
                                  const CorpusDocument& doc) {
  JudgeRequest request;
  request.step_id = step.conclusion;
  request.paradigm = paradigm_of(step.paradigm).value();  // caller guarantees non-Malformed
  for (const auto& premise : step.premises) {
    const RltNode* node = graph.find_node(premise.node_id);
    GroundedContent content =
        node ? resolve(node->coordinate, doc, node->transcription)
             : GroundedContent{premise.node_id, GroundingOrigin::FallbackTranscription};
    request.premises.push_back(GroundedPremise{role_of(premise.type.value()), content.text});
  }
  const RltNode* conclusion = graph.find_node(step.conclusion);
  request.conclusion = conclusion
                           ? resolve(conclusion->coordinate, doc, conclusion->transcription).text
                           : step.conclusion;
  return request;
}

inline int resolve_parallelism(int requested, size_t task_count) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n = std::min<int>(n, static_cast<int>(std::max<size_t>(task_count, 1)));
  return std::max(n, 1);
}

}  // namespace detail_metrics

/// Algorithm core: every step is either judged by the panel or marked
/// format_error without spending a single judge call. Judge calls run
/// concurrently per (step, judge) pair; results are ordered by conclusion id.
inline std::vector<StepResult> validate_steps(const Rlt& graph, const CorpusDocument& doc,
                                              const JudgePanel& panel, int parallel = 0) {
  std::vector<ReasoningStep> steps = extract_steps(graph);
  std::vector<StepResult> results(steps.size());
  struct Task {
    size_t step_index;
    size_t judge_index;
  };
  std::vector<Task> tasks;
  std::vector<std::optional<JudgeRequest>> requests(steps.size());
  std::vector<std::vector<Verdict>> verdicts(steps.size());

  for (size_t i = 0; i < steps.size(); ++i) {
    results[i].step_id = steps[i].conclusion;
    if (steps[i].paradigm == StepParadigm::Malformed) {
      results[i].status = StepStatus::FormatError;
      continue;
    }
    requests[i] = detail_metrics::build_request(steps[i], graph, doc);
    verdicts[i].resize(JudgePanel::kSize);
    for (size_t j = 0; j < JudgePanel::kSize; ++j) tasks.push_back(Task{i, j});
  }

  if (!tasks.empty()) {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      while (true) {
        size_t t = next.fetch_add(1, std::memory_order_relaxed);
        if (t >= tasks.size()) return;
        const Task& task = tasks[t];
        const auto& judge = panel.judges()[task.judge_index];
        try {
          verdicts[task.step_index][task.judge_index] = judge->evaluate(*requests[task.step_index]);
        } catch (const std::exception& e) {
          verdicts[task.step_index][task.judge_index] =
              Verdict{VerdictValue::Unavailable, judge->id(), e.what()};
        }
      }
    };
    int workers = detail_metrics::resolve_parallelism(parallel, tasks.size());
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (size_t i = 0; i < steps.size(); ++i) {
    if (!requests[i]) continue;
    VoteOutcome outcome = majority_vote(std::move(verdicts[i]));
    results[i].status =
        outcome.decision == Decision::Correct ? StepStatus::Correct : StepStatus::Wrong;
    results[i].vote = std::move(outcome);
  }
  return results;
}

/// Correct steps over all attempted steps; format errors stay in the
/// denominator. Kept as exact counts, rendered as a percentage on demand.
struct ReaResult {
  int correct = 0;
  int total = 0;

  bool no_steps() const { return total == 0; }
  double percent() const { return total == 0 ? 0.0 : 100.0 * correct / total; }
};

inline ReaResult rea(std::span<const StepResult> results) {
  ReaResult r;
  r.total = static_cast<int>(results.size());
  for (const auto& s : results) {
    if (s.status == StepStatus::Correct) ++r.correct;
  }
  return r;
}

struct EcResult {
  std::vector<std::string> core;     // gold entities, extraction order
  std::vector<std::string> covered;  // covered subset, same order
  bool no_unique_root = false;       // component anchored at smallest sink instead
  bool no_core_entities = false;

  int covered_count() const { return static_cast<int>(covered.size()); }
  int core_count() const { return static_cast<int>(core.size()); }
  double percent() const {
    return core.empty() ? 0.0 : 100.0 * static_cast<double>(covered.size()) / core.size();
  }
};

/// Entity coverage per the evaluation algorithm: gold entities come from the
/// introduction's core idea; candidate nodes are those participating in
/// correct steps within the root's weakly-connected component; an entity is
/// covered when its normalized form occurs inside any candidate's grounded
/// content.
inline EcResult ec(const Rlt& graph, const CorpusDocument& doc,
                   std::span<const StepResult> results, TextBackend& entity_backend,
                   const ScoreOptions& options = {}, WarningSink warn = {}) {
  EcResult out;
  std::string idea = extract_core_idea(doc.introduction, entity_backend);
  out.core = extract_core_entities(idea, entity_backend, warn);
  if (out.core.empty()) {
    out.no_core_entities = true;
    return out;
  }

  std::vector<std::string> sinks = detail_validate::sinks_of(graph);
  out.no_unique_root = sinks.size() != 1;
  auto anchor = detail_validate::component_anchor(graph);
  std::set<std::string> component =
      anchor ? detail_validate::weak_component(graph, *anchor) : std::set<std::string>{};

  std::map<std::string, const ReasoningStep*> steps_by_id;
  std::vector<ReasoningStep> steps = extract_steps(graph);
  for (const auto& s : steps) steps_by_id[s.conclusion] = &s;

  std::set<std::string> candidates;
  for (const auto& result : results) {
    if (result.status != StepStatus::Correct) continue;
    auto it = steps_by_id.find(result.step_id);
    if (it == steps_by_id.end()) continue;
    const ReasoningStep& step = *it->second;
    for (const auto& premise : step.premises) {
      if (component.count(premise.node_id)) candidates.insert(premise.node_id);
    }
    if (options.ec_nodes == ScoreOptions::EcNodes::PremisesAndConclusion &&
        component.count(step.conclusion)) {
      candidates.insert(step.conclusion);
    }
  }

  std::vector<std::string> contents;
  contents.reserve(candidates.size());
  for (const auto& id : candidates) {
    const RltNode* node = graph.find_node(id);
    if (!node) continue;
    contents.push_back(
        detail::normalize_for_match(resolve(node->coordinate, doc, node->transcription).text));
  }

  for (const auto& entity : out.core) {
    std::string needle = detail::normalize_for_match(entity);
    if (needle.empty()) continue;
    for (const auto& content : contents) {
      if (content.find(needle) != std::string::npos) {
        out.covered.push_back(entity);
        break;
      }
    }
  }
  return out;
}

/// Table-3 semantics: accuracy among valid-format steps only, per paradigm;
/// paradigms with no valid step are absent from the map.
inline std::map<Paradigm, double> per_paradigm_accuracy(std::span<const StepResult> results,
                                                        std::span<const ReasoningStep> steps) {
  std::map<std::string, StepParadigm> paradigm_by_id;
  for (const auto& s : steps) paradigm_by_id[s.conclusion] = s.paradigm;

  std::map<Paradigm, std::pair<int, int>> counts;  // paradigm -> (correct, valid)
  for (const auto& result : results) {
    if (result.status == StepStatus::FormatError) continue;
    auto it = paradigm_by_id.find(result.step_id);
    if (it == paradigm_by_id.end()) continue;
    auto paradigm = paradigm_of(it->second);
    if (!paradigm) continue;
    auto& [correct, valid] = counts[*paradigm];
    ++valid;
    if (result.status == StepStatus::Correct) ++correct;
  }
  std::map<Paradigm, double> out;
  for (const auto& [paradigm, count] : counts) {
    out[paradigm] = 100.0 * count.first / count.second;
  }
  return out;
}

/// Everything one scored paper produces.
struct EvaluationReport {
  std::string paper_id;
  ReaResult rea;
  EcResult ec;
  std::vector<StepResult> step_results;
  std::map<Paradigm, double> per_paradigm_accuracy;
  int total_steps = 0;
  int effective_steps = 0;  // correct steps connected to the root
};

/// Counts correct steps whose conclusion is relevant to the final answer
/// (inside the root's weak component, or with a directed path to the root
/// under the strict option).
inline int count_effective_steps(const Rlt& graph, std::span<const StepResult> results,
                                 const ScoreOptions& options = {}) {
  auto anchor = detail_validate::component_anchor(graph);
  if (!anchor) return 0;
  std::set<std::string> relevant =
      options.aes_connectivity == ScoreOptions::AesConnectivity::WeakComponent
          ? detail_validate::weak_component(graph, *anchor)
          : detail_validate::directed_ancestors(graph, *anchor);
  int n = 0;
  for (const auto& result : results) {
    if (result.status == StepStatus::Correct && relevant.count(result.step_id)) ++n;
  }
  return n;
}

/// The full per-paper evaluation: step validation, REA, EC, per-paradigm
/// accuracy and the step-efficiency counters.
inline EvaluationReport score_graph(std::string paper_id, const Rlt& graph,
                                    const CorpusDocument& doc, const JudgePanel& panel,
                                    TextBackend& entity_backend, const ScoreOptions& options = {},
                                    WarningSink warn = {}) {
  EvaluationReport report;
  report.paper_id = std::move(paper_id);
  std::vector<ReasoningStep> steps = extract_steps(graph);
  report.step_results = validate_steps(graph, doc, panel, options.parallel);
  report.rea = rea(report.step_results);
  report.ec = ec(graph, doc, report.step_results, entity_backend, options, warn);
  report.per_paradigm_accuracy = per_paradigm_accuracy(report.step_results, steps);
  report.total_steps = static_cast<int>(report.step_results.size());
  report.effective_steps = count_effective_steps(graph, report.step_results, options);
  return report;
}

/// ATS/AES aggregates. Sums are kept exact; means are rendered on demand.
struct StepMetrics {
  long long total_steps_sum = 0;
  long long effective_steps_sum = 0;
  int reports = 0;

  double ats() const { return static_cast<double>(total_steps_sum) / reports; }
  double aes() const { return static_cast<double>(effective_steps_sum) / reports; }
};

inline StepMetrics step_metrics(std::span<const EvaluationReport> reports) {
  if (reports.empty()) throw EmptyInput("step_metrics requires at least one report");
  StepMetrics m;
  m.reports = static_cast<int>(reports.size());
  for (const auto& r : reports) {
    m.total_steps_sum += r.total_steps;
    m.effective_steps_sum += r.effective_steps;
  }
  return m;
}

struct DomainAverages {
  int papers = 0;
  double mean_rea = 0.0;
  double mean_ec = 0.0;
};

/// Mean REA/EC per domain bucket plus overall; empty buckets are absent.
struct AggregateSummary {
  std::map<DomainTag, DomainAverages> per_domain;
  DomainAverages overall;
};

inline AggregateSummary aggregate(std::span<const EvaluationReport> reports,
                                  std::span<const DomainTag> domain_tags) {
  if (reports.size() != domain_tags.size()) {
    throw Error("aggregate: reports and domain tags must align");
  }
  AggregateSummary summary;
  std::map<DomainTag, std::pair<double, double>> sums;
  std::pair<double, double> overall{0.0, 0.0};
  for (size_t i = 0; i < reports.size(); ++i) {
    double r = reports[i].rea.percent();
    double e = reports[i].ec.percent();
    auto& bucket = sums[domain_tags[i]];
    bucket.first += r;
    bucket.second += e;
    ++summary.per_domain[domain_tags[i]].papers;
    overall.first += r;
    overall.second += e;
    ++summary.overall.papers;
  }
  for (auto& [tag, avg] : summary.per_domain) {
    avg.mean_rea = sums[tag].first / avg.papers;
    avg.mean_ec = sums[tag].second / avg.papers;
  }
  if (summary.overall.papers > 0) {
    summary.overall.mean_rea = overall.first / summary.overall.papers;
    summary.overall.mean_ec = overall.second / summary.overall.papers;
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const StepResult& s) {
  nlohmann::json j{{"step_id", s.step_id}, {"status", std::string(to_string(s.status))}};
  j["vote"] = s.vote ? to_json(*s.vote) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.step_results) steps.push_back(to_json(s));
  nlohmann::json per_paradigm = nlohmann::json::object();
  for (const auto& [paradigm, accuracy] : r.per_paradigm_accuracy) {
    per_paradigm[std::string(to_string(paradigm))] = accuracy;
  }
  return nlohmann::json{
      {"schema_version", 1},
      {"paper_id", r.paper_id},
      {"rea",
       {{"percent", r.rea.percent()},
        {"correct", r.rea.correct},
        {"total", r.rea.total},
        {"no_steps", r.rea.no_steps()}}},
      {"ec",
       {{"percent", r.ec.percent()},
        {"covered", r.ec.covered_count()},
        {"total", r.ec.core_count()},
        {"core_entities", r.ec.core},
        {"covered_entities", r.ec.covered},
        {"no_unique_root", r.ec.no_unique_root},
        {"no_core_entities", r.ec.no_core_entities}}},
      {"per_paradigm_accuracy", per_paradigm},
      {"total_steps", r.total_steps},
      {"effective_steps", r.effective_steps},
      {"steps", steps}};
}

inline std::string render_report_table(const EvaluationReport& r) {
  using detail::format1;
  std::string out;
  out += "Paper: " + r.paper_id + "\n";
  out += "REA: " + format1(r.rea.percent()) + "%  (" + std::to_string(r.rea.correct) +
         " correct / " + std::to_string(r.rea.total) + " attempted" +
         (r.rea.no_steps() ? ", no steps" : "") + ")\n";
  out += "EC:  " + format1(r.ec.percent()) + "%  (" + std::to_string(r.ec.covered_count()) +
         " of " + std::to_string(r.ec.core_count()) + " core entities" +
         (r.ec.no_unique_root ? ", no unique root" : "") + ")\n";
  out += "Total steps: " + std::to_string(r.total_steps) +
         "   Effective steps: " + std::to_string(r.effective_steps) + "\n";
  if (!r.per_paradigm_accuracy.empty()) {
    out += "Accuracy by paradigm (valid-format steps only):\n";
    for (const auto& [paradigm, accuracy] : r.per_paradigm_accuracy) {
      std::string name(to_string(paradigm));
      name[0] = static_cast<char>(name[0] - 'a' + 'A');
      out += "  " + name + std::string(12 - name.size(), ' ') + format1(accuracy) + "%\n";
    }
  }
  out += "Steps:\n";
  for (const auto& s : r.step_results) {
    out += "  " + s.step_id + ": " + std::string(to_string(s.status));
    if (s.vote) {
      out += " (votes " + std::to_string(s.vote->tally.correct) + "-" +
             std::to_string(s.vote->tally.wrong);
      if (s.vote->tally.unavailable > 0) {
        out += ", " + std::to_string(s.vote->tally.unavailable) + " unavailable";
      }
      if (s.vote->tie_broken) out += ", tie";
      out += ")";
    }
    out += "\n";
  }
  return out;
}

/// One CSV row per paper: the (EC, REA) pair for frontier-style plots.
inline std::string csv_header() { return "paper_id,ec,rea\n"; }

inline std::string to_csv_row(const EvaluationReport& r) {
  return r.paper_id + "," + detail::format1(r.ec.percent()) + "," +
         detail::format1(r.rea.percent()) + "\n";
}

inline std::string render_summary_table(const AggregateSummary& summary) {
  using detail::format1;
  auto pad_left = [](const std::string& s, int width) {
    int gap = width - static_cast<int>(s.size());
    return std::string(gap > 0 ? static_cast<size_t>(gap) : 1, ' ') + s;
  };
  std::string out = "Domain                 Papers    REA     EC\n";
  auto row = [&](std::string_view name, const DomainAverages& avg) {
    std::string line(name);
    if (line.size() < 22) line.resize(22, ' ');
    line += pad_left(std::to_string(avg.papers), 7);
    line += pad_left(format1(avg.mean_rea), 7);
    line += pad_left(format1(avg.mean_ec), 7);
    out += line + "\n";
  };
  for (const auto& [tag, avg] : summary.per_domain) {
    std::string name(to_string(tag));
    name[0] = static_cast<char>(name[0] - 'a' + 'A');
    if (tag != DomainTag::Other) name += " Sciences";
    row(name, avg);
  }
  row("Overall", summary.overall);
  return out;
}

}  // namespace arche
