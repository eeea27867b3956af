// Acceptance suite: every release criterion, one pass/fail line each.
// Exit status 0 only when all criteria hold.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arche/arche.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/mock_transport.hpp"
#include "support/oracle.hpp"

using namespace arche;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

long long ms_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

#define EXPECT(cond)                                                             \
  do {                                                                           \
    if (!(cond)) {                                                               \
      detail = "failed: " #cond " (line " + std::to_string(__LINE__) + ")";      \
      return false;                                                              \
    }                                                                            \
  } while (0)

// 1. The two appendix fixtures behave exactly as derived by hand.
bool criterion_fixture_validation(std::string& detail) {
  auto start = Clock::now();

  Rlt bad = testsupport::fixture_graph("bad_rlt.dot");
  ValidationReport report = validate(bad);
  std::vector<std::string> violations;
  for (const auto& d : report.defects) {
    EXPECT(d.kind == DefectKind::PairingViolation);
    violations.push_back(d.nodes.at(0));
  }
  std::sort(violations.begin(), violations.end());
  EXPECT((violations == std::vector<std::string>{"11", "12", "13", "3", "4", "7", "8"}));

  bool found_14 = false;
  for (const auto& step : extract_steps(bad)) {
    if (step.conclusion == "14") {
      found_14 = true;
      EXPECT(step.paradigm == StepParadigm::Deduction);
    }
  }
  EXPECT(found_14);
  EXPECT(root_of(bad) == "13");

  Rlt better = testsupport::fixture_graph("better_rlt.dot");
  auto steps = extract_steps(better);
  EXPECT(steps.size() == 13);
  for (const auto& step : steps) {
    EXPECT(step.paradigm != StepParadigm::Malformed);
  }
  EXPECT(validate(better).is_valid());

  long long elapsed = ms_since(start);
  EXPECT(elapsed < 1000);
  detail = "7 pairing violations at {3,4,7,8,11,12,13}, step 14 deduction; "
           "13/13 well-formed steps; " + std::to_string(elapsed) + " ms";
  return true;
}

// 2. REA/EC/ATS/AES equal an independent brute-force oracle exactly on
//    random graphs of <= 8 nodes (integer counts, zero tolerance).
bool criterion_oracle_equivalence(std::string& detail) {
  auto start = Clock::now();
  std::mt19937_64 rng(20250801);
  CorpusDocument doc = testsupport::fixture_doc("carbon_doc.json");
  std::vector<std::string> entities{"direct air capture", "carbon capture", "seawater",
                                    "bicarbonate", "sunlight", "tidal energy"};
  constexpr int kGraphs = 250;

  long long impl_total_sum = 0, impl_effective_sum = 0;
  long long oracle_total_sum = 0, oracle_effective_sum = 0;

  for (int trial = 0; trial < kGraphs; ++trial) {
    Rlt g = testsupport::random_messy_graph(rng, 8);
    EXPECT(g.nodes.size() <= 8);
    auto backends = testsupport::random_panel_backends(rng, g);

    std::vector<testsupport::oracle::VerdictTable> tables;
    for (const auto& backend : backends) {
      auto* scripted = dynamic_cast<ScriptedJudge*>(backend.get());
      EXPECT(scripted != nullptr);
      testsupport::oracle::VerdictTable table;
      for (const auto& n : g.nodes) {
        JudgeRequest probe;
        probe.step_id = n.id;
        table[n.id] = scripted->evaluate(probe).value;
      }
      tables.push_back(std::move(table));
    }

    JudgePanel panel(backends);
    auto results = validate_steps(g, doc, panel);
    ReaResult rea_result = rea(results);
    ScriptedTextBackend entity_backend(
        "entities",
        {{"TEMPLATE: " + std::string(prompts::kCoreIdeaTemplateVersion), "idea"},
         {"TEMPLATE: " + std::string(prompts::kCoreEntitiesTemplateVersion),
          [&entities] {
            std::string lines;
            for (const auto& e : entities) lines += e + "\n";
            return lines;
          }()}});
    EcResult ec_result = ec(g, doc, results, entity_backend);
    int effective = count_effective_steps(g, results);

    auto expected = testsupport::oracle::score(g, doc, tables, entities);
    EXPECT(rea_result.correct == expected.rea_correct);
    EXPECT(rea_result.total == expected.rea_total);
    EXPECT(ec_result.covered_count() == expected.ec_covered);
    EXPECT(ec_result.core_count() == expected.ec_total);
    EXPECT(static_cast<int>(results.size()) == expected.total_steps);
    EXPECT(effective == expected.effective_steps);

    impl_total_sum += results.size();
    impl_effective_sum += effective;
    oracle_total_sum += expected.total_steps;
    oracle_effective_sum += expected.effective_steps;
  }

  // ATS/AES over the whole batch: same integer sums over the same count
  // means identical exact rationals.
  EXPECT(impl_total_sum == oracle_total_sum);
  EXPECT(impl_effective_sum == oracle_effective_sum);

  long long elapsed = ms_since(start);
  EXPECT(elapsed < 30000);
  detail = std::to_string(kGraphs) + " graphs, REA/EC/ATS/AES exact; " +
           std::to_string(elapsed) + " ms";
  return true;
}

// 3. All 27 three-judge verdict combinations follow majority + tie->correct
//    + all-unavailable->wrong.
bool criterion_vote_semantics(std::string& detail) {
  using V = VerdictValue;
  const V values[] = {V::Correct, V::Wrong, V::Unavailable};
  int cases = 0;
  for (V a : values) {
    for (V b : values) {
      for (V c : values) {
        std::vector<Verdict> verdicts{{a, "a", ""}, {b, "b", ""}, {c, "c", ""}};
        VoteOutcome o = majority_vote(verdicts);
        int correct = (a == V::Correct) + (b == V::Correct) + (c == V::Correct);
        int wrong = (a == V::Wrong) + (b == V::Wrong) + (c == V::Wrong);
        int unavailable = 3 - correct - wrong;
        if (unavailable == 3) {
          EXPECT(o.decision == Decision::Wrong);
          EXPECT(o.all_unavailable);
        } else {
          EXPECT(o.all_unavailable == false);
          EXPECT(o.decision == (correct >= wrong ? Decision::Correct : Decision::Wrong));
          EXPECT(o.tie_broken == (correct == wrong));
        }
        ++cases;
      }
    }
  }
  EXPECT(cases == 27);
  detail = "27/27 combinations match the truth table";
  return true;
}

// 4. Corpus statistics reproduce the published totals and averages.
bool criterion_table2_arithmetic(std::string& detail) {
  CorpusStats s = CorpusStats::from_totals(70, 2164, 5418, 1891, 33321);
  EXPECT(detail::format1(s.avg_sentences()) == "30.9");
  EXPECT(detail::format1(s.avg_viewpoints()) == "77.4");
  EXPECT(detail::format1(s.avg_citations()) == "27.0");
  EXPECT(detail::format1(s.viewpoints_per_sentence()) == "2.5");
  EXPECT(s.total_viewpoints_combined() == 38739);
  detail = "averages 30.9 / 77.4 / 27.0 / 2.5, combined 38,739";
  return true;
}

// 5. Stage-2 trigger rate reproduces the published percentages.
bool criterion_table6_arithmetic(std::string& detail) {
  auto records_with = [](int triggered, int total) {
    std::vector<GenerationRecord> records(static_cast<size_t>(total));
    for (int i = 0; i < triggered; ++i) records[static_cast<size_t>(i)].stage2_triggered = true;
    return records;
  };
  EXPECT(detail::format1(stage2_trigger_rate(records_with(58, 70))) == "82.9");
  EXPECT(detail::format1(stage2_trigger_rate(records_with(37, 70))) == "52.9");
  detail = "58/70 -> 82.9%, 37/70 -> 52.9%";
  return true;
}

// 6. parse -> serialize -> parse is a structural fixed point; serialization
//    is canonical (deterministic and insertion-order independent).
bool criterion_round_trip(std::string& detail) {
  for (const char* name : {"bad_rlt.dot", "better_rlt.dot"}) {
    Rlt first = testsupport::fixture_graph(name);
    std::string canonical = dot::serialize(first);
    Rlt second = dot::parse(canonical).graph;
    EXPECT(structurally_equal(first, second));
    EXPECT(dot::serialize(second) == canonical);
  }

  std::mt19937_64 rng(424242);
  constexpr int kGraphs = 500;
  for (int trial = 0; trial < kGraphs; ++trial) {
    Rlt g = testsupport::random_messy_graph(rng, 8);
    if (!g.nodes.empty()) {
      g.nodes[0].transcription = "tricky \"quotes\" and \\ slashes\nand newlines";
    }
    std::string text = dot::serialize(g);
    Rlt reparsed = dot::parse(text).graph;
    EXPECT(structurally_equal(g, reparsed));
    EXPECT(dot::serialize(reparsed) == text);

    Rlt shuffled = g;
    std::shuffle(shuffled.nodes.begin(), shuffled.nodes.end(), rng);
    std::shuffle(shuffled.edges.begin(), shuffled.edges.end(), rng);
    EXPECT(dot::serialize(shuffled) == text);
  }
  detail = "2 fixtures + " + std::to_string(kGraphs) + " random graphs fixed-point, canonical";
  return true;
}

// 7. Two cached score runs: byte-identical reports, zero network calls on
//    the second run.
bool criterion_reproducibility(std::string& detail) {
  fs::path dir = fs::temp_directory_path() / "arche-acceptance-repro";
  fs::remove_all(dir);
  fs::create_directories(dir);

  nlohmann::json config{
      {"judges",
       {{{"type", "remote"}, {"id", "j1"}, {"url", "http://mock.local/v1"}, {"model", "m1"}},
        {{"type", "remote"}, {"id", "j2"}, {"url", "http://mock.local/v1"}, {"model", "m2"}},
        {{"type", "remote"}, {"id", "j3"}, {"url", "http://mock.local/v1"}, {"model", "m3"}}}},
      {"entity_backend",
       {{"type", "remote"}, {"id", "e"}, {"url", "http://mock.local/v1"}, {"model", "m"}}},
      {"cache_dir", (dir / "cache").string()}};
  fs::path config_path = dir / "config.json";
  {
    std::ofstream out(config_path);
    out << config.dump();
  }

  auto transport = std::make_shared<testsupport::MockTransport>([](const std::string& prompt) {
    if (prompt.find("TEMPLATE: core-idea/v1") == 0) return std::string("A carbon capture idea.");
    if (prompt.find("TEMPLATE: core-entities/v1") == 0) {
      return std::string("direct air capture\nseawater\ncarbon capture\nsunlight\nbicarbonate\n");
    }
    return std::string("CORRECT - the premises entail the conclusion.");
  });

  cli::ScoreArgs args;
  args.graph_path = testsupport::fixture_path("bad_rlt.dot");
  args.doc_path = testsupport::fixture_path("carbon_doc.json");
  args.config_path = config_path.string();
  args.json = true;

  std::ostringstream out1, err1, out2, err2;
  EXPECT(cli::cmd_score(args, out1, err1, transport) == cli::kExitOk);
  int first_run_calls = transport->calls();
  EXPECT(first_run_calls > 0);
  EXPECT(cli::cmd_score(args, out2, err2, transport) == cli::kExitOk);
  EXPECT(transport->calls() == first_run_calls);
  EXPECT(out1.str() == out2.str());
  EXPECT(!out1.str().empty());

  detail = "run 1: " + std::to_string(first_run_calls) +
           " network calls; run 2: 0 calls, byte-identical JSON";
  return true;
}

// 8. REA keeps format errors in the denominator while per-paradigm accuracy
//    drops them: 2 correct + 1 wrong + 1 format_error -> 50.0 vs 66.7.
bool criterion_rea_denominator(std::string& detail) {
  Rlt g;
  auto deduction = [&](const std::string& suffix) {
    g.add_node(RltNode{"rule_" + suffix, {1, 0, 0}, "", {}});
    g.add_node(RltNode{"case_" + suffix, {2, 0, 0}, "", {}});
    g.add_node(RltNode{"concl_" + suffix, {0, 0, 0}, "conclusion " + suffix, {}});
    g.add_edge(make_edge("rule_" + suffix, "concl_" + suffix, EdgeType::DeductionRule));
    g.add_edge(make_edge("case_" + suffix, "concl_" + suffix, EdgeType::DeductionCase));
  };
  deduction("a");
  deduction("b");
  deduction("c");
  // Malformed fourth step: a lone deduction-case edge.
  g.add_node(RltNode{"stray", {3, 0, 0}, "", {}});
  g.add_node(RltNode{"concl_missing_half", {0, 0, 0}, "broken", {}});
  g.add_edge(make_edge("stray", "concl_missing_half", EdgeType::DeductionCase));

  std::map<std::string, VerdictValue> table{{"concl_a", VerdictValue::Correct},
                                            {"concl_b", VerdictValue::Correct},
                                            {"concl_c", VerdictValue::Wrong}};
  std::vector<std::shared_ptr<JudgeBackend>> judges;
  for (const char* id : {"a", "b", "c"}) {
    judges.push_back(std::make_shared<ScriptedJudge>(id, table, VerdictValue::Wrong));
  }
  JudgePanel panel(std::move(judges));
  CorpusDocument doc = testsupport::fixture_doc("carbon_doc.json");

  auto steps = extract_steps(g);
  auto results = validate_steps(g, doc, panel);
  EXPECT(results.size() == 4);  // 2 correct, 1 wrong, 1 format_error

  ReaResult r = rea(results);
  EXPECT(r.correct == 2);
  EXPECT(r.total == 4);
  EXPECT(r.percent() == 50.0);

  auto accuracy = per_paradigm_accuracy(results, steps);
  EXPECT(accuracy.size() == 1);
  EXPECT(detail::format1(accuracy.at(Paradigm::Deduction)) == "66.7");
  EXPECT(accuracy.at(Paradigm::Deduction) > 50.0);  // the published relationship

  detail = "REA 50.0 (format errors counted), valid-format accuracy 66.7";
  return true;
}

// 9. Monotonicity: flipping any wrong/format_error step to correct never
//    decreases REA or EC (1,000 randomized flips).
bool criterion_monotonicity(std::string& detail) {
  std::mt19937_64 rng(16180339);
  CorpusDocument doc = testsupport::fixture_doc("carbon_doc.json");
  std::vector<std::string> entities{"direct air capture", "carbon capture", "seawater",
                                    "bicarbonate", "sunlight", "tidal energy"};
  std::string entity_lines;
  for (const auto& e : entities) entity_lines += e + "\n";

  int flips = 0;
  while (flips < 1000) {
    Rlt g = testsupport::random_messy_graph(rng, 8);
    JudgePanel panel(testsupport::random_panel_backends(rng, g));
    auto results = validate_steps(g, doc, panel);
    if (results.empty()) continue;

    ScriptedTextBackend backend_a(
        "entities",
        {{"TEMPLATE: " + std::string(prompts::kCoreIdeaTemplateVersion), "idea"},
         {"TEMPLATE: " + std::string(prompts::kCoreEntitiesTemplateVersion), entity_lines}});
    ReaResult rea_before = rea(results);
    EcResult ec_before = ec(g, doc, results, backend_a);

    for (size_t i = 0; i < results.size() && flips < 1000; ++i) {
      if (results[i].status == StepStatus::Correct) continue;
      auto flipped = results;
      flipped[i].status = StepStatus::Correct;
      ScriptedTextBackend backend_b(
          "entities",
          {{"TEMPLATE: " + std::string(prompts::kCoreIdeaTemplateVersion), "idea"},
           {"TEMPLATE: " + std::string(prompts::kCoreEntitiesTemplateVersion), entity_lines}});
      ReaResult rea_after = rea(flipped);
      EcResult ec_after = ec(g, doc, flipped, backend_b);
      EXPECT(rea_after.percent() >= rea_before.percent());
      EXPECT(ec_after.covered_count() >= ec_before.covered_count());
      EXPECT(ec_after.percent() >= ec_before.percent());
      ++flips;
    }
  }
  detail = "1000 flips, REA/EC never decreased";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*run)(std::string&);
  };
  const Criterion criteria[] = {
      {"1. fixture-validation", criterion_fixture_validation},
      {"2. metric-oracle-equivalence", criterion_oracle_equivalence},
      {"3. vote-semantics", criterion_vote_semantics},
      {"4. table-2-arithmetic", criterion_table2_arithmetic},
      {"5. table-6-arithmetic", criterion_table6_arithmetic},
      {"6. round-trip", criterion_round_trip},
      {"7. reproducibility", criterion_reproducibility},
      {"8. rea-denominator-semantics", criterion_rea_denominator},
      {"9. monotonicity", criterion_monotonicity},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::string note;
    bool ok = false;
    try {
      ok = criterion.run(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", criterion.name,
                note.empty() ? "" : " - ", note.c_str());
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", std::size(criteria));
  return 0;
}
