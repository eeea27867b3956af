#pragma once

#include <atomic>
#include <cstdlib>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "arche/cache.hpp"
#include "arche/edge_type.hpp"
#include "arche/errors.hpp"
#include "arche/http.hpp"
#include "arche/prompts.hpp"
#include "arche/text.hpp"

namespace arche {

enum class VerdictValue { Correct, Wrong, Unavailable };

constexpr std::string_view to_string(VerdictValue v) {
  switch (v) {
    case VerdictValue::Correct: return "correct";
    case VerdictValue::Wrong: return "wrong";
    case VerdictValue::Unavailable: return "unavailable";
  }
  return "";  // unreachable
}

/// One judge's ruling. Unavailable only ever means transport or parse
/// failure, never a substantive answer.
struct Verdict {
  VerdictValue value = VerdictValue::Unavailable;
  std::string judge_id;
  std::string rationale;
};

enum class Decision { Correct, Wrong };

constexpr std::string_view to_string(Decision d) {
  return d == Decision::Correct ? "correct" : "wrong";
}

struct VoteTally {
  int correct = 0;
  int wrong = 0;
  int unavailable = 0;
};

struct VoteOutcome {
  Decision decision = Decision::Wrong;
  VoteTally tally;
  bool tie_broken = false;      // correct == wrong among available verdicts
  bool all_unavailable = false; // every judge failed; decision forced to Wrong
  std::vector<Verdict> verdicts;
};

/// A structurally valid step, grounded and ready for judging.
struct GroundedPremise {
  PremiseRole role;
  std::string text;
};

struct JudgeRequest {
  std::string step_id;
  Paradigm paradigm = Paradigm::Deduction;
  std::vector<GroundedPremise> premises;
  std::string conclusion;
};

/// Majority with ties favoring Correct. Unavailable verdicts shrink the
/// tally; when all verdicts are unavailable the decision is Wrong and
/// flagged, so outages never inflate scores.
inline VoteOutcome majority_vote(std::vector<Verdict> verdicts) {
  VoteOutcome outcome;
  for (const auto& v : verdicts) {
    switch (v.value) {
      case VerdictValue::Correct: ++outcome.tally.correct; break;
      case VerdictValue::Wrong: ++outcome.tally.wrong; break;
      case VerdictValue::Unavailable: ++outcome.tally.unavailable; break;
    }
  }
  outcome.verdicts = std::move(verdicts);
  if (outcome.tally.unavailable == static_cast<int>(outcome.verdicts.size())) {
    // Covers the empty case too: no usable verdict never scores correct.
    outcome.decision = Decision::Wrong;
    outcome.all_unavailable = true;
    return outcome;
  }
  if (outcome.tally.correct > outcome.tally.wrong) {
    outcome.decision = Decision::Correct;
  } else if (outcome.tally.correct == outcome.tally.wrong) {
    outcome.decision = Decision::Correct;
    outcome.tie_broken = true;
  } else {
    outcome.decision = Decision::Wrong;
  }
  return outcome;
}

inline nlohmann::json to_json(const VoteOutcome& o) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : o.verdicts) {
    verdicts.push_back({{"judge_id", v.judge_id},
                        {"value", std::string(to_string(v.value))},
                        {"rationale", v.rationale}});
  }
  return nlohmann::json{{"decision", std::string(to_string(o.decision))},
                        {"tally",
                         {{"correct", o.tally.correct},
                          {"wrong", o.tally.wrong},
                          {"unavailable", o.tally.unavailable}}},
                        {"tie_broken", o.tie_broken},
                        {"all_unavailable", o.all_unavailable},
                        {"verdicts", verdicts}};
}

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

/// A judge rules on one step. Implementations must be safe for concurrent
/// calls and, with caching on, deterministic given identical request and
/// backend identity.
class JudgeBackend {
public:
  virtual ~JudgeBackend() = default;
  virtual std::string id() const = 0;
  virtual Verdict evaluate(const JudgeRequest& request) = 0;
};

/// Table-driven verdicts keyed by step id. The workhorse of the test suite.
class ScriptedJudge final : public JudgeBackend {
public:
  ScriptedJudge(std::string id, std::map<std::string, VerdictValue> verdicts,
                VerdictValue default_value = VerdictValue::Correct)
      : id_(std::move(id)), verdicts_(std::move(verdicts)), default_(default_value) {}

  std::string id() const override { return id_; }

  Verdict evaluate(const JudgeRequest& request) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    auto it = verdicts_.find(request.step_id);
    VerdictValue value = it == verdicts_.end() ? default_ : it->second;
    return Verdict{value, id_, "scripted"};
  }

  int call_count() const { return calls_.load(std::memory_order_relaxed); }

private:
  std::string id_;
  std::map<std::string, VerdictValue> verdicts_;
  VerdictValue default_;
  std::atomic<int> calls_{0};
};

/// Free-text completion backend (entity extraction, generation). Throws
/// TransportError when no answer could be obtained.
class TextBackend {
public:
  virtual ~TextBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(const std::string& prompt) = 0;
};

/// Answers by substring rules, first match wins; the template tag line that
/// every prompt starts with makes the rules stable.
class ScriptedTextBackend final : public TextBackend {
public:
  struct Rule {
    std::string contains;
    std::string response;
  };

  ScriptedTextBackend(std::string id, std::vector<Rule> rules, std::string fallback = "")
      : id_(std::move(id)), rules_(std::move(rules)), fallback_(std::move(fallback)) {}

  std::string id() const override { return id_; }

  std::string complete(const std::string& prompt) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    for (const auto& rule : rules_) {
      if (prompt.find(rule.contains) != std::string::npos) return rule.response;
    }
    return fallback_;
  }

  int call_count() const { return calls_.load(std::memory_order_relaxed); }

private:
  std::string id_;
  std::vector<Rule> rules_;
  std::string fallback_;
  std::atomic<int> calls_{0};
};

/// Replays a fixed sequence of responses; used to script multi-round
/// generation. Exhausting the sequence is a hard backend failure.
class ScriptedSequenceBackend final : public TextBackend {
public:
  ScriptedSequenceBackend(std::string id, std::vector<std::string> responses)
      : id_(std::move(id)), responses_(std::move(responses)) {}

  std::string id() const override { return id_; }

  std::string complete(const std::string&) override {
    size_t i = next_.fetch_add(1, std::memory_order_relaxed);
    if (i >= responses_.size()) {
      throw TransportError("scripted backend " + id_ + " has no response " + std::to_string(i));
    }
    return responses_[i];
  }

private:
  std::string id_;
  std::vector<std::string> responses_;
  std::atomic<size_t> next_{0};
};

/// Connection settings for a chat-completion style HTTP endpoint.
struct RemoteEndpoint {
  std::string url;    // e.g. https://api.example.com/v1/chat/completions
  std::string model;  // model name sent in the request body
  std::string api_key_env = "ARCHE_API_KEY";
  double temperature = 0.1;
  std::chrono::milliseconds timeout{60000};
  int retries = 2;  // additional attempts after the first
};

/// Chat-completion client with retries and the shared disk cache. Cache
/// hits bypass the network entirely.
class RemoteTextBackend final : public TextBackend {
public:
  RemoteTextBackend(std::string id, RemoteEndpoint endpoint, std::shared_ptr<Transport> transport,
                    std::shared_ptr<ResponseCache> cache = nullptr)
      : id_(std::move(id)),
        endpoint_(std::move(endpoint)),
        transport_(std::move(transport)),
        cache_(std::move(cache)) {}

  std::string id() const override { return id_; }

  std::string complete(const std::string& prompt) override {
    if (cache_) {
      if (auto hit = cache_->get(id_, prompt)) return *hit;
    }
    std::string response = complete_uncached(prompt);
    if (cache_) cache_->put(id_, prompt, response, prompts::template_tag_of(prompt));
    return response;
  }

private:
  std::string complete_uncached(const std::string& prompt) {
    nlohmann::json body{{"model", endpoint_.model},
                        {"temperature", endpoint_.temperature},
                        {"messages", nlohmann::json::array({nlohmann::json{
                                         {"role", "user"}, {"content", prompt}}})}};
    HttpHeaders headers;
    if (!endpoint_.api_key_env.empty()) {
      if (const char* key = std::getenv(endpoint_.api_key_env.c_str())) {
        headers.emplace_back("Authorization", std::string("Bearer ") + key);
      }
    }
    std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= endpoint_.retries; ++attempt) {
      try {
        HttpResponse res = transport_->post_json(endpoint_.url, headers, payload,
                                                 endpoint_.timeout);
        if (res.status < 200 || res.status >= 300) {
          last_error = "http status " + std::to_string(res.status);
          continue;
        }
        nlohmann::json reply = nlohmann::json::parse(res.body, nullptr, false);
        if (reply.is_discarded()) {
          last_error = "response body is not JSON";
          continue;
        }
        // OpenAI-style chat completion shape.
        if (reply.contains("choices") && reply["choices"].is_array() &&
            !reply["choices"].empty()) {
          const auto& choice = reply["choices"][0];
          if (choice.contains("message") && choice["message"].contains("content") &&
              choice["message"]["content"].is_string()) {
            return choice["message"]["content"].get<std::string>();
          }
        }
        last_error = "response lacks choices[0].message.content";
      } catch (const TransportError& e) {
        last_error = e.what();
      }
    }
    throw TransportError("backend " + id_ + ": " + last_error);
  }

  std::string id_;
  RemoteEndpoint endpoint_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<ResponseCache> cache_;
};

// ---------------------------------------------------------------------------
// Step validation prompt and verdict parsing
// ---------------------------------------------------------------------------

inline std::string render_step_validation_prompt(const JudgeRequest& request) {
  std::string out = "TEMPLATE: " + std::string(prompts::kStepValidationTemplateVersion) + "\n\n";
  out +=
      "You are validating one step of a scientific reasoning chain. The step\n"
      "declares its inference paradigm and lists its premises with their roles.\n\n";
  out += "PARADIGM: " + std::string(to_string(request.paradigm)) + "\n";
  switch (request.paradigm) {
    case Paradigm::Deduction:
      out += "(a general rule applied to a specific case yields the conclusion)\n";
      break;
    case Paradigm::Induction:
      out += "(specific cases plus a common pattern yield the generalized conclusion)\n";
      break;
    case Paradigm::Abduction:
      out += "(a phenomenon plus known mechanisms yield the explanatory hypothesis)\n";
      break;
  }
  out += "\nPREMISES:\n";
  for (const auto& p : request.premises) {
    out += "- [" + std::string(to_string(p.role)) + "] " + p.text + "\n";
  }
  out += "\nCONCLUSION:\n" + request.conclusion + "\n\n";
  out +=
      "Does the conclusion logically follow from the premises under the stated\n"
      "paradigm? Begin your answer with the single word CORRECT or INCORRECT,\n"
      "optionally followed by a short justification.\n";
  return out;
}

/// First alphabetic word decides: correct -> Correct, incorrect/wrong ->
/// Wrong; anything else is unparseable (nullopt).
inline std::optional<VerdictValue> parse_verdict_token(std::string_view raw) {
  size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && !((raw[i] >= 'a' && raw[i] <= 'z') || (raw[i] >= 'A' && raw[i] <= 'Z'))) {
      ++i;
    }
    size_t start = i;
    while (i < raw.size() && ((raw[i] >= 'a' && raw[i] <= 'z') || (raw[i] >= 'A' && raw[i] <= 'Z'))) {
      ++i;
    }
    if (start == i) return std::nullopt;
    std::string word = detail::to_lower(raw.substr(start, i - start));
    if (word == "correct" || word == "valid") return VerdictValue::Correct;
    if (word == "incorrect" || word == "wrong" || word == "invalid") return VerdictValue::Wrong;
    return std::nullopt;  // only the first word counts
  }
  return std::nullopt;
}

/// Renders the validation prompt, calls a chat endpoint, parses the
/// constrained answer token. Transport and parse failures become
/// Unavailable after retries; this judge never throws.
class RemoteChatJudge final : public JudgeBackend {
public:
  RemoteChatJudge(std::string id, RemoteEndpoint endpoint, std::shared_ptr<Transport> transport,
                  std::shared_ptr<ResponseCache> cache = nullptr)
      : id_(id), backend_(std::move(id), std::move(endpoint), std::move(transport),
                          std::move(cache)) {}

  std::string id() const override { return id_; }

  Verdict evaluate(const JudgeRequest& request) override {
    std::string prompt = render_step_validation_prompt(request);
    try {
      std::string raw = backend_.complete(prompt);
      if (auto value = parse_verdict_token(raw)) {
        return Verdict{*value, id_, raw};
      }
      return Verdict{VerdictValue::Unavailable, id_, "unparseable answer: " + raw};
    } catch (const TransportError& e) {
      return Verdict{VerdictValue::Unavailable, id_, e.what()};
    }
  }

private:
  std::string id_;
  RemoteTextBackend backend_;
};

// ---------------------------------------------------------------------------
// Panels
// ---------------------------------------------------------------------------

/// Exactly three judges, by construction.
class JudgePanel {
public:
  static constexpr size_t kSize = 3;

  explicit JudgePanel(std::vector<std::shared_ptr<JudgeBackend>> judges)
      : judges_(std::move(judges)) {
    if (judges_.size() != kSize) {
      throw ConfigError("a judge panel requires exactly 3 judges, got " +
                        std::to_string(judges_.size()));
    }
    for (const auto& j : judges_) {
      if (!j) throw ConfigError("judge panel contains a null backend");
    }
  }

  std::span<const std::shared_ptr<JudgeBackend>> judges() const { return judges_; }

private:
  std::vector<std::shared_ptr<JudgeBackend>> judges_;
};

/// Dispatches to all three judges concurrently and aggregates the majority.
/// A judge that throws is recorded as Unavailable.
inline VoteOutcome evaluate_step(const JudgeRequest& request, const JudgePanel& panel) {
  std::vector<std::future<Verdict>> futures;
  futures.reserve(JudgePanel::kSize);
  for (const auto& judge : panel.judges()) {
    futures.push_back(std::async(std::launch::async, [&request, judge] {
      try {
        return judge->evaluate(request);
      } catch (const std::exception& e) {
        return Verdict{VerdictValue::Unavailable, judge->id(), e.what()};
      }
    }));
  }
  std::vector<Verdict> verdicts;
  verdicts.reserve(futures.size());
  for (auto& f : futures) verdicts.push_back(f.get());
  return majority_vote(std::move(verdicts));
}

// ---------------------------------------------------------------------------
// Entity extraction
// ---------------------------------------------------------------------------

/// One-paragraph core research idea of an introduction. Backend failure is a
/// hard error here: entity coverage cannot proceed without it.
inline std::string extract_core_idea(std::string_view introduction, TextBackend& backend) {
  if (detail::trim(introduction).empty()) {
    throw Error("extract_core_idea requires a non-empty introduction");
  }
  try {
    return backend.complete(prompts::render_core_idea_prompt(introduction));
  } catch (const TransportError& e) {
    throw BackendUnavailable(std::string("core idea extraction failed: ") + e.what());
  }
}

/// Ordered, case-insensitively de-duplicated entity list parsed from the
/// backend's line-per-entity answer. List length outside 5..15 only warns.
inline std::vector<std::string> extract_core_entities(std::string_view core_idea,
                                                      TextBackend& backend,
                                                      WarningSink warn = {}) {
  if (detail::trim(core_idea).empty()) {
    throw Error("extract_core_entities requires a non-empty core idea");
  }
  std::string raw;
  try {
    raw = backend.complete(prompts::render_core_entities_prompt(core_idea));
  } catch (const TransportError& e) {
    throw BackendUnavailable(std::string("core entity extraction failed: ") + e.what());
  }

  std::vector<std::string> entities;
  std::set<std::string> seen;
  for (std::string_view line : detail::split_lines(raw)) {
    std::string_view item = detail::trim(line);
    // Strip list bullets and "1." / "2)" style numbering.
    while (!item.empty() && (item.front() == '-' || item.front() == '*')) {
      item.remove_prefix(1);
      item = detail::trim(item);
    }
    size_t digits = 0;
    while (digits < item.size() && item[digits] >= '0' && item[digits] <= '9') ++digits;
    if (digits > 0 && digits < item.size() && (item[digits] == '.' || item[digits] == ')')) {
      item.remove_prefix(digits + 1);
      item = detail::trim(item);
    }
    if (item.empty()) continue;
    std::string key = detail::normalize_for_match(item);
    if (key.empty() || !seen.insert(key).second) continue;
    entities.emplace_back(item);
  }
  if (warn && (entities.size() < 5 || entities.size() > 15)) {
    warn("entity list has " + std::to_string(entities.size()) +
         " entries; expected roughly 8-10");
  }
  return entities;
}

}  // namespace arche
