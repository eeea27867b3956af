#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arche/cache.hpp"
#include "arche/errors.hpp"
#include "arche/http.hpp"
#include "arche/judge.hpp"
#include "arche/prompts.hpp"

namespace arche {

/// Parsed backend configuration file (see docs/config_schema.md): three
/// judges, an entity backend, optionally a generator, shared cache/timeout
/// settings.
struct RunnerConfig {
  nlohmann::json judges = nlohmann::json::array();
  nlohmann::json entity_backend;     // may be null when only `run` is used
  nlohmann::json generator;          // may be null when only `score` is used
  std::string cache_dir;             // empty disables caching
  int timeout_ms = 60000;
  int retries = 2;
  int parallel = 0;
};

inline RunnerConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunnerConfig cfg;
  if (j.contains("judges")) {
    if (!j["judges"].is_array()) throw ConfigError("config: judges must be an array");
    cfg.judges = j["judges"];
  }
  if (j.contains("entity_backend")) cfg.entity_backend = j["entity_backend"];
  if (j.contains("generator")) cfg.generator = j["generator"];
  cfg.cache_dir = j.value("cache_dir", std::string());
  cfg.timeout_ms = j.value("timeout_ms", 60000);
  cfg.retries = j.value("retries", 2);
  cfg.parallel = j.value("parallel", 0);
  return cfg;
}

inline RunnerConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
  return parse_config(j);
}

namespace detail_config {

inline VerdictValue parse_verdict_value(const std::string& s, const std::string& context) {
  if (s == "correct") return VerdictValue::Correct;
  if (s == "wrong") return VerdictValue::Wrong;
  if (s == "unavailable") return VerdictValue::Unavailable;
  throw ConfigError(context + ": verdict must be correct, wrong or unavailable, got \"" + s +
                    "\"");
}

inline RemoteEndpoint parse_endpoint(const nlohmann::json& spec, const RunnerConfig& cfg) {
  RemoteEndpoint ep;
  if (!spec.contains("url") || !spec["url"].is_string()) {
    throw ConfigError("remote backend needs a url");
  }
  ep.url = spec["url"].get<std::string>();
  ep.model = spec.value("model", std::string());
  ep.api_key_env = spec.value("api_key_env", std::string("ARCHE_API_KEY"));
  ep.temperature = spec.value("temperature", 0.1);
  ep.timeout = std::chrono::milliseconds(spec.value("timeout_ms", cfg.timeout_ms));
  ep.retries = spec.value("retries", cfg.retries);
  return ep;
}

}  // namespace detail_config

/// Everything the scoring/generation commands need, built from config.
struct BackendSet {
  std::shared_ptr<ResponseCache> cache;
  std::shared_ptr<JudgePanel> panel;
  std::shared_ptr<TextBackend> entity_backend;
  std::shared_ptr<TextBackend> generator;
  int parallel = 0;
};

inline std::shared_ptr<JudgeBackend> build_judge(const nlohmann::json& spec,
                                                 const RunnerConfig& cfg,
                                                 std::shared_ptr<Transport> transport,
                                                 std::shared_ptr<ResponseCache> cache) {
  if (!spec.is_object() || !spec.contains("type")) {
    throw ConfigError("judge spec needs a type");
  }
  std::string type = spec["type"].get<std::string>();
  std::string id = spec.value("id", type);
  if (type == "scripted") {
    std::map<std::string, VerdictValue> verdicts;
    if (spec.contains("verdicts")) {
      for (const auto& [step_id, value] : spec["verdicts"].items()) {
        verdicts[step_id] =
            detail_config::parse_verdict_value(value.get<std::string>(), "judge " + id);
      }
    }
    VerdictValue default_value = detail_config::parse_verdict_value(
        spec.value("default", std::string("correct")), "judge " + id);
    return std::make_shared<ScriptedJudge>(id, std::move(verdicts), default_value);
  }
  if (type == "remote") {
    return std::make_shared<RemoteChatJudge>(id, detail_config::parse_endpoint(spec, cfg),
                                             std::move(transport), std::move(cache));
  }
  throw ConfigError("unknown judge type \"" + type + "\"");
}

inline std::shared_ptr<TextBackend> build_text_backend(const nlohmann::json& spec,
                                                       const RunnerConfig& cfg,
                                                       std::shared_ptr<Transport> transport,
                                                       std::shared_ptr<ResponseCache> cache) {
  if (!spec.is_object() || !spec.contains("type")) {
    throw ConfigError("text backend spec needs a type");
  }
  std::string type = spec["type"].get<std::string>();
  std::string id = spec.value("id", type);
  if (type == "scripted") {
    std::vector<ScriptedTextBackend::Rule> rules;
    // Convenience form for entity backends: core_idea + entities.
    if (spec.contains("core_idea")) {
      rules.push_back({"TEMPLATE: " + std::string(prompts::kCoreIdeaTemplateVersion),
                       spec["core_idea"].get<std::string>()});
    }
    if (spec.contains("entities")) {
      std::string lines;
      for (const auto& e : spec["entities"]) lines += e.get<std::string>() + "\n";
      rules.push_back(
          {"TEMPLATE: " + std::string(prompts::kCoreEntitiesTemplateVersion), lines});
    }
    if (spec.contains("rules")) {
      for (const auto& r : spec["rules"]) {
        rules.push_back({r.at("contains").get<std::string>(), r.at("response").get<std::string>()});
      }
    }
    return std::make_shared<ScriptedTextBackend>(id, std::move(rules),
                                                 spec.value("default", std::string()));
  }
  if (type == "scripted_sequence") {
    std::vector<std::string> responses;
    if (spec.contains("responses")) {
      for (const auto& r : spec["responses"]) responses.push_back(r.get<std::string>());
    }
    if (spec.contains("response_files")) {
      for (const auto& f : spec["response_files"]) {
        std::ifstream in(f.get<std::string>(), std::ios::binary);
        if (!in) throw Error("cannot open response file: " + f.get<std::string>());
        std::ostringstream buf;
        buf << in.rdbuf();
        responses.push_back(buf.str());
      }
    }
    return std::make_shared<ScriptedSequenceBackend>(id, std::move(responses));
  }
  if (type == "remote") {
    return std::make_shared<RemoteTextBackend>(id, detail_config::parse_endpoint(spec, cfg),
                                               std::move(transport), std::move(cache));
  }
  throw ConfigError("unknown text backend type \"" + type + "\"");
}

/// Builds the full backend set. `transport` is injectable for tests; the
/// judges and text backends share one disk cache.
inline BackendSet build_backends(const RunnerConfig& cfg,
                                 std::shared_ptr<Transport> transport = nullptr,
                                 WarningSink warn = {}) {
  BackendSet set;
  set.parallel = cfg.parallel;
  if (!transport) transport = default_transport();
  if (!cfg.cache_dir.empty()) {
    set.cache = std::make_shared<ResponseCache>(cfg.cache_dir, warn);
  }
  if (!cfg.judges.empty()) {
    std::vector<std::shared_ptr<JudgeBackend>> judges;
    for (const auto& spec : cfg.judges) {
      judges.push_back(build_judge(spec, cfg, transport, set.cache));
    }
    set.panel = std::make_shared<JudgePanel>(std::move(judges));
  }
  if (!cfg.entity_backend.is_null() && !cfg.entity_backend.empty()) {
    set.entity_backend = build_text_backend(cfg.entity_backend, cfg, transport, set.cache);
  }
  if (!cfg.generator.is_null() && !cfg.generator.empty()) {
    set.generator = build_text_backend(cfg.generator, cfg, transport, set.cache);
  }
  return set;
}

}  // namespace arche
