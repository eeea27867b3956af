#pragma once

#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "arche/coordinate.hpp"
#include "arche/errors.hpp"
#include "arche/text.hpp"

namespace arche {

enum class DomainTag { Physical, Biological, Other };

constexpr std::string_view to_string(DomainTag t) {
  switch (t) {
    case DomainTag::Physical: return "physical";
    case DomainTag::Biological: return "biological";
    case DomainTag::Other: return "other";
  }
  return "";  // unreachable
}

inline std::optional<DomainTag> parse_domain_tag(std::string_view s) {
  std::string v = detail::to_lower(detail::trim(s));
  if (v == "physical") return DomainTag::Physical;
  if (v == "biological") return DomainTag::Biological;
  if (v == "other") return DomainTag::Other;
  return std::nullopt;
}

struct CitationRecord {
  int index = 0;  // 1-based position within the sentence's citation list
  std::string ref_id;
  std::vector<std::string> viewpoints;  // 1-indexed by position
};

struct SentenceRecord {
  int index = 0;  // 1-based position within the document
  std::string text;
  std::vector<std::string> viewpoints;
  std::vector<CitationRecord> citations;
};

/// One paper's introduction with its indexed sentences, viewpoints and
/// cited-reference viewpoints. Immutable after load.
struct CorpusDocument {
  std::string paper_id;
  DomainTag domain_tag = DomainTag::Other;
  std::string introduction;
  std::vector<SentenceRecord> sentences;  // dense indices 1..N
};

namespace detail_corpus {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key,
                                     const std::string& pointer) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(pointer + "/" + key, "missing required field");
  return *it;
}

inline std::string require_string(const nlohmann::json& j, const char* key,
                                  const std::string& pointer) {
  const auto& v = require(j, key, pointer);
  if (!v.is_string()) throw SchemaError(pointer + "/" + key, "expected a string");
  return v.get<std::string>();
}

inline int require_int(const nlohmann::json& j, const char* key, const std::string& pointer) {
  const auto& v = require(j, key, pointer);
  if (!v.is_number_integer()) throw SchemaError(pointer + "/" + key, "expected an integer");
  return v.get<int>();
}

inline const nlohmann::json& require_array(const nlohmann::json& j, const char* key,
                                           const std::string& pointer) {
  const auto& v = require(j, key, pointer);
  if (!v.is_array()) throw SchemaError(pointer + "/" + key, "expected an array");
  return v;
}

}  // namespace detail_corpus

/// Loads and fully validates a document (see docs/document_schema.md).
/// Index fields must equal the element's 1-based position.
inline CorpusDocument load_document(const nlohmann::json& j) {
  using namespace detail_corpus;
  if (!j.is_object()) throw SchemaError("", "document must be a JSON object");

  int version = require_int(j, "schema_version", "");
  if (version != 1) {
    throw SchemaError("/schema_version", "unsupported schema_version " + std::to_string(version));
  }

  CorpusDocument doc;
  doc.paper_id = require_string(j, "paper_id", "");
  if (doc.paper_id.empty()) throw SchemaError("/paper_id", "paper_id must be non-empty");

  std::string tag = require_string(j, "domain_tag", "");
  auto parsed_tag = parse_domain_tag(tag);
  if (!parsed_tag) {
    throw SchemaError("/domain_tag", "domain_tag must be physical, biological or other");
  }
  doc.domain_tag = *parsed_tag;

  const auto& intro = require(j, "introduction", "");
  if (!intro.is_object()) throw SchemaError("/introduction", "expected an object");
  doc.introduction = require_string(intro, "content", "/introduction");

  const auto& sentences = require_array(j, "sentences", "");
  int expected_index = 1;
  for (size_t i = 0; i < sentences.size(); ++i) {
    std::string sp = "/sentences/" + std::to_string(i);
    const auto& sj = sentences[i];
    if (!sj.is_object()) throw SchemaError(sp, "expected an object");

    SentenceRecord s;
    s.index = require_int(sj, "index", sp);
    if (s.index != expected_index) {
      throw IndexGapError(sp + "/index", "sentence indices must be dense 1..N; expected " +
                                             std::to_string(expected_index) + ", got " +
                                             std::to_string(s.index));
    }
    ++expected_index;
    s.text = require_string(sj, "text", sp);

    const auto& vps = require_array(sj, "viewpoints", sp);
    for (size_t v = 0; v < vps.size(); ++v) {
      std::string vp = sp + "/viewpoints/" + std::to_string(v);
      if (!vps[v].is_string()) throw SchemaError(vp, "expected a string");
      std::string text = vps[v].get<std::string>();
      if (text.empty()) throw SchemaError(vp, "viewpoint must be non-empty");
      s.viewpoints.push_back(std::move(text));
    }

    const auto& cits = require_array(sj, "citations", sp);
    int expected_cit = 1;
    for (size_t c = 0; c < cits.size(); ++c) {
      std::string cp = sp + "/citations/" + std::to_string(c);
      if (!cits[c].is_object()) throw SchemaError(cp, "expected an object");
      CitationRecord cit;
      cit.index = require_int(cits[c], "index", cp);
      if (cit.index != expected_cit) {
        throw IndexGapError(cp + "/index", "citation indices must be dense 1..N; expected " +
                                               std::to_string(expected_cit) + ", got " +
                                               std::to_string(cit.index));
      }
      ++expected_cit;
      cit.ref_id = require_string(cits[c], "ref_id", cp);
      const auto& rvps = require_array(cits[c], "viewpoints", cp);
      for (size_t v = 0; v < rvps.size(); ++v) {
        std::string vp = cp + "/viewpoints/" + std::to_string(v);
        if (!rvps[v].is_string()) throw SchemaError(vp, "expected a string");
        cit.viewpoints.push_back(rvps[v].get<std::string>());
      }
      s.citations.push_back(std::move(cit));
    }
    doc.sentences.push_back(std::move(s));
  }
  return doc;
}

inline CorpusDocument load_document_text(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SchemaError("", "input is not valid JSON");
  return load_document(j);
}

inline CorpusDocument load_document_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open document file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_document_text(buf.str());
}

inline nlohmann::json to_json(const CorpusDocument& doc) {
  nlohmann::json sentences = nlohmann::json::array();
  for (const auto& s : doc.sentences) {
    nlohmann::json citations = nlohmann::json::array();
    for (const auto& c : s.citations) {
      citations.push_back({{"index", c.index}, {"ref_id", c.ref_id}, {"viewpoints", c.viewpoints}});
    }
    sentences.push_back({{"index", s.index},
                         {"text", s.text},
                         {"viewpoints", s.viewpoints},
                         {"citations", citations}});
  }
  return nlohmann::json{{"schema_version", 1},
                        {"paper_id", doc.paper_id},
                        {"domain_tag", std::string(to_string(doc.domain_tag))},
                        {"introduction", {{"content", doc.introduction}}},
                        {"sentences", sentences}};
}

enum class GroundingOrigin {
  Sentence,
  SentenceViewpoint,
  ReferenceViewpoint,
  ImplicitTranscription,   // (0,0,0): the transcription is the content
  FallbackTranscription,   // coordinate dangles; transcription used instead
};

constexpr std::string_view to_string(GroundingOrigin o) {
  switch (o) {
    case GroundingOrigin::Sentence: return "sentence";
    case GroundingOrigin::SentenceViewpoint: return "sentence_viewpoint";
    case GroundingOrigin::ReferenceViewpoint: return "reference_viewpoint";
    case GroundingOrigin::ImplicitTranscription: return "implicit_transcription";
    case GroundingOrigin::FallbackTranscription: return "fallback_transcription";
  }
  return "";  // unreachable
}

struct GroundedContent {
  std::string text;
  GroundingOrigin origin;
};

/// Maps a coordinate to source text. Total: out-of-range (or pattern-invalid)
/// coordinates fall back to the node's transcription so that scoring never
/// aborts on sloppy model output.
inline GroundedContent resolve(const SourceCoordinate& coordinate, const CorpusDocument& doc,
                               std::string_view fallback_transcription) {
  auto fallback = [&](GroundingOrigin origin) {
    return GroundedContent{std::string(fallback_transcription), origin};
  };
  if (coordinate.is_implicit()) return fallback(GroundingOrigin::ImplicitTranscription);
  if (!coordinate_pattern_valid(coordinate)) {
    return fallback(GroundingOrigin::FallbackTranscription);
  }
  if (coordinate.x < 1 || static_cast<size_t>(coordinate.x) > doc.sentences.size()) {
    return fallback(GroundingOrigin::FallbackTranscription);
  }
  const SentenceRecord& sentence = doc.sentences[static_cast<size_t>(coordinate.x) - 1];
  if (coordinate.y == 0) {
    return GroundedContent{sentence.text, GroundingOrigin::Sentence};
  }
  if (coordinate.z == 0) {
    if (static_cast<size_t>(coordinate.y) > sentence.viewpoints.size()) {
      return fallback(GroundingOrigin::FallbackTranscription);
    }
    return GroundedContent{sentence.viewpoints[static_cast<size_t>(coordinate.y) - 1],
                           GroundingOrigin::SentenceViewpoint};
  }
  if (static_cast<size_t>(coordinate.y) > sentence.citations.size()) {
    return fallback(GroundingOrigin::FallbackTranscription);
  }
  const CitationRecord& citation = sentence.citations[static_cast<size_t>(coordinate.y) - 1];
  if (static_cast<size_t>(coordinate.z) > citation.viewpoints.size()) {
    return fallback(GroundingOrigin::FallbackTranscription);
  }
  return GroundedContent{citation.viewpoints[static_cast<size_t>(coordinate.z) - 1],
                         GroundingOrigin::ReferenceViewpoint};
}

/// Corpus-level totals and per-article ratios. Ratios are kept raw here;
/// tables render them to one decimal.
struct CorpusStats {
  long long total_articles = 0;
  long long total_sentences = 0;
  long long total_viewpoints = 0;
  long long total_citations = 0;
  long long total_referenced_viewpoints = 0;

  long long total_viewpoints_combined() const {
    return total_viewpoints + total_referenced_viewpoints;
  }
  double avg_sentences() const {
    return static_cast<double>(total_sentences) / static_cast<double>(total_articles);
  }
  double avg_viewpoints() const {
    return static_cast<double>(total_viewpoints) / static_cast<double>(total_articles);
  }
  double avg_citations() const {
    return static_cast<double>(total_citations) / static_cast<double>(total_articles);
  }
  double viewpoints_per_sentence() const {
    return static_cast<double>(total_viewpoints) / static_cast<double>(total_sentences);
  }

  static CorpusStats from_totals(long long articles, long long sentences, long long viewpoints,
                                 long long citations, long long referenced_viewpoints) {
    if (articles <= 0) throw EmptyCorpus("corpus statistics need at least one article");
    return CorpusStats{articles, sentences, viewpoints, citations, referenced_viewpoints};
  }
};

inline CorpusStats corpus_stats(std::span<const CorpusDocument> docs) {
  if (docs.empty()) throw EmptyCorpus("corpus statistics need at least one document");
  CorpusStats s;
  s.total_articles = static_cast<long long>(docs.size());
  for (const auto& doc : docs) {
    s.total_sentences += static_cast<long long>(doc.sentences.size());
    for (const auto& sentence : doc.sentences) {
      s.total_viewpoints += static_cast<long long>(sentence.viewpoints.size());
      s.total_citations += static_cast<long long>(sentence.citations.size());
      for (const auto& citation : sentence.citations) {
        s.total_referenced_viewpoints += static_cast<long long>(citation.viewpoints.size());
      }
    }
  }
  return s;
}

inline nlohmann::json to_json(const CorpusStats& s) {
  return nlohmann::json{
      {"schema_version", 1},
      {"totals",
       {{"articles", s.total_articles},
        {"sentences", s.total_sentences},
        {"viewpoints", s.total_viewpoints},
        {"citations", s.total_citations},
        {"referenced_viewpoints", s.total_referenced_viewpoints},
        {"viewpoints_combined", s.total_viewpoints_combined()}}},
      {"averages_per_article",
       {{"sentences", s.avg_sentences()},
        {"viewpoints", s.avg_viewpoints()},
        {"citations", s.avg_citations()},
        {"viewpoints_per_sentence", s.viewpoints_per_sentence()}}}};
}

inline std::string render_table(const CorpusStats& s) {
  using detail::format1;
  using detail::group_digits;
  auto row = [](std::string_view label, const std::string& value) {
    std::string line = "  ";
    line += label;
    int pad = 38 - static_cast<int>(label.size()) - static_cast<int>(value.size());
    line.append(pad > 1 ? static_cast<size_t>(pad) : 1, ' ');
    line += value;
    line += "\n";
    return line;
  };
  std::string out;
  out += "Overall\n";
  out += row("Total Articles", group_digits(s.total_articles));
  out += row("Total Sentences", group_digits(s.total_sentences));
  out += row("Total Viewpoints", group_digits(s.total_viewpoints));
  out += row("Total Citations", group_digits(s.total_citations));
  out += row("Total Referenced Viewpoints", group_digits(s.total_referenced_viewpoints));
  out += row("Total Viewpoints (Combined)", group_digits(s.total_viewpoints_combined()));
  out += "Average per Article\n";
  out += row("Sentences", format1(s.avg_sentences()));
  out += row("Viewpoints", format1(s.avg_viewpoints()));
  out += row("Citations", format1(s.avg_citations()));
  out += row("Viewpoints per Sentence", format1(s.viewpoints_per_sentence()));
  return out;
}

}  // namespace arche
