#pragma once

#include <span>
#include <string>
#include <string_view>

#include "arche/corpus.hpp"

namespace arche::prompts {

// Template versions. The version tag is the first line of every rendered
// prompt, so cache keys change whenever a template changes and every cached
// response records which template produced it.
inline constexpr std::string_view kGenerationTemplateVersion = "rlt-generation/v1";
inline constexpr std::string_view kRepairTemplateVersion = "rlt-repair/v1";
inline constexpr std::string_view kCoreIdeaTemplateVersion = "core-idea/v1";
inline constexpr std::string_view kCoreEntitiesTemplateVersion = "core-entities/v1";
inline constexpr std::string_view kStepValidationTemplateVersion = "step-validation/v1";

/// "TEMPLATE: <version>" when the prompt carries a version tag.
inline std::string template_tag_of(std::string_view prompt) {
  constexpr std::string_view prefix = "TEMPLATE: ";
  if (prompt.substr(0, prefix.size()) != prefix) return "";
  size_t end = prompt.find('\n');
  std::string_view line = prompt.substr(prefix.size(),
                                        end == std::string_view::npos ? std::string_view::npos
                                                                      : end - prefix.size());
  return std::string(detail::trim(line));
}

/// The node/edge/pairing/structure rules, shared verbatim between the
/// generation and repair prompts.
inline std::string render_format_requirements() {
  return
      "FORMAT REQUIREMENTS:\n"
      "1. NODE FORMAT: every node statement must be\n"
      "     node_id [label=\"(x,y,z) transcription\"];\n"
      "   where (x,y,z) is the source coordinate:\n"
      "     - (s,0,0)  the s-th sentence of the introduction\n"
      "     - (s,v,0)  the v-th viewpoint of sentence s\n"
      "     - (s,r,v)  the v-th viewpoint of the r-th reference cited by sentence s\n"
      "     - (0,0,0)  implicit knowledge you add; put the full statement in the transcription\n"
      "   The transcription restates the content in explicit reasoning form\n"
      "   (\"If ..., then ...\" for rules, \"Currently ...\" for cases).\n"
      "2. EDGE TYPES (only these six are allowed):\n"
      "     deduction-rule, deduction-case, abduction-phenomenon,\n"
      "     abduction-knowledge, induction-case, induction-common\n"
      "3. EDGE PAIRING: the incoming edges of every conclusion node must form\n"
      "   exactly one of these patterns:\n"
      "     - deduction: one deduction-rule edge and one deduction-case edge\n"
      "     - abduction: one abduction-phenomenon edge and one abduction-knowledge edge\n"
      "     - induction: one induction-common edge and one or more induction-case edges\n"
      "   Decompose multi-hop reasoning into intermediate (0,0,0) nodes so every\n"
      "   step uses exactly one pattern.\n"
      "4. STRUCTURE: the graph must be a directed acyclic graph with exactly one\n"
      "   root node (the final conclusion, the only node with no outgoing edges)\n"
      "   and no isolated nodes. Every node must eventually feed the root.\n";
}

/// The indexed source material, one block per sentence in coordinate order.
inline std::string render_sentences_block(const CorpusDocument& doc) {
  std::string out;
  for (const auto& sentence : doc.sentences) {
    std::string s = std::to_string(sentence.index);
    out += "(" + s + ",0,0) " + sentence.text + "\n";
    for (size_t v = 0; v < sentence.viewpoints.size(); ++v) {
      out += "  (" + s + "," + std::to_string(v + 1) + ",0) " + sentence.viewpoints[v] + "\n";
    }
    for (size_t c = 0; c < sentence.citations.size(); ++c) {
      const CitationRecord& citation = sentence.citations[c];
      out += "  reference " + std::to_string(c + 1) + " [" + citation.ref_id + "]:\n";
      for (size_t v = 0; v < citation.viewpoints.size(); ++v) {
        out += "    (" + s + "," + std::to_string(c + 1) + "," + std::to_string(v + 1) + ") " +
               citation.viewpoints[v] + "\n";
      }
    }
  }
  return out;
}

/// Stage-1 prompt. Deterministic given (template version, document).
inline std::string render_generation_prompt(const CorpusDocument& doc) {
  std::string out = "TEMPLATE: " + std::string(kGenerationTemplateVersion) + "\n\n";
  out +=
      "All sound reasoning is deductive (a rule applied to a case), inductive (a\n"
      "common pattern drawn from cases), or abductive (a hypothesis explaining a\n"
      "phenomenon from known mechanisms), or a combination of these.\n\n"
      "Read the introduction of a scientific paper below, together with its\n"
      "indexed sentences, their extracted viewpoints, and viewpoints from the\n"
      "abstracts of cited references. Reconstruct the latent chain of reasoning\n"
      "that leads from this source material to the paper's core research idea,\n"
      "as a single-rooted reasoning tree. Cover as much of the source material\n"
      "as you can while keeping every step logically tight.\n\n"
      "Output the tree as a Graphviz DOT digraph wrapped in a ```dot code block.\n\n";
  out += render_format_requirements();
  out += "\nPAPER CONTENT:\n" + doc.introduction + "\n";
  out += "\nEXTRACTED SENTENCES AND VIEWPOINTS:\n" + render_sentences_block(doc);
  return out;
}

/// Stage-2 prompt: detected issues, the offending graph, the full format
/// requirements again, then the source material for reference.
inline std::string render_repair_prompt(std::string_view previous_response,
                                        std::span<const std::string> issue_lines,
                                        const CorpusDocument& doc) {
  std::string out = "TEMPLATE: " + std::string(kRepairTemplateVersion) + "\n\n";
  out +=
      "The DOT graph below has structural issues. Fix ALL of them while\n"
      "preserving the reasoning content and the source coordinates.\n\n";
  out += "DETECTED ISSUES:\n";
  for (const auto& line : issue_lines) out += "- " + line + "\n";
  out += "\nORIGINAL DOT GRAPH (with issues):\n";
  out += previous_response;
  out += "\n\n";
  out += "Return ONLY the corrected graph, wrapped in a ```dot code block, and\n";
  out += "strictly follow all of the original format requirements:\n\n";
  out += render_format_requirements();
  out += "\nPAPER CONTENT FOR REFERENCE:\n" + doc.introduction + "\n";
  out += "\nEXTRACTED SENTENCES FOR REFERENCE:\n" + render_sentences_block(doc);
  return out;
}

inline std::string render_core_idea_prompt(std::string_view introduction) {
  std::string out = "TEMPLATE: " + std::string(kCoreIdeaTemplateVersion) + "\n\n";
  out +=
      "Read the introduction of a scientific paper below and synthesize its\n"
      "single core research idea: the main hypothesis or methodology the paper\n"
      "proposes. Answer with one paragraph and nothing else.\n\n"
      "INTRODUCTION:\n";
  out += introduction;
  out += "\n";
  return out;
}

inline std::string render_core_entities_prompt(std::string_view core_idea) {
  std::string out = "TEMPLATE: " + std::string(kCoreEntitiesTemplateVersion) + "\n\n";
  out +=
      "From the core research idea below, extract the key scientific entities:\n"
      "concrete concepts, materials, methods, and phenomena. Typically 8-10\n"
      "entities. Do not list any entity that is not explicitly mentioned in the\n"
      "idea. Answer with one entity per line and nothing else.\n\n"
      "CORE IDEA:\n";
  out += core_idea;
  out += "\n";
  return out;
}

}  // namespace arche::prompts
