#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arche/coordinate.hpp"
#include "arche/edge_type.hpp"
#include "arche/errors.hpp"

namespace arche {

struct RltNode {
  std::string id;
  SourceCoordinate coordinate;
  std::string transcription;
  /// Attributes other than label ("shape" etc.), kept verbatim and
  /// semantically ignored. Sorted by key.
  std::vector<std::pair<std::string, std::string>> attributes;

  friend bool operator==(const RltNode&, const RltNode&) = default;
};

/// `type` is empty when the label is not one of the six recognized ones;
/// such edges parse fine and fail validation later. `label` holds the
/// canonical spelling for recognized types and the verbatim text otherwise.
struct RltEdge {
  std::string from;
  std::string to;
  std::optional<EdgeType> type;
  std::string label;

  friend bool operator==(const RltEdge&, const RltEdge&) = default;
};

inline RltEdge make_edge(std::string from, std::string to, EdgeType type) {
  return RltEdge{std::move(from), std::move(to), type, std::string(label_of(type))};
}

inline RltEdge make_edge(std::string from, std::string to, std::string raw_label) {
  std::optional<EdgeType> type = try_classify_edge_type(raw_label);
  std::string label = type ? std::string(label_of(*type)) : std::move(raw_label);
  return RltEdge{std::move(from), std::move(to), type, std::move(label)};
}

/// A parsed reasoning graph. Node ids are unique and edge endpoints resolve;
/// everything else (single root, acyclicity, pairing) is judged by the
/// validator so that structurally broken graphs can still be represented
/// and scored.
struct Rlt {
  std::vector<RltNode> nodes;
  std::vector<RltEdge> edges;

  bool has_node(std::string_view id) const { return find_node(id) != nullptr; }

  const RltNode* find_node(std::string_view id) const {
    for (const auto& n : nodes) {
      if (n.id == id) return &n;
    }
    return nullptr;
  }

  void add_node(RltNode node) {
    if (node.id.empty()) throw Error("node id must be non-empty");
    if (has_node(node.id)) throw DuplicateNodeId("duplicate node id: \"" + node.id + "\"");
    nodes.push_back(std::move(node));
  }

  void add_edge(RltEdge edge) {
    if (edge.from == edge.to) {
      throw SelfLoopEdge("self-loop on node \"" + edge.from + "\"");
    }
    if (!has_node(edge.from)) throw UnknownNodeId("edge references unknown node \"" + edge.from + "\"");
    if (!has_node(edge.to)) throw UnknownNodeId("edge references unknown node \"" + edge.to + "\"");
    edges.push_back(std::move(edge));
  }
};

/// Order-insensitive graph equality: same node set (ids, coordinates,
/// transcriptions, attributes) and same edge multiset.
inline bool structurally_equal(const Rlt& a, const Rlt& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;

  auto nodes_sorted = [](const Rlt& g) {
    std::vector<RltNode> ns = g.nodes;
    std::sort(ns.begin(), ns.end(),
              [](const RltNode& x, const RltNode& y) { return x.id < y.id; });
    return ns;
  };
  auto edges_sorted = [](const Rlt& g) {
    std::vector<RltEdge> es = g.edges;
    std::sort(es.begin(), es.end(), [](const RltEdge& x, const RltEdge& y) {
      return std::tie(x.from, x.to, x.label) < std::tie(y.from, y.to, y.label);
    });
    return es;
  };
  return nodes_sorted(a) == nodes_sorted(b) && edges_sorted(a) == edges_sorted(b);
}

/// The paradigm a premise-edge multiset declares, or Malformed when it
/// matches no legal pattern.
enum class StepParadigm { Deduction, Induction, Abduction, Malformed };

constexpr std::string_view to_string(StepParadigm p) {
  switch (p) {
    case StepParadigm::Deduction: return "deduction";
    case StepParadigm::Induction: return "induction";
    case StepParadigm::Abduction: return "abduction";
    case StepParadigm::Malformed: return "malformed";
  }
  return "";  // unreachable
}

inline std::optional<Paradigm> paradigm_of(StepParadigm p) {
  switch (p) {
    case StepParadigm::Deduction: return Paradigm::Deduction;
    case StepParadigm::Induction: return Paradigm::Induction;
    case StepParadigm::Abduction: return Paradigm::Abduction;
    case StepParadigm::Malformed: return std::nullopt;
  }
  return std::nullopt;
}

struct StepPremise {
  std::string node_id;
  std::optional<EdgeType> type;  // empty for unrecognized labels
  std::string label;

  friend bool operator==(const StepPremise&, const StepPremise&) = default;
};

/// One conclusion node together with all of its incoming premise edges.
struct ReasoningStep {
  std::string conclusion;
  std::vector<StepPremise> premises;
  StepParadigm paradigm = StepParadigm::Malformed;
};

/// Pairing rules, applied to the premise multiset (order never matters):
///   deduction: exactly one deduction-rule and one deduction-case
///   abduction: exactly one abduction-phenomenon and one abduction-knowledge
///   induction: exactly one induction-common and at least one induction-case
/// Everything else, including any unrecognized label, is Malformed.
inline StepParadigm step_paradigm(std::span<const StepPremise> premises) {
  int dr = 0, dc = 0, ica = 0, ico = 0, ap = 0, ak = 0, unknown = 0;
  for (const auto& p : premises) {
    if (!p.type) {
      ++unknown;
      continue;
    }
    switch (*p.type) {
      case EdgeType::DeductionRule: ++dr; break;
      case EdgeType::DeductionCase: ++dc; break;
      case EdgeType::InductionCase: ++ica; break;
      case EdgeType::InductionCommon: ++ico; break;
      case EdgeType::AbductionPhenomenon: ++ap; break;
      case EdgeType::AbductionKnowledge: ++ak; break;
    }
  }
  if (unknown > 0 || premises.empty()) return StepParadigm::Malformed;
  if (dr == 1 && dc == 1 && ica + ico + ap + ak == 0) return StepParadigm::Deduction;
  if (ap == 1 && ak == 1 && dr + dc + ica + ico == 0) return StepParadigm::Abduction;
  if (ico == 1 && ica >= 1 && dr + dc + ap + ak == 0) return StepParadigm::Induction;
  return StepParadigm::Malformed;
}

/// One ReasoningStep per node with at least one incoming edge, ordered by
/// conclusion id. Premises keep the edge-list order.
inline std::vector<ReasoningStep> extract_steps(const Rlt& graph) {
  std::map<std::string, std::vector<StepPremise>> incoming;
  for (const auto& e : graph.edges) {
    incoming[e.to].push_back(StepPremise{e.from, e.type, e.label});
  }
  std::vector<ReasoningStep> steps;
  steps.reserve(incoming.size());
  for (auto& [conclusion, premises] : incoming) {
    ReasoningStep step;
    step.conclusion = conclusion;
    step.paradigm = step_paradigm(premises);
    step.premises = std::move(premises);
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace arche
