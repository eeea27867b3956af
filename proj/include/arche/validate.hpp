#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "arche/rlt.hpp"

namespace arche {

enum class DefectKind {
  NoRoot,
  MultipleRoots,
  CycleDetected,
  IsolatedNode,
  InvalidEdgeLabel,
  PairingViolation,
};

constexpr std::string_view to_string(DefectKind k) {
  switch (k) {
    case DefectKind::NoRoot: return "no_root";
    case DefectKind::MultipleRoots: return "multiple_roots";
    case DefectKind::CycleDetected: return "cycle_detected";
    case DefectKind::IsolatedNode: return "isolated_node";
    case DefectKind::InvalidEdgeLabel: return "invalid_edge_label";
    case DefectKind::PairingViolation: return "pairing_violation";
  }
  return "";  // unreachable
}

/// One structural problem. `nodes` pinpoints the offending node(s): the
/// sinks for MultipleRoots, the witness cycle path for CycleDetected, the
/// edge endpoints for InvalidEdgeLabel, the conclusion for PairingViolation.
struct Defect {
  DefectKind kind;
  std::vector<std::string> nodes;
  std::string label;  // offending edge label, InvalidEdgeLabel only
  std::string message;
};

struct ValidationReport {
  std::vector<Defect> defects;
  /// Informational only, e.g. induction steps that would fail a strict
  /// exactly-two-edges reading of the pairing rule.
  std::vector<std::string> notes;

  bool is_valid() const { return defects.empty(); }
};

namespace detail_validate {

struct Degrees {
  std::map<std::string, int> in, out;
};

inline Degrees degrees(const Rlt& g) {
  Degrees d;
  for (const auto& n : g.nodes) {
    d.in[n.id] = 0;
    d.out[n.id] = 0;
  }
  for (const auto& e : g.edges) {
    ++d.out[e.from];
    ++d.in[e.to];
  }
  return d;
}

inline std::vector<std::string> sinks_of(const Rlt& g) {
  Degrees d = degrees(g);
  std::vector<std::string> sinks;
  for (const auto& [id, out] : d.out) {
    if (out == 0) sinks.push_back(id);
  }
  // std::map iteration is already sorted; kept explicit for clarity.
  std::sort(sinks.begin(), sinks.end());
  return sinks;
}

/// Anchor of "the root's component": the unique sink when there is one,
/// the lexicographically smallest sink otherwise, and the smallest node id
/// when the graph has no sink at all (fully cyclic).
inline std::optional<std::string> component_anchor(const Rlt& g) {
  if (g.nodes.empty()) return std::nullopt;
  std::vector<std::string> sinks = sinks_of(g);
  if (!sinks.empty()) return sinks.front();
  std::string smallest = g.nodes.front().id;
  for (const auto& n : g.nodes) smallest = std::min(smallest, n.id);
  return smallest;
}

/// Node ids weakly connected to `anchor` (direction ignored), anchor included.
inline std::set<std::string> weak_component(const Rlt& g, const std::string& anchor) {
  std::multimap<std::string, std::string> adj;
  for (const auto& e : g.edges) {
    adj.emplace(e.from, e.to);
    adj.emplace(e.to, e.from);
  }
  std::set<std::string> seen;
  std::deque<std::string> queue;
  if (g.has_node(anchor)) {
    seen.insert(anchor);
    queue.push_back(anchor);
  }
  while (!queue.empty()) {
    std::string id = std::move(queue.front());
    queue.pop_front();
    auto [lo, hi] = adj.equal_range(id);
    for (auto it = lo; it != hi; ++it) {
      if (seen.insert(it->second).second) queue.push_back(it->second);
    }
  }
  return seen;
}

/// Node ids with a directed path to `target` (target included).
inline std::set<std::string> directed_ancestors(const Rlt& g, const std::string& target) {
  std::multimap<std::string, std::string> rev;
  for (const auto& e : g.edges) rev.emplace(e.to, e.from);
  std::set<std::string> seen;
  std::deque<std::string> queue;
  if (g.has_node(target)) {
    seen.insert(target);
    queue.push_back(target);
  }
  while (!queue.empty()) {
    std::string id = std::move(queue.front());
    queue.pop_front();
    auto [lo, hi] = rev.equal_range(id);
    for (auto it = lo; it != hi; ++it) {
      if (seen.insert(it->second).second) queue.push_back(it->second);
    }
  }
  return seen;
}

/// Kahn peel; returns a witness cycle (in edge direction) if one exists.
inline std::optional<std::vector<std::string>> find_cycle(const Rlt& g) {
  std::map<std::string, int> indeg;
  std::multimap<std::string, std::string> succ;
  for (const auto& n : g.nodes) indeg[n.id] = 0;
  for (const auto& e : g.edges) {
    ++indeg[e.to];
    succ.emplace(e.from, e.to);
  }
  std::deque<std::string> zero;
  for (const auto& [id, d] : indeg) {
    if (d == 0) zero.push_back(id);
  }
  std::set<std::string> remaining;
  for (const auto& [id, d] : indeg) remaining.insert(id);
  while (!zero.empty()) {
    std::string id = std::move(zero.front());
    zero.pop_front();
    remaining.erase(id);
    auto [lo, hi] = succ.equal_range(id);
    for (auto it = lo; it != hi; ++it) {
      if (--indeg[it->second] == 0) zero.push_back(it->second);
    }
  }
  if (remaining.empty()) return std::nullopt;

  // Every remaining node has a remaining predecessor; walk predecessors
  // from the smallest remaining id until one repeats.
  std::multimap<std::string, std::string> pred;
  for (const auto& e : g.edges) {
    if (remaining.count(e.from) && remaining.count(e.to)) pred.emplace(e.to, e.from);
  }
  std::vector<std::string> walk{*remaining.begin()};
  std::map<std::string, size_t> seen_at{{walk.front(), 0}};
  while (true) {
    auto [lo, hi] = pred.equal_range(walk.back());
    std::string next = lo->second;
    for (auto it = lo; it != hi; ++it) next = std::min(next, it->second);
    auto [it, inserted] = seen_at.emplace(next, walk.size());
    if (!inserted) {
      std::vector<std::string> cycle(walk.begin() + static_cast<long>(it->second), walk.end());
      std::reverse(cycle.begin(), cycle.end());  // predecessor walk -> edge direction
      return cycle;
    }
    walk.push_back(std::move(next));
  }
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string premise_multiset_text(const ReasoningStep& step) {
  std::map<std::string, int> counts;
  for (const auto& p : step.premises) ++counts[p.label.empty() ? "<missing>" : p.label];
  std::vector<std::string> parts;
  for (const auto& [label, n] : counts) {
    parts.push_back(n == 1 ? label : std::to_string(n) + "x " + label);
  }
  return "{" + join(parts, ", ") + "}";
}

inline constexpr std::string_view kExpectedPatterns =
    "deduction-rule + deduction-case | abduction-phenomenon + abduction-knowledge | "
    "induction-common + 1..n induction-case";

}  // namespace detail_validate

/// Structural validation. All defects are collected, none short-circuits:
/// (1) exactly one root (the unique sink), (2) acyclicity, (3) weak
/// connectivity to the root, (4) only the six edge labels, (5) every
/// conclusion's premise multiset matches a legal pairing.
inline ValidationReport validate(const Rlt& graph) {
  using namespace detail_validate;
  ValidationReport report;

  // (1) exactly one root.
  std::vector<std::string> sinks = sinks_of(graph);
  if (sinks.empty()) {
    report.defects.push_back({DefectKind::NoRoot, {}, "",
                              graph.nodes.empty()
                                  ? "graph has no nodes, hence no root"
                                  : "no root: every node has an outgoing edge"});
  } else if (sinks.size() > 1) {
    report.defects.push_back(
        {DefectKind::MultipleRoots, sinks, "",
         "multiple roots: nodes {" + join(sinks, ", ") +
             "} have no outgoing edges; exactly one final conclusion is required"});
  }

  // (2) acyclicity.
  if (auto cycle = find_cycle(graph)) {
    report.defects.push_back({DefectKind::CycleDetected, *cycle, "",
                              "cycle detected: " + join(*cycle, " -> ") + " -> " + cycle->front()});
  }

  // (3) weak connectivity to the root's component.
  if (auto anchor = component_anchor(graph)) {
    std::set<std::string> component = weak_component(graph, *anchor);
    std::vector<std::string> stranded;
    for (const auto& n : graph.nodes) {
      if (!component.count(n.id)) stranded.push_back(n.id);
    }
    std::sort(stranded.begin(), stranded.end());
    for (const auto& id : stranded) {
      report.defects.push_back({DefectKind::IsolatedNode,
                                {id},
                                "",
                                "isolated node \"" + id + "\": not connected to the root \"" +
                                    *anchor + "\""});
    }
  }

  // (4) edge labels.
  std::vector<const RltEdge*> edges;
  edges.reserve(graph.edges.size());
  for (const auto& e : graph.edges) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](const RltEdge* a, const RltEdge* b) {
    return std::tie(a->from, a->to, a->label) < std::tie(b->from, b->to, b->label);
  });
  for (const RltEdge* e : edges) {
    if (!e->type) {
      report.defects.push_back({DefectKind::InvalidEdgeLabel,
                                {e->from, e->to},
                                e->label,
                                "invalid edge label \"" + e->label + "\" on " + e->from +
                                    " -> " + e->to + "; the six legal labels are "
                                    "deduction-rule, deduction-case, abduction-phenomenon, "
                                    "abduction-knowledge, induction-case, induction-common"});
    }
  }

  // (5) pairing per conclusion.
  for (const ReasoningStep& step : extract_steps(graph)) {
    if (step.paradigm == StepParadigm::Malformed) {
      report.defects.push_back(
          {DefectKind::PairingViolation,
           {step.conclusion},
           "",
           "pairing violation at conclusion \"" + step.conclusion + "\": incoming edges " +
               premise_multiset_text(step) + " match no legal pattern (" +
               std::string(kExpectedPatterns) + ")"});
    } else if (step.paradigm == StepParadigm::Induction && step.premises.size() > 2) {
      report.notes.push_back("step \"" + step.conclusion + "\" is a valid induction with " +
                             std::to_string(step.premises.size() - 1) +
                             " case premises; a strict two-edge reading would reject it");
    }
  }

  return report;
}

/// The unique node with out-degree 0 (the final conclusion).
inline std::string root_of(const Rlt& graph) {
  std::vector<std::string> sinks = detail_validate::sinks_of(graph);
  if (sinks.size() != 1) {
    throw NotSingleRooted("expected exactly one root, found " + std::to_string(sinks.size()));
  }
  return sinks.front();
}

inline nlohmann::json to_json(const Defect& d) {
  nlohmann::json j{{"kind", to_string(d.kind)}, {"nodes", d.nodes}, {"message", d.message}};
  if (!d.label.empty()) j["label"] = d.label;
  return j;
}

inline nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json defects = nlohmann::json::array();
  for (const auto& d : r.defects) defects.push_back(to_json(d));
  return nlohmann::json{{"schema_version", 1},
                        {"is_valid", r.is_valid()},
                        {"defects", defects},
                        {"notes", r.notes}};
}

}  // namespace arche
