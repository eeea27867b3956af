#pragma once

// Random graph builders for property tests. Everything is seeded and
// deterministic so failures reproduce.

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "arche/judge.hpp"
#include "arche/rlt.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

inline int rand_int(Rng& rng, int lo, int hi) {  // inclusive
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool rand_bool(Rng& rng, double p = 0.5) {
  return std::bernoulli_distribution(p)(rng);
}

/// Structurally valid tree built bottom-up from the pairing grammar:
/// leaves are combined into conclusions until a single sink remains.
/// Guaranteed single-rooted, acyclic, connected, all pairings legal.
inline arche::Rlt random_valid_tree(Rng& rng, int max_leaves = 6) {
  using namespace arche;
  Rlt g;
  int next_id = 0;
  auto fresh = [&](SourceCoordinate coord, const std::string& text) {
    std::string id = "v" + std::to_string(next_id++);
    g.add_node(RltNode{id, coord, text, {}});
    return id;
  };

  std::vector<std::string> pool;
  int leaves = rand_int(rng, 2, max_leaves);
  for (int i = 0; i < leaves; ++i) {
    int x = rand_int(rng, 1, 4);
    pool.push_back(fresh(SourceCoordinate{x, 0, 0}, "leaf statement " + std::to_string(i)));
  }

  while (pool.size() > 1) {
    std::shuffle(pool.begin(), pool.end(), rng);
    int kind = rand_int(rng, 0, 2);
    std::string conclusion =
        fresh(SourceCoordinate{0, 0, 0}, "derived statement " + std::to_string(next_id));
    if (kind == 0 && pool.size() >= 2) {  // deduction
      g.add_edge(make_edge(pool.back(), conclusion, EdgeType::DeductionRule));
      pool.pop_back();
      g.add_edge(make_edge(pool.back(), conclusion, EdgeType::DeductionCase));
      pool.pop_back();
    } else if (kind == 1 && pool.size() >= 2) {  // abduction
      g.add_edge(make_edge(pool.back(), conclusion, EdgeType::AbductionPhenomenon));
      pool.pop_back();
      g.add_edge(make_edge(pool.back(), conclusion, EdgeType::AbductionKnowledge));
      pool.pop_back();
    } else {  // induction: one common + 1..n cases
      g.add_edge(make_edge(pool.back(), conclusion, EdgeType::InductionCommon));
      pool.pop_back();
      // pool held >= 2 entries, so at least one case premise remains.
      int cases = std::min<int>(rand_int(rng, 1, 3), static_cast<int>(pool.size()));
      for (int c = 0; c < cases; ++c) {
        g.add_edge(make_edge(pool.back(), conclusion, EdgeType::InductionCase));
        pool.pop_back();
      }
    }
    pool.push_back(conclusion);
  }
  return g;
}

/// Arbitrary small digraph: possibly cyclic, disconnected, with unknown
/// labels and dangling coordinates. No self-loops (excluded at parse) and
/// no parallel duplicate (from,to,label) triples.
inline arche::Rlt random_messy_graph(Rng& rng, int max_nodes = 8, bool allow_unknown_labels = true) {
  using namespace arche;
  Rlt g;
  int node_count = rand_int(rng, 1, max_nodes);
  for (int i = 0; i < node_count; ++i) {
    SourceCoordinate coord;
    switch (rand_int(rng, 0, 3)) {
      case 0: coord = {0, 0, 0}; break;
      case 1: coord = {rand_int(rng, 1, 9), 0, 0}; break;  // may dangle
      case 2: coord = {rand_int(rng, 1, 9), rand_int(rng, 1, 5), 0}; break;
      default: coord = {rand_int(rng, 1, 9), rand_int(rng, 1, 5), rand_int(rng, 1, 5)}; break;
    }
    g.add_node(RltNode{"m" + std::to_string(i), coord,
                       "statement number " + std::to_string(i) + " about topic " +
                           std::to_string(rand_int(rng, 0, 3)),
                       {}});
  }
  int edge_count = rand_int(rng, 0, node_count <= 1 ? 0 : 12);
  std::set<std::tuple<std::string, std::string, std::string>> used;
  for (int i = 0; i < edge_count; ++i) {
    std::string from = "m" + std::to_string(rand_int(rng, 0, node_count - 1));
    std::string to = "m" + std::to_string(rand_int(rng, 0, node_count - 1));
    if (from == to) continue;
    std::string label;
    if (allow_unknown_labels && rand_bool(rng, 0.15)) {
      label = "bogus-label-" + std::to_string(rand_int(rng, 0, 2));
    } else {
      label = std::string(label_of(kAllEdgeTypes[static_cast<size_t>(rand_int(rng, 0, 5))]));
    }
    if (!used.insert({from, to, label}).second) continue;
    g.edges.push_back(make_edge(from, to, label));
  }
  return g;
}

/// Random scripted verdict tables for a panel of three judges.
inline std::vector<std::shared_ptr<arche::JudgeBackend>> random_panel_backends(
    Rng& rng, const arche::Rlt& graph) {
  using namespace arche;
  std::vector<std::shared_ptr<JudgeBackend>> judges;
  for (int j = 0; j < 3; ++j) {
    std::map<std::string, VerdictValue> table;
    for (const auto& node : graph.nodes) {
      VerdictValue value = rand_bool(rng, 0.6) ? VerdictValue::Correct : VerdictValue::Wrong;
      if (rand_bool(rng, 0.1)) value = VerdictValue::Unavailable;
      table[node.id] = value;
    }
    judges.push_back(std::make_shared<ScriptedJudge>("rj" + std::to_string(j), std::move(table),
                                                     VerdictValue::Correct));
  }
  return judges;
}

}  // namespace testsupport
