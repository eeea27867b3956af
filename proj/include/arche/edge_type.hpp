#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "arche/errors.hpp"
#include "arche/text.hpp"

namespace arche {

/// Peirce's three fundamental inference paradigms.
enum class Paradigm { Deduction, Induction, Abduction };

/// The role a premise plays within its paradigm.
enum class PremiseRole { Rule, Case, Phenomenon, Knowledge, Common };

/// The six edge labels an RLT may carry. Paradigm and role are pure
/// functions of the label.
enum class EdgeType {
  DeductionRule,
  DeductionCase,
  InductionCase,
  InductionCommon,
  AbductionPhenomenon,
  AbductionKnowledge,
};

inline constexpr std::array<EdgeType, 6> kAllEdgeTypes = {
    EdgeType::DeductionRule,      EdgeType::DeductionCase,
    EdgeType::InductionCase,      EdgeType::InductionCommon,
    EdgeType::AbductionPhenomenon, EdgeType::AbductionKnowledge,
};

constexpr Paradigm paradigm_of(EdgeType t) {
  switch (t) {
    case EdgeType::DeductionRule:
    case EdgeType::DeductionCase:
      return Paradigm::Deduction;
    case EdgeType::InductionCase:
    case EdgeType::InductionCommon:
      return Paradigm::Induction;
    case EdgeType::AbductionPhenomenon:
    case EdgeType::AbductionKnowledge:
      return Paradigm::Abduction;
  }
  return Paradigm::Deduction;  // unreachable
}

constexpr PremiseRole role_of(EdgeType t) {
  switch (t) {
    case EdgeType::DeductionRule: return PremiseRole::Rule;
    case EdgeType::DeductionCase: return PremiseRole::Case;
    case EdgeType::InductionCase: return PremiseRole::Case;
    case EdgeType::InductionCommon: return PremiseRole::Common;
    case EdgeType::AbductionPhenomenon: return PremiseRole::Phenomenon;
    case EdgeType::AbductionKnowledge: return PremiseRole::Knowledge;
  }
  return PremiseRole::Rule;  // unreachable
}

constexpr std::string_view label_of(EdgeType t) {
  switch (t) {
    case EdgeType::DeductionRule: return "deduction-rule";
    case EdgeType::DeductionCase: return "deduction-case";
    case EdgeType::InductionCase: return "induction-case";
    case EdgeType::InductionCommon: return "induction-common";
    case EdgeType::AbductionPhenomenon: return "abduction-phenomenon";
    case EdgeType::AbductionKnowledge: return "abduction-knowledge";
  }
  return "";  // unreachable
}

constexpr std::string_view to_string(Paradigm p) {
  switch (p) {
    case Paradigm::Deduction: return "deduction";
    case Paradigm::Induction: return "induction";
    case Paradigm::Abduction: return "abduction";
  }
  return "";  // unreachable
}

constexpr std::string_view to_string(PremiseRole r) {
  switch (r) {
    case PremiseRole::Rule: return "rule";
    case PremiseRole::Case: return "case";
    case PremiseRole::Phenomenon: return "phenomenon";
    case PremiseRole::Knowledge: return "knowledge";
    case PremiseRole::Common: return "common";
  }
  return "";  // unreachable
}

/// Matches trimmed, case-insensitively; nullopt for anything else.
inline std::optional<EdgeType> try_classify_edge_type(std::string_view label) {
  std::string needle = detail::to_lower(detail::trim(label));
  for (EdgeType t : kAllEdgeTypes) {
    if (needle == label_of(t)) return t;
  }
  return std::nullopt;
}

/// Throwing variant; the error carries the offending label verbatim.
inline EdgeType classify_edge_type(std::string_view label) {
  if (auto t = try_classify_edge_type(label)) return *t;
  throw UnknownEdgeLabel(std::string(label));
}

}  // namespace arche
