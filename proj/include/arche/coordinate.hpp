#pragma once

#include <compare>
#include <string>

namespace arche {

/// What a source coordinate points at, fully determined by its zero pattern.
enum class SourceKind {
  Implicit,            // (0,0,0) knowledge added by the generator
  Sentence,            // (x,0,0) the x-th introduction sentence
  SentenceViewpoint,   // (x,y,0) the y-th viewpoint of sentence x
  ReferenceViewpoint,  // (x,y,z) the z-th viewpoint of the y-th citation of sentence x
};

/// Three-integer provenance tag attached to every node label.
///
/// Legal zero patterns: (0,0,0), (x,0,0), (x,y,0), (x,y,z) with the named
/// components >= 1. Anything else, e.g. (0,3,0), is malformed.
struct SourceCoordinate {
  int x = 0;
  int y = 0;
  int z = 0;

  friend auto operator<=>(const SourceCoordinate&, const SourceCoordinate&) = default;

  bool is_implicit() const { return x == 0 && y == 0 && z == 0; }

  /// Only meaningful for pattern-valid coordinates.
  SourceKind kind() const {
    if (is_implicit()) return SourceKind::Implicit;
    if (z > 0) return SourceKind::ReferenceViewpoint;
    if (y > 0) return SourceKind::SentenceViewpoint;
    return SourceKind::Sentence;
  }
};

/// z > 0 implies y > 0, y > 0 implies x > 0, no negatives.
inline bool coordinate_pattern_valid(int x, int y, int z) {
  if (x < 0 || y < 0 || z < 0) return false;
  if (z > 0 && y == 0) return false;
  if (y > 0 && x == 0) return false;
  return true;
}

inline bool coordinate_pattern_valid(const SourceCoordinate& c) {
  return coordinate_pattern_valid(c.x, c.y, c.z);
}

inline std::string to_string(const SourceCoordinate& c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," +
         std::to_string(c.z) + ")";
}

inline std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::Implicit: return "implicit";
    case SourceKind::Sentence: return "sentence";
    case SourceKind::SentenceViewpoint: return "sentence_viewpoint";
    case SourceKind::ReferenceViewpoint: return "reference_viewpoint";
  }
  return "unknown";
}

}  // namespace arche
