#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arche/errors.hpp"
#include "arche/rlt.hpp"
#include "arche/text.hpp"

namespace arche::dot {

struct Location {
  int line = 0;
  int col = 0;
};

inline std::string to_string(const Location& loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.col);
}

struct Warning {
  Location where;
  std::string message;
};

/// Recovery actions taken while parsing. Warnings never change graph
/// content, they only record what was recovered.
struct ParseDiagnostics {
  std::vector<Warning> warnings;

  void warn(Location where, std::string message) {
    warnings.push_back({where, std::move(message)});
  }
};

class ParseError : public Error {
public:
  enum class Kind { Syntax, DuplicateNode, MalformedCoordinate, SelfLoop };

  ParseError(Kind kind, Location where, const std::string& what)
      : Error("parse error at " + dot::to_string(where) + ": " + what),
        kind_(kind),
        where_(where) {}

  Kind kind() const noexcept { return kind_; }
  Location where() const noexcept { return where_; }

private:
  Kind kind_;
  Location where_;
};

/// A node label split into its coordinate prefix and the free-text rest.
struct ParsedLabel {
  SourceCoordinate coordinate;
  std::string transcription;
};

/// Splits "(x,y,z) text" into coordinate and transcription.
///
/// Accepts a leading parenthesized tuple of 2 or 3 integers with arbitrary
/// whitespace between tokens; two-integer tuples are the legacy form and map
/// to (x,y,0) with a warning. A label with no tuple prefix becomes an
/// implicit (0,0,0) node whose transcription is the whole label, also with a
/// warning. Inner whitespace of the transcription is preserved verbatim.
///
/// Throws ParseError{MalformedCoordinate} when a tuple is present but its
/// zero pattern is illegal, e.g. "(0,3,0)".
inline ParsedLabel parse_label(std::string_view label, ParseDiagnostics* diags = nullptr,
                               Location where = {}) {
  size_t pos = 0;
  while (pos < label.size() && detail::is_space(label[pos])) ++pos;

  auto no_prefix = [&]() -> ParsedLabel {
    if (diags) diags->warn(where, "label has no coordinate prefix; treated as implicit (0,0,0)");
    return ParsedLabel{SourceCoordinate{0, 0, 0}, std::string(detail::trim(label))};
  };

  if (pos >= label.size() || label[pos] != '(') return no_prefix();

  // Try to scan "( int , int [, int] )"; on any structural mismatch the
  // label is treated as having no coordinate prefix.
  size_t scan = pos + 1;
  std::vector<long> values;
  bool structural_ok = true;
  while (true) {
    while (scan < label.size() && detail::is_space(label[scan])) ++scan;
    size_t num_start = scan;
    if (scan < label.size() && label[scan] == '-') ++scan;
    while (scan < label.size() && label[scan] >= '0' && label[scan] <= '9') ++scan;
    if (scan == num_start || (label[num_start] == '-' && scan == num_start + 1)) {
      structural_ok = false;
      break;
    }
    if (scan - num_start > 9) {  // would overflow; clearly meant as a coordinate
      throw ParseError(ParseError::Kind::MalformedCoordinate, where,
                       "coordinate component out of range");
    }
    values.push_back(std::stol(std::string(label.substr(num_start, scan - num_start))));
    while (scan < label.size() && detail::is_space(label[scan])) ++scan;
    if (scan < label.size() && label[scan] == ',') {
      ++scan;
      continue;
    }
    if (scan < label.size() && label[scan] == ')') {
      ++scan;
      break;
    }
    structural_ok = false;
    break;
  }
  if (!structural_ok) return no_prefix();

  if (values.size() != 2 && values.size() != 3) {
    throw ParseError(ParseError::Kind::MalformedCoordinate, where,
                     "coordinate tuple must have 2 or 3 components, got " +
                         std::to_string(values.size()));
  }
  if (values.size() == 2) {
    if (diags) diags->warn(where, "legacy two-digit coordinate; mapped to (x,y,0)");
    values.push_back(0);
  }
  if (values[0] > 1'000'000 || values[1] > 1'000'000 || values[2] > 1'000'000) {
    throw ParseError(ParseError::Kind::MalformedCoordinate, where,
                     "coordinate component out of range");
  }
  SourceCoordinate coord{static_cast<int>(values[0]), static_cast<int>(values[1]),
                         static_cast<int>(values[2])};
  if (!coordinate_pattern_valid(coord)) {
    throw ParseError(ParseError::Kind::MalformedCoordinate, where,
                     "illegal coordinate pattern " + arche::to_string(coord) +
                         "; legal patterns are (0,0,0), (x,0,0), (x,y,0), (x,y,z)");
  }

  // Transcription starts at the first non-whitespace character after the
  // tuple; everything from there on is preserved verbatim.
  while (scan < label.size() && detail::is_space(label[scan])) ++scan;
  return ParsedLabel{coord, std::string(label.substr(scan))};
}

namespace detail_parse {

struct Token {
  enum class Type { Ident, Quoted, Punct, Arrow, End };
  Type type = Type::End;
  std::string text;
  Location loc;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_trivia();
    Token tok;
    tok.loc = here();
    if (pos_ >= src_.size()) {
      tok.type = Token::Type::End;
      return tok;
    }
    char c = src_[pos_];
    if (c == '"') {
      tok.type = Token::Type::Quoted;
      tok.text = lex_quoted();
      return tok;
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      advance();
      advance();
      tok.type = Token::Type::Arrow;
      tok.text = "->";
      return tok;
    }
    if (is_ident_char(c)) {
      tok.type = Token::Type::Ident;
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) {
        tok.text.push_back(src_[pos_]);
        advance();
      }
      return tok;
    }
    if (c == '<') {
      throw ParseError(ParseError::Kind::Syntax, tok.loc, "HTML labels are not supported");
    }
    if (c == '{' || c == '}' || c == '[' || c == ']' || c == '=' || c == ';' ||
        c == ',' || c == ':') {
      tok.type = Token::Type::Punct;
      tok.text.push_back(c);
      advance();
      return tok;
    }
    throw ParseError(ParseError::Kind::Syntax, tok.loc,
                     std::string("unexpected character '") + c + "'");
  }

private:
  static bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '.';
  }

  Location here() const { return Location{line_, col_}; }

  void advance() {
    if (pos_ < src_.size()) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (detail::is_space(c)) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        Location start = here();
        advance();
        advance();
        while (true) {
          if (pos_ >= src_.size()) {
            throw ParseError(ParseError::Kind::Syntax, start, "unterminated block comment");
          }
          if (src_[pos_] == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        break;
      }
    }
  }

  std::string lex_quoted() {
    Location start = here();
    advance();  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) {
        throw ParseError(ParseError::Kind::Syntax, start, "unterminated quoted string");
      }
      char c = src_[pos_];
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\' && pos_ + 1 < src_.size()) {
        char esc = src_[pos_ + 1];
        if (esc == '"' || esc == '\\') {
          out.push_back(esc);
          advance();
          advance();
          continue;
        }
        if (esc == 'n') {
          out.push_back('\n');
          advance();
          advance();
          continue;
        }
        if (esc == 'r') {
          out.push_back('\r');
          advance();
          advance();
          continue;
        }
        if (esc == '\n') {  // line continuation
          advance();
          advance();
          continue;
        }
        // Unknown escape: keep verbatim, graphviz does the same.
        out.push_back(c);
        out.push_back(esc);
        advance();
        advance();
        continue;
      }
      out.push_back(c);
      advance();
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

/// Markdown code-fence stripping: if the text contains a ```-fenced block
/// whose body mentions "digraph", parsing applies to that body only.
inline std::string_view strip_code_fence(std::string_view text) {
  size_t search = 0;
  while (true) {
    size_t open = text.find("```", search);
    if (open == std::string_view::npos) return text;
    size_t body_start = text.find('\n', open);
    if (body_start == std::string_view::npos) return text;
    ++body_start;
    size_t close = text.find("```", body_start);
    if (close == std::string_view::npos) return text;
    std::string_view body = text.substr(body_start, close - body_start);
    if (body.find("digraph") != std::string_view::npos ||
        body.find("DIGRAPH") != std::string_view::npos) {
      return body;
    }
    search = close + 3;
  }
}

}  // namespace detail_parse

struct ParseResult {
  Rlt graph;
  ParseDiagnostics diagnostics;
};

/// Parses the pragmatic DOT subset this toolkit speaks (see
/// docs/dot_dialect.md): one digraph block, node statements with a quoted
/// label attribute, `A -> B [label="..."]` edge statements (chains allowed),
/// optional markdown fence, // /* */ # comments. Subgraphs, ports and HTML
/// labels are rejected. Unknown edge labels are kept verbatim and flagged;
/// nodes that only appear as edge endpoints are materialized as implicit
/// nodes with a warning.
inline ParseResult parse(std::string_view text) {
  using detail_parse::Token;

  std::string_view body = detail_parse::strip_code_fence(text);
  if (detail::trim(body).empty()) {
    throw ParseError(ParseError::Kind::Syntax, {1, 1}, "empty input");
  }

  detail_parse::Lexer lexer(body);
  Token tok = lexer.next();

  auto expect_punct = [&](char c, const char* what) {
    if (tok.type != Token::Type::Punct || tok.text[0] != c) {
      throw ParseError(ParseError::Kind::Syntax, tok.loc, std::string("expected ") + what);
    }
    tok = lexer.next();
  };

  if (tok.type == Token::Type::Ident && detail::iequals(tok.text, "strict")) {
    tok = lexer.next();
  }
  if (tok.type != Token::Type::Ident || !detail::iequals(tok.text, "digraph")) {
    if (tok.type == Token::Type::Ident && detail::iequals(tok.text, "graph")) {
      throw ParseError(ParseError::Kind::Syntax, tok.loc,
                       "undirected graphs are not supported; expected 'digraph'");
    }
    throw ParseError(ParseError::Kind::Syntax, tok.loc, "expected 'digraph'");
  }
  tok = lexer.next();
  if (tok.type == Token::Type::Ident || tok.type == Token::Type::Quoted) {
    tok = lexer.next();  // optional graph name
  }
  expect_punct('{', "'{'");

  ParseResult result;
  Rlt& graph = result.graph;
  ParseDiagnostics& diags = result.diagnostics;

  struct PendingNode {
    Location loc;
    bool declared = false;  // appeared as a node statement
    bool has_label = false;
    std::string label;
    Location label_loc;
    std::vector<std::pair<std::string, std::string>> attributes;
  };
  // Declaration/reference order is kept for deterministic materialization.
  std::vector<std::string> order;
  std::map<std::string, PendingNode> pending;

  auto touch = [&](const std::string& id, Location loc) -> PendingNode& {
    auto it = pending.find(id);
    if (it == pending.end()) {
      order.push_back(id);
      PendingNode fresh;
      fresh.loc = loc;
      it = pending.emplace(id, std::move(fresh)).first;
    }
    return it->second;
  };

  struct Attr {
    std::string key;
    std::string value;
    Location loc;
  };

  auto parse_attr_lists = [&]() -> std::vector<Attr> {
    std::vector<Attr> attrs;
    while (tok.type == Token::Type::Punct && tok.text[0] == '[') {
      tok = lexer.next();
      while (!(tok.type == Token::Type::Punct && tok.text[0] == ']')) {
        if (tok.type != Token::Type::Ident && tok.type != Token::Type::Quoted) {
          throw ParseError(ParseError::Kind::Syntax, tok.loc, "expected attribute name");
        }
        Attr a;
        a.key = tok.text;
        a.loc = tok.loc;
        tok = lexer.next();
        expect_punct('=', "'='");
        if (tok.type != Token::Type::Ident && tok.type != Token::Type::Quoted) {
          throw ParseError(ParseError::Kind::Syntax, tok.loc, "expected attribute value");
        }
        a.value = tok.text;
        tok = lexer.next();
        attrs.push_back(std::move(a));
        if (tok.type == Token::Type::Punct && (tok.text[0] == ',' || tok.text[0] == ';')) {
          tok = lexer.next();
        }
      }
      tok = lexer.next();  // ']'
    }
    return attrs;
  };

  while (!(tok.type == Token::Type::Punct && tok.text[0] == '}')) {
    if (tok.type == Token::Type::End) {
      throw ParseError(ParseError::Kind::Syntax, tok.loc, "expected '}' before end of input");
    }
    if (tok.type == Token::Type::Punct && tok.text[0] == ';') {
      tok = lexer.next();
      continue;
    }
    if (tok.type == Token::Type::Punct && tok.text[0] == '{') {
      throw ParseError(ParseError::Kind::Syntax, tok.loc, "subgraphs are not supported");
    }
    if (tok.type == Token::Type::Ident && detail::iequals(tok.text, "subgraph")) {
      throw ParseError(ParseError::Kind::Syntax, tok.loc, "subgraphs are not supported");
    }

    if (tok.type != Token::Type::Ident && tok.type != Token::Type::Quoted) {
      throw ParseError(ParseError::Kind::Syntax, tok.loc, "expected node or edge statement");
    }

    // Default-attribute statements (graph/node/edge [..]) are accepted and
    // ignored so common model output does not hard-fail.
    if (tok.type == Token::Type::Ident &&
        (detail::iequals(tok.text, "graph") || detail::iequals(tok.text, "node") ||
         detail::iequals(tok.text, "edge"))) {
      Location stmt_loc = tok.loc;
      std::string kw = tok.text;
      tok = lexer.next();
      if (tok.type == Token::Type::Punct && tok.text[0] == '[') {
        parse_attr_lists();
        diags.warn(stmt_loc, "default attribute statement '" + kw + "' ignored");
        continue;
      }
      // Not a default statement after all: fall through treating the keyword
      // as a plain node id (already consumed).
      std::string id = kw;
      if (tok.type == Token::Type::Punct && tok.text[0] == ':') {
        throw ParseError(ParseError::Kind::Syntax, tok.loc, "ports are not supported");
      }
      PendingNode& node = touch(id, stmt_loc);
      node.declared = true;
      continue;
    }

    std::string first_id = tok.text;
    Location first_loc = tok.loc;
    tok = lexer.next();
    if (tok.type == Token::Type::Punct && tok.text[0] == ':') {
      throw ParseError(ParseError::Kind::Syntax, tok.loc, "ports are not supported");
    }

    // Graph attribute assignment (rankdir=LR and friends): ignored.
    if (tok.type == Token::Type::Punct && tok.text[0] == '=') {
      tok = lexer.next();
      if (tok.type != Token::Type::Ident && tok.type != Token::Type::Quoted) {
        throw ParseError(ParseError::Kind::Syntax, tok.loc, "expected attribute value");
      }
      diags.warn(first_loc, "graph attribute '" + first_id + "' ignored");
      tok = lexer.next();
      continue;
    }

    if (tok.type == Token::Type::Arrow) {
      // Edge statement, possibly a chain a -> b -> c.
      std::vector<std::pair<std::string, Location>> chain;
      chain.emplace_back(first_id, first_loc);
      while (tok.type == Token::Type::Arrow) {
        tok = lexer.next();
        if (tok.type != Token::Type::Ident && tok.type != Token::Type::Quoted) {
          throw ParseError(ParseError::Kind::Syntax, tok.loc, "expected edge target id");
        }
        chain.emplace_back(tok.text, tok.loc);
        tok = lexer.next();
        if (tok.type == Token::Type::Punct && tok.text[0] == ':') {
          throw ParseError(ParseError::Kind::Syntax, tok.loc, "ports are not supported");
        }
      }
      std::vector<Attr> attrs = parse_attr_lists();
      std::string label;
      bool has_label = false;
      for (const auto& a : attrs) {
        if (detail::iequals(a.key, "label")) {
          label = a.value;
          has_label = true;
        } else {
          diags.warn(a.loc, "edge attribute '" + a.key + "' ignored");
        }
      }
      for (size_t i = 0; i + 1 < chain.size(); ++i) {
        const auto& [from, from_loc] = chain[i];
        const auto& [to, to_loc] = chain[i + 1];
        if (from == to) {
          throw ParseError(ParseError::Kind::SelfLoop, to_loc,
                           "self-loop on node \"" + from + "\"");
        }
        touch(from, from_loc);
        touch(to, to_loc);
        std::optional<EdgeType> type;
        std::string edge_label = label;
        if (!has_label) {
          diags.warn(from_loc, "edge " + from + " -> " + to + " has no label attribute");
        } else if (auto t = try_classify_edge_type(label)) {
          type = t;
          edge_label = std::string(label_of(*t));
        } else {
          diags.warn(from_loc, "unknown edge label \"" + label + "\" on " + from + " -> " +
                                   to + "; kept verbatim, validation will reject it");
        }
        graph.edges.push_back(RltEdge{from, to, type, std::move(edge_label)});
      }
    } else {
      // Node statement.
      std::vector<Attr> attrs = parse_attr_lists();
      PendingNode& node = touch(first_id, first_loc);
      bool has_label_attr = false;
      for (const auto& a : attrs) {
        if (detail::iequals(a.key, "label")) {
          has_label_attr = true;
          if (node.has_label) {
            throw ParseError(ParseError::Kind::DuplicateNode, a.loc,
                             "duplicate node id: \"" + first_id + "\"");
          }
          node.has_label = true;
          node.label = a.value;
          node.label_loc = a.loc;
        } else {
          // Last assignment per key wins.
          auto it = std::find_if(node.attributes.begin(), node.attributes.end(),
                                 [&](const auto& kv) { return kv.first == a.key; });
          if (it != node.attributes.end()) {
            it->second = a.value;
          } else {
            node.attributes.emplace_back(a.key, a.value);
          }
        }
      }
      if (node.declared && !attrs.empty() && !has_label_attr) {
        diags.warn(first_loc, "node \"" + first_id + "\" redeclared; attributes merged");
      }
      node.declared = true;
    }
  }
  tok = lexer.next();
  if (tok.type != Token::Type::End) {
    throw ParseError(ParseError::Kind::Syntax, tok.loc, "unexpected content after closing '}'");
  }

  for (const std::string& id : order) {
    PendingNode& p = pending.at(id);
    RltNode node;
    node.id = id;
    if (p.has_label) {
      ParsedLabel parsed = parse_label(p.label, &diags, p.label_loc);
      node.coordinate = parsed.coordinate;
      node.transcription = std::move(parsed.transcription);
      if (node.coordinate.is_implicit() && node.transcription.empty()) {
        // Implicit nodes carry all their content in the transcription.
        diags.warn(p.label_loc, "implicit node \"" + id + "\" has an empty transcription");
      }
    } else {
      node.coordinate = SourceCoordinate{0, 0, 0};
      if (p.declared) {
        diags.warn(p.loc, "node \"" + id + "\" declared without a label; treated as implicit");
      } else {
        diags.warn(p.loc, "node \"" + id +
                              "\" referenced by an edge but never declared; "
                              "materialized as implicit");
      }
    }
    std::sort(p.attributes.begin(), p.attributes.end());
    node.attributes = std::move(p.attributes);
    graph.nodes.push_back(std::move(node));
  }

  return result;
}

namespace detail_parse {

inline bool needs_quotes(std::string_view s) {
  if (s.empty()) return true;
  for (char c : s) {
    bool bare = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                (c >= '0' && c <= '9') || c == '_' || c == '.';
    if (!bare) return true;
  }
  return false;
}

inline std::string quote(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

inline std::string render_id(std::string_view s) {
  return needs_quotes(s) ? quote(s) : std::string(s);
}

}  // namespace detail_parse

inline std::string render_label(const RltNode& node) {
  std::string label = arche::to_string(node.coordinate);
  if (!node.transcription.empty()) {
    label.push_back(' ');
    label += node.transcription;
  }
  return label;
}

/// Canonical serialization: nodes sorted by id, edges sorted by
/// (from, to, label), labels rendered as "(x,y,z) transcription". Parsing
/// the output reproduces the graph exactly.
inline std::string serialize(const Rlt& graph) {
  std::vector<const RltNode*> nodes;
  nodes.reserve(graph.nodes.size());
  for (const auto& n : graph.nodes) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(),
            [](const RltNode* a, const RltNode* b) { return a->id < b->id; });

  std::vector<const RltEdge*> edges;
  edges.reserve(graph.edges.size());
  for (const auto& e : graph.edges) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](const RltEdge* a, const RltEdge* b) {
    return std::tie(a->from, a->to, a->label) < std::tie(b->from, b->to, b->label);
  });

  // Canonical form quotes every id and value.
  std::string out = "digraph G {\n";
  for (const RltNode* n : nodes) {
    out += "  " + detail_parse::quote(n->id) + " [label=" +
           detail_parse::quote(render_label(*n));
    std::vector<std::pair<std::string, std::string>> attrs = n->attributes;
    std::sort(attrs.begin(), attrs.end());
    for (const auto& [k, v] : attrs) {
      out += " " + detail_parse::render_id(k) + "=" + detail_parse::quote(v);
    }
    out += "];\n";
  }
  for (const RltEdge* e : edges) {
    out += "  " + detail_parse::quote(e->from) + " -> " + detail_parse::quote(e->to) +
           " [label=" + detail_parse::quote(e->label) + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace arche::dot
