#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "arche/dot.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace arche;
using dot::ParseError;

namespace {

bool has_warning_containing(const dot::ParseDiagnostics& diags, const std::string& needle) {
  for (const auto& w : diags.warnings) {
    if (w.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// parse_label
// ---------------------------------------------------------------------------

TEST_CASE("parse_label extracts coordinate and transcription") {
  auto parsed = dot::parse_label("(5,2,7) Prior work shows X");
  CHECK(parsed.coordinate == SourceCoordinate{5, 2, 7});
  CHECK(parsed.transcription == "Prior work shows X");

  parsed = dot::parse_label("(14,0,0) If a [RuSO2] complex achieves full conversion...");
  CHECK(parsed.coordinate == SourceCoordinate{14, 0, 0});
  CHECK(parsed.coordinate.kind() == SourceKind::Sentence);
}

TEST_CASE("parse_label tolerates whitespace inside the tuple") {
  auto parsed = dot::parse_label("(0, 0, 0) If direct air capture is costly...");
  CHECK(parsed.coordinate == SourceCoordinate{0, 0, 0});
  CHECK(parsed.coordinate.kind() == SourceKind::Implicit);
  CHECK(parsed.transcription == "If direct air capture is costly...");
}

TEST_CASE("parse_label maps legacy two-digit tuples with a warning") {
  dot::ParseDiagnostics diags;
  auto parsed = dot::parse_label("(3,2) some viewpoint", &diags);
  CHECK(parsed.coordinate == SourceCoordinate{3, 2, 0});
  CHECK(parsed.transcription == "some viewpoint");
  CHECK(has_warning_containing(diags, "legacy"));
}

TEST_CASE("parse_label without a tuple prefix is implicit plus warning") {
  dot::ParseDiagnostics diags;
  auto parsed = dot::parse_label("just some text", &diags);
  CHECK(parsed.coordinate == SourceCoordinate{0, 0, 0});
  CHECK(parsed.transcription == "just some text");
  CHECK(has_warning_containing(diags, "no coordinate prefix"));

  // A parenthesis that is not an integer tuple is part of the text.
  dot::ParseDiagnostics diags2;
  parsed = dot::parse_label("(see note) more text", &diags2);
  CHECK(parsed.coordinate == SourceCoordinate{0, 0, 0});
  CHECK(parsed.transcription == "(see note) more text");
}

TEST_CASE("parse_label rejects illegal zero patterns") {
  CHECK_THROWS_AS(dot::parse_label("(0,3,0) text"), ParseError);
  CHECK_THROWS_AS(dot::parse_label("(0,0,4) text"), ParseError);
  CHECK_THROWS_AS(dot::parse_label("(2,0,1) text"), ParseError);
  CHECK_THROWS_AS(dot::parse_label("(-1,0,0) text"), ParseError);
  CHECK_THROWS_AS(dot::parse_label("(1,2,3,4) text"), ParseError);
  CHECK_THROWS_AS(dot::parse_label("(99999999999999999999,0,0) text"), ParseError);
  try {
    dot::parse_label("(0,3,0) text");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::MalformedCoordinate);
  }
}

TEST_CASE("parse_label preserves inner whitespace of the transcription") {
  auto parsed = dot::parse_label("(1,0,0) a  b\tc ");
  CHECK(parsed.transcription == "a  b\tc ");
}

// ---------------------------------------------------------------------------
// parse
// ---------------------------------------------------------------------------

TEST_CASE("parse reads node statements with coordinates") {
  auto result = dot::parse(
      "digraph G { \"n1\" [label=\"(1,0,0) Single-crystal optical actuators...\"]; }");
  REQUIRE(result.graph.nodes.size() == 1);
  const RltNode& n = result.graph.nodes[0];
  CHECK(n.id == "n1");
  CHECK(n.coordinate == SourceCoordinate{1, 0, 0});
  CHECK(n.coordinate.kind() == SourceKind::Sentence);
  CHECK(n.transcription == "Single-crystal optical actuators...");
}

TEST_CASE("parse accepts markdown code fences") {
  std::string text =
      "Here is the graph you asked for:\n"
      "```dot\n"
      "digraph G { a -> b [label=\"deduction-rule\"]; }\n"
      "```\n"
      "Hope this helps!\n";
  auto result = dot::parse(text);
  CHECK(result.graph.nodes.size() == 2);
  CHECK(result.graph.edges.size() == 1);
  CHECK(result.graph.edges[0].type == EdgeType::DeductionRule);
}

TEST_CASE("parse flags unknown edge labels but keeps them verbatim") {
  auto result = dot::parse(
      "digraph { a -> b [label=\"deduction-knowledge\"]; a -> c [label=\"deduction-case\"]; }");
  REQUIRE(result.graph.edges.size() == 2);
  CHECK_FALSE(result.graph.edges[0].type.has_value());
  CHECK(result.graph.edges[0].label == "deduction-knowledge");
  CHECK(result.graph.edges[1].type == EdgeType::DeductionCase);
  CHECK(has_warning_containing(result.diagnostics, "unknown edge label"));
}

TEST_CASE("a declared implicit node without content is flagged") {
  auto result = dot::parse("digraph { a [label=\"(0,0,0)\"]; }");
  REQUIRE(result.graph.nodes.size() == 1);
  CHECK(result.graph.nodes[0].transcription.empty());
  CHECK(has_warning_containing(result.diagnostics, "empty transcription"));

  // Non-implicit coordinates may leave the transcription empty silently:
  // the content lives in the document.
  auto sentence = dot::parse("digraph { a [label=\"(4,0,0)\"]; }");
  CHECK(sentence.diagnostics.warnings.empty());
}

TEST_CASE("parse materializes nodes that only appear in edges") {
  auto result = dot::parse("digraph { a -> b [label=\"deduction-rule\"]; }");
  REQUIRE(result.graph.nodes.size() == 2);
  for (const auto& n : result.graph.nodes) {
    CHECK(n.coordinate == SourceCoordinate{0, 0, 0});
    CHECK(n.transcription.empty());
  }
  CHECK(has_warning_containing(result.diagnostics, "materialized"));
}

TEST_CASE("parse keeps non-label node attributes as opaque metadata") {
  auto result = dot::parse(
      "digraph { x [shape=box,label=\"(0,0,0) hypothesis\" color=\"red\"]; }");
  REQUIRE(result.graph.nodes.size() == 1);
  const RltNode& n = result.graph.nodes[0];
  REQUIRE(n.attributes.size() == 2);
  CHECK(n.attributes[0] == std::pair<std::string, std::string>{"color", "red"});
  CHECK(n.attributes[1] == std::pair<std::string, std::string>{"shape", "box"});
}

TEST_CASE("parse accepts edge chains and comments") {
  auto result = dot::parse(
      "digraph {\n"
      "  // a chain\n"
      "  a -> b -> c [label=\"induction-case\"]; /* block */\n"
      "  # hash comment\n"
      "}\n");
  REQUIRE(result.graph.edges.size() == 2);
  CHECK(result.graph.edges[0].from == "a");
  CHECK(result.graph.edges[0].to == "b");
  CHECK(result.graph.edges[1].from == "b");
  CHECK(result.graph.edges[1].to == "c");
}

TEST_CASE("parse errors carry kind and location") {
  auto expect_kind = [](const std::string& text, ParseError::Kind kind) {
    try {
      dot::parse(text);
      FAIL("expected ParseError for: " << text);
    } catch (const ParseError& e) {
      CHECK(e.kind() == kind);
      CHECK(e.where().line >= 1);
    }
  };
  expect_kind("", ParseError::Kind::Syntax);
  expect_kind("   \n ", ParseError::Kind::Syntax);
  expect_kind("graph { a -- b; }", ParseError::Kind::Syntax);
  expect_kind("just some prose", ParseError::Kind::Syntax);
  expect_kind("digraph { a -> b [label=\"deduction-rule\"]; ", ParseError::Kind::Syntax);
  expect_kind("digraph { a [label=\"(1,0,0) unterminated ]; }", ParseError::Kind::Syntax);
  expect_kind("digraph { subgraph cluster { a; } }", ParseError::Kind::Syntax);
  expect_kind("digraph { a:port -> b; }", ParseError::Kind::Syntax);
  expect_kind("digraph { a [label=<html>]; }", ParseError::Kind::Syntax);
  expect_kind("digraph { a -> a [label=\"deduction-rule\"]; }", ParseError::Kind::SelfLoop);
  expect_kind("digraph { a [label=\"(1,0,0) x\"]; a [label=\"(2,0,0) y\"]; }",
              ParseError::Kind::DuplicateNode);
  expect_kind("digraph { a [label=\"(0,3,0) bad pattern\"]; }",
              ParseError::Kind::MalformedCoordinate);
  expect_kind("digraph { a } trailing", ParseError::Kind::Syntax);
}

TEST_CASE("parse ignores default attribute and graph attribute statements") {
  auto result = dot::parse(
      "digraph {\n"
      "  rankdir=LR;\n"
      "  node [shape=box];\n"
      "  a -> b [label=\"deduction-rule\"];\n"
      "}\n");
  CHECK(result.graph.nodes.size() == 2);
  CHECK(result.graph.edges.size() == 1);
  CHECK(has_warning_containing(result.diagnostics, "rankdir"));
  CHECK(has_warning_containing(result.diagnostics, "default attribute"));
}

TEST_CASE("parse handles the two appendix fixtures") {
  auto bad = testsupport::parse_fixture("bad_rlt.dot");
  CHECK(bad.graph.nodes.size() == 14);
  CHECK(bad.graph.edges.size() == 13);
  CHECK(bad.diagnostics.warnings.empty());

  auto better = testsupport::parse_fixture("better_rlt.dot");
  CHECK(better.graph.nodes.size() == 27);  // 24 declared + 3 materialized
  CHECK(better.graph.edges.size() == 26);
  CHECK(has_warning_containing(better.diagnostics, "materialized"));
}

// ---------------------------------------------------------------------------
// serialize
// ---------------------------------------------------------------------------

TEST_CASE("serialize renders the documented canonical form") {
  CHECK(dot::serialize(Rlt{}) == "digraph G {\n}\n");

  Rlt g;
  g.add_node(RltNode{"n", {0, 0, 0}, "h", {}});
  std::string out = dot::serialize(g);
  CHECK(out.find("\"n\" [label=\"(0,0,0) h\"]") != std::string::npos);
}

TEST_CASE("serialize is deterministic and order-insensitive") {
  Rlt a;
  a.add_node(RltNode{"x", {1, 0, 0}, "one", {}});
  a.add_node(RltNode{"y", {2, 0, 0}, "two", {}});
  a.add_edge(make_edge("x", "y", EdgeType::DeductionRule));

  Rlt b;  // same graph, reversed insertion order
  b.add_node(RltNode{"y", {2, 0, 0}, "two", {}});
  b.add_node(RltNode{"x", {1, 0, 0}, "one", {}});
  b.add_edge(make_edge("x", "y", EdgeType::DeductionRule));

  CHECK(structurally_equal(a, b));
  CHECK(dot::serialize(a) == dot::serialize(b));
  CHECK(dot::serialize(a) == dot::serialize(a));
}

TEST_CASE("round-trip: fixtures reach a parse-serialize fixed point") {
  for (const char* name : {"bad_rlt.dot", "better_rlt.dot"}) {
    Rlt first = testsupport::fixture_graph(name);
    std::string canonical = dot::serialize(first);
    Rlt second = dot::parse(canonical).graph;
    INFO(name);
    CHECK(structurally_equal(first, second));
    CHECK(dot::serialize(second) == canonical);
  }
}

TEST_CASE("round-trip: random graphs survive escaping") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Rlt g = testsupport::random_messy_graph(rng);
    // Ugly content: quotes, backslashes, newlines, unicode.
    if (!g.nodes.empty()) {
      g.nodes[0].transcription = "line one\nline \"two\" with \\ backslash\tand é";
    }
    Rlt reparsed = dot::parse(dot::serialize(g)).graph;
    CHECK(structurally_equal(g, reparsed));
    CHECK(dot::serialize(reparsed) == dot::serialize(g));
  }
}

TEST_CASE("parser-produced edge labels classify back to their type") {
  for (const char* name : {"bad_rlt.dot", "better_rlt.dot"}) {
    Rlt g = testsupport::fixture_graph(name);
    for (const auto& e : g.edges) {
      REQUIRE(e.type.has_value());
      CHECK(classify_edge_type(e.label) == *e.type);
    }
  }
}

TEST_CASE("parse_label never loses text") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    SourceCoordinate coord;
    switch (testsupport::rand_int(rng, 0, 3)) {
      case 0: coord = {0, 0, 0}; break;
      case 1: coord = {testsupport::rand_int(rng, 1, 30), 0, 0}; break;
      case 2: coord = {testsupport::rand_int(rng, 1, 30), testsupport::rand_int(rng, 1, 8), 0}; break;
      default:
        coord = {testsupport::rand_int(rng, 1, 30), testsupport::rand_int(rng, 1, 8),
                 testsupport::rand_int(rng, 1, 8)};
        break;
    }
    std::string transcription = "text " + std::to_string(trial) + " with trailing space ";
    std::string label = to_string(coord) + " " + transcription;
    auto parsed = dot::parse_label(label);
    CHECK(parsed.coordinate == coord);
    CHECK(parsed.transcription == transcription);
  }
}
