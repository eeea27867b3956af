#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "arche/corpus.hpp"
#include "arche/dot.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(ARCHE_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline arche::dot::ParseResult parse_fixture(const std::string& name) {
  return arche::dot::parse(read_fixture(name));
}

inline arche::Rlt fixture_graph(const std::string& name) {
  return parse_fixture(name).graph;
}

inline arche::CorpusDocument fixture_doc(const std::string& name) {
  return arche::load_document_file(fixture_path(name));
}

}  // namespace testsupport
