#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "kgsmile/graph.hpp"

#ifndef KGSMILE_TEST_DATA
#define KGSMILE_TEST_DATA "tests/data"
#endif

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(KGSMILE_TEST_DATA) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline kgsmile::KnowledgeGraph load_kg(const std::string& name) { return kgsmile::parse_triples(slurp(data_path(name))); }

inline std::vector<kgsmile::QAItem> load_qa(const std::string& name) {
  return kgsmile::parse_qa(slurp(data_path(name)));
}

}  // namespace testing
