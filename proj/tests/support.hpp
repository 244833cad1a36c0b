#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wshex/model.hpp"
#include "wshex/parser.hpp"

namespace support {

inline std::string data_path(const std::string& name) { return std::string(WSHEX_TEST_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& name) {
  std::ifstream in(data_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline wshex::Schema load_schema(const std::string& name) {
  auto r = wshex::parse_schema(read_file(name));
  if (!r.ok()) throw std::runtime_error(name + ": " + r.diagnostics.front().str());
  return *r.schema;
}

struct Cell {
  wshex::EntityId node;
  const char* label;
  bool conforms;
};

// The example conformance matrix over the fixture graph and schema.
inline std::vector<Cell> fixture_matrix() {
  using namespace wshex::fixture;
  return {
      {UK, "Country", true},        {Spain, "Country", true},   {CERN, "Organization", true},
      {London, "Place", true},      {PA, "Award", true},        {NewHaven, "Place", false},
      {vintCerf, "Person", false},  {timBl, "Person", false},
  };
}

}  // namespace support
