#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coursegate/canonical_json.hpp"
#include "coursegate/module_meta.hpp"
#include "coursegate/workflow.hpp"

#ifndef COURSEGATE_FIXTURE_DIR
#error "COURSEGATE_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace cgtest {

inline std::string fixture_path(const std::string& name) {
  return std::string(COURSEGATE_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline coursegate::ModuleMeta load_module(const std::string& name) {
  return coursegate::module_from_json(coursegate::parse_json(read_fixture(name)));
}

inline std::vector<coursegate::ModuleMeta> load_catalog(const std::string& name) {
  std::vector<coursegate::ModuleMeta> out;
  for (const auto& j : coursegate::parse_json(read_fixture(name))) out.push_back(coursegate::module_from_json(j));
  return out;
}

inline coursegate::Workflow load_workflow(const std::string& name) {
  return coursegate::deserialize_workflow(read_fixture(name));
}

inline const char* const kReferenceId = "md-simulation-of-metal-nanocrystals-under-deformation";
inline const char* const kPrereqId = "md-simulation-of-metal-nanocrystals";
inline const char* const kNextId = "md-simulation-of-defect-evolution-in-al-cu-alloys-with-nanoinclusions";
inline const char* const kAltId = "md-simulation-of-non-metal-solids";

}  // namespace cgtest
