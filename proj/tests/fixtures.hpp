#pragma once

#include "arnnsci/integrals.hpp"

#include <fstream>
#include <json.hpp>
#include <string>

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(ARNNSCI_FIXTURE_DIR) + "/" + name; }

inline arnnsci::IntegralTable load(const std::string& stem) {
  return arnnsci::load_fcidump(path(stem + ".fcidump"));
}

inline nlohmann::json reference(const std::string& stem) {
  std::ifstream in(path(stem + ".ref"));
  return nlohmann::json::parse(in);
}

}  // namespace fixtures
