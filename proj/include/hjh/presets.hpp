#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hjh/config.hpp"

namespace hjh {

struct PresetInfo {
  std::string name;
  std::string kind;
  std::string summary;
};

std::vector<PresetInfo> list_presets();
nlohmann::json preset_json(const std::string& name);
ExperimentConfig preset(const std::string& name);

}  // namespace hjh
