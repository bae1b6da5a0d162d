#pragma once

#include <string>
#include <vector>

#include "ionxy/config.hpp"

namespace ionxy {

/// Stored parameter set for one of the reference figures.
struct Preset {
  std::string id;       // "2a" … "5"
  std::string command;  // CLI subcommand that consumes it
  std::string description;
  std::string text;     // key = value lines

  Config config() const { return Config::parse(text, "preset " + id); }
};

const std::vector<Preset>& presets();
/// Throws ConfigError listing the known ids.
const Preset& find_preset(const std::string& id);

}  // namespace ionxy
