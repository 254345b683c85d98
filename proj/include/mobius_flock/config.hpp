#pragma once

#include <map>
#include <optional>
#include <string>

#include "mobius_flock/geometry.hpp"
#include "mobius_flock/sim.hpp"

namespace mobius_flock {

// Key/value run description.  See README for the schema.
struct LoadedConfig {
  SimConfig sim;
  // Set when the circles were given in a user frame rather than canonically.
  std::optional<FrameTransform> frame;
  std::map<std::string, std::string> entries;
  std::string source;
};

// Numeric value: number, pi, sqrt(x), or a product/quotient chain of those.
double parse_number(const std::string& text);

LoadedConfig parse_config(const std::string& text, const std::string& source = "<string>");
LoadedConfig load_config(const std::string& path);

// Bundled configs: "paper_sync", "paper_balancing", "example1".  Honors
// MOBIUS_FLOCK_CONFIG_DIR in the environment, else the source tree.
std::string bundled_config_path(const std::string& name);

Plane parse_plane(const std::string& s);
Pattern parse_pattern(const std::string& s);
RootKind parse_root(const std::string& s);

}  // namespace mobius_flock
