#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "armtwin/nodes.hpp"

namespace armtwin {

struct NetworkConfig {
  std::string host = "127.0.0.1";
  std::uint16_t command_port = 5760;
  std::uint16_t telemetry_port = 5761;
  std::uint16_t bridge_port = 5762;
};

struct Config {
  ArmConfig arm;
  NetworkConfig net;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text; `#` starts a comment. Angles are in degrees,
/// lengths in millimetres. Keys:
///
///   a1 a2 a3 a4
///   joint<N>_min_deg joint<N>_max_deg        (N = 1..5)
///   floor_z base_radius base_height           (base_height defaults to a1)
///   delta_min_deg max_rate_deg_s dt
///   host command_port telemetry_port bridge_port
///
/// Missing keys keep their defaults. Throws ConfigError on unknown keys,
/// unparsable values, or when the result violates a component invariant.
Config parse_config(std::string_view text);

/// Throws std::system_error if the file cannot be read.
Config load_config(const std::filesystem::path& path);

}  // namespace armtwin
