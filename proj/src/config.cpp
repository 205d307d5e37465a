#include "armtwin/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace armtwin {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double number(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v)) {
    throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" +
                      std::string(value) + "'");
  }
  return v;
}

std::uint16_t port(std::string_view key, std::string_view value) {
  unsigned v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || v > 65535) {
    throw ConfigError("config: '" + std::string(key) + "' expects a port number");
  }
  return static_cast<std::uint16_t>(v);
}

}  // namespace

Config parse_config(std::string_view text) {
  Config cfg;
  bool base_height_set = false;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    auto& arm = cfg.arm;
    if (key == "a1") arm.links.a1 = number(key, value);
    else if (key == "a2") arm.links.a2 = number(key, value);
    else if (key == "a3") arm.links.a3 = number(key, value);
    else if (key == "a4") arm.links.a4 = number(key, value);
    else if (key == "floor_z") arm.scene.floor_z = number(key, value);
    else if (key == "base_radius") arm.scene.base_radius = number(key, value);
    else if (key == "base_height") {
      arm.scene.base_height = number(key, value);
      base_height_set = true;
    }
    else if (key == "delta_min_deg") arm.delta_min = deg_to_rad(number(key, value));
    else if (key == "max_rate_deg_s") arm.max_rate = deg_to_rad(number(key, value));
    else if (key == "dt") arm.dt = number(key, value);
    else if (key == "host") cfg.net.host = std::string(value);
    else if (key == "command_port") cfg.net.command_port = port(key, value);
    else if (key == "telemetry_port") cfg.net.telemetry_port = port(key, value);
    else if (key == "bridge_port") cfg.net.bridge_port = port(key, value);
    else if (key.size() == 14 && key.starts_with("joint") && key.ends_with("_deg") &&
             key[5] >= '1' && key[5] <= '5' && (key.substr(6, 4) == "_min" || key.substr(6, 4) == "_max")) {
      auto& range = arm.limits.joint[static_cast<std::size_t>(key[5] - '1')];
      (key.substr(6, 4) == "_min" ? range.min : range.max) = deg_to_rad(number(key, value));
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }

  if (!base_height_set) cfg.arm.scene.base_height = cfg.arm.links.a1;

  if (!cfg.arm.links.valid()) throw ConfigError("config: link lengths must be positive");
  if (!cfg.arm.limits.valid()) throw ConfigError("config: every joint needs min < max");
  if (!cfg.arm.scene.valid()) throw ConfigError("config: base_radius and base_height must be positive");
  if (!(cfg.arm.delta_min > 0.0)) throw ConfigError("config: delta_min_deg must be positive");
  if (!(cfg.arm.max_rate > 0.0)) throw ConfigError("config: max_rate_deg_s must be positive");
  if (!(cfg.arm.dt > 0.0)) throw ConfigError("config: dt must be positive");
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::system_error(errno, std::generic_category(), "cannot read " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace armtwin
