// armtwin: one-shot kinematics, validation sweeps, workspace atlas, and the
// master / slave / bridge node runners.
//
// Exit codes: 0 success, 1 usage, 2 domain error (IK / validation), 3 I/O.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "armtwin/config.hpp"
#include "armtwin/kinematics.hpp"
#include "armtwin/net.hpp"
#include "armtwin/nodes.hpp"
#include "armtwin/protocol.hpp"
#include "armtwin/workspace.hpp"

namespace {

using namespace armtwin;

enum ExitCode : int { kOk = 0, kUsage = 1, kDomain = 2, kIo = 3 };

std::string join_fixed(const std::vector<double>& values, int decimals) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_fixed(values[i], decimals);
  }
  return out;
}

int cmd_fk(const Config& cfg, const std::vector<double>& degrees) {
  const auto q = JointAngles::from_degrees(degrees[0], degrees[1], degrees[2], degrees[3], degrees[4]);
  const auto p = fk_position(q, cfg.arm.links);
  std::cout << join_fixed({p.x, p.y, p.z}, 3) << '\n';
  return kOk;
}

int cmd_ik(const Config& cfg, const std::vector<double>& args) {
  const double grip = args.size() == 4 ? args[3] : 0.0;
  const auto sol = ik_solve({args[0], args[1], args[2]}, deg_to_rad(grip), cfg.arm.links);
  if (!sol) {
    std::cout << to_string(sol.error()) << '\n';
    return kDomain;
  }
  std::vector<double> out;
  for (const double t : sol->angles.theta) out.push_back(rad_to_deg(t));
  std::cout << join_fixed(out, 3) << '\n';
  return kOk;
}

// The sweep always starts from the rest pose, then draws uniformly inside
// the joint limits.
int cmd_roundtrip(const Config& cfg, long long n, std::uint64_t seed, double tol) {
  if (n <= 0) {
    std::cerr << "roundtrip: n must be positive\n";
    return kUsage;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  long long pass = 0, skip = 0, fail = 0;
  double max_err = 0.0;
  for (long long i = 0; i < n; ++i) {
    JointAngles q;
    if (i > 0) {
      for (std::size_t j = 0; j < kJointCount; ++j) {
        const auto& r = cfg.arm.limits.joint[j];
        q[j] = r.min + unit(rng) * (r.max - r.min);
      }
    }
    const auto report = roundtrip_validate(q, cfg.arm.links, tol);
    switch (report.status) {
      case RoundtripReport::Status::Pass:
        ++pass;
        break;
      case RoundtripReport::Status::Skipped:
        ++skip;
        break;
      case RoundtripReport::Status::Fail:
        ++fail;
        break;
    }
    if (report.status != RoundtripReport::Status::Skipped) max_err = std::max(max_err, report.error);
  }

  // Below a picometre the error is floating-point noise at this scale.
  const double shown = std::round(max_err * 1e12) / 1e12;
  char err_text[32];
  std::snprintf(err_text, sizeof err_text, "%.3g", shown);
  std::cout << "pass=" << pass << " skip=" << skip << " fail=" << fail << " maxerr=" << err_text
            << " skip_frac=" << format_fixed(static_cast<double>(skip) / static_cast<double>(n), 4)
            << '\n';
  return fail == 0 ? kOk : kDomain;
}

int cmd_atlas(const Config& cfg, long long n, std::uint64_t seed, const std::string& out_path) {
  if (n <= 0) {
    std::cerr << "atlas: n must be positive\n";
    return kUsage;
  }
  const auto samples = sample_workspace(cfg.arm.links, cfg.arm.limits, cfg.arm.scene,
                                        static_cast<std::size_t>(n), seed);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (out_path != "-") {
    file.open(out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      std::cerr << "atlas: cannot write " << out_path << '\n';
      return kIo;
    }
    out = &file;
  }

  *out << "theta1_deg,theta2_deg,theta3_deg,theta4_deg,theta5_deg,x_mm,y_mm,z_mm,valid\n";
  for (const auto& s : samples) {
    for (const double t : s.angles.theta) *out << format_fixed(rad_to_deg(t), 9) << ',';
    *out << format_fixed(s.position.x, 6) << ',' << format_fixed(s.position.y, 6) << ','
         << format_fixed(s.position.z, 6) << ',' << (s.valid ? 1 : 0) << '\n';
  }
  out->flush();
  if (!*out) {
    std::cerr << "atlas: write failed\n";
    return kIo;
  }
  return kOk;
}

bool skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

int cmd_master(const Config& cfg, const std::string& mode, const std::string& script_path,
               bool loopback) {
  std::ifstream script;
  std::istream* in = &std::cin;
  if (mode == "script") {
    script.open(script_path);
    if (!script) {
      std::cerr << "master: cannot read script '" << script_path << "'\n";
      return kIo;
    }
    in = &script;
  }

  std::vector<MasterInput> inputs;
  bool input_errors = false;
  const auto read_input = [&](const std::string& line) -> std::optional<MasterInput> {
    const auto parsed = mode == "analog" ? parse_analog_line(line) : parse_master_line(line);
    if (!parsed) {
      std::cout << to_string(parsed.error()) << '\n';
      input_errors = true;
      return std::nullopt;
    }
    return *parsed;
  };

  if (loopback) {
    std::string line;
    while (std::getline(*in, line)) {
      if (skippable(line)) continue;
      if (auto input = read_input(line)) inputs.push_back(*input);
    }
    const auto run = run_loopback(inputs, cfg.arm);
    for (const auto& msg : run.operator_messages) {
      std::cout << msg << '\n';
      if (msg != "unchanged" && !msg.starts_with("sent")) input_errors = true;
    }
    std::cout << encode_telemetry(run.trace.back());
    std::cout << "frames=" << run.frames_sent << " rejects=" << run.reject_count << '\n';
    return input_errors ? kDomain : kOk;
  }

  std::unique_ptr<Transport> link;
  try {
    link = tcp_connect(cfg.net.host, cfg.net.command_port);
  } catch (const std::system_error& e) {
    std::cerr << "master: " << e.what() << '\n';
    return kIo;
  }

  MasterNode master(cfg.arm);
  std::string line;
  while (std::getline(*in, line)) {
    if (skippable(line)) continue;
    const auto input = read_input(line);
    if (!input) continue;
    try {
      const auto result = master.tick(*input, *link);
      std::cout << result.message << std::endl;
      if (result.error) input_errors = true;
    } catch (const TransportClosed& e) {
      std::cerr << "master: " << e.what() << '\n';
      return kIo;
    }
  }
  return input_errors ? kDomain : kOk;
}

int cmd_slave(const Config& cfg) {
  try {
    SlaveServer server(cfg);
    std::cerr << "slave: command port " << server.command_port() << ", telemetry port "
              << server.telemetry_port() << '\n';
    server.run(true);
  } catch (const std::system_error& e) {
    std::cerr << e.what() << '\n';
    return kIo;
  }
  return kOk;
}

int cmd_bridge(const Config& cfg) {
  try {
    BridgeServer bridge(cfg);
    std::cerr << "bridge: websocket port " << bridge.port() << '\n';
    bridge.run(true);
  } catch (const std::system_error& e) {
    std::cerr << "bridge: " << e.what() << '\n';
    return kIo;
  } catch (const TransportClosed& e) {
    std::cerr << "bridge: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale 5-DOF arm: kinematics, validation and teleoperation nodes"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "Flat key = value config file");

  std::vector<double> fk_args;
  auto* fk = app.add_subcommand("fk", "Tool position (mm) for five joint angles (deg)");
  fk->add_option("angles", fk_args, "theta1..theta5 in degrees")->expected(5)->required();

  std::vector<double> ik_args;
  auto* ik = app.add_subcommand("ik", "Joint angles (deg) for a tool position (mm)");
  ik->add_option("target", ik_args, "x y z [grip_deg]")->expected(3, 4)->required();

  long long n = 0;
  std::uint64_t seed = 0;
  double tol = kDefaultRoundtripTolerance;
  auto* roundtrip = app.add_subcommand("roundtrip", "FK -> IK -> FK sweep over random poses");
  roundtrip->add_option("n", n, "Number of poses")->required();
  roundtrip->add_option("--seed", seed, "RNG seed");
  roundtrip->add_option("--tol", tol, "Pass tolerance in mm");

  std::string atlas_out = "atlas.csv";
  auto* atlas = app.add_subcommand("atlas", "Write sampled (angles, position, valid) rows as CSV");
  atlas->add_option("n", n, "Number of samples")->required();
  atlas->add_option("--seed", seed, "Sequence scramble seed");
  atlas->add_option("--out", atlas_out, "Output path, '-' for stdout");

  auto* slave = app.add_subcommand("slave", "Run the slave node on TCP");

  std::string mode = "serial";
  std::string script_path;
  bool loopback = false;
  auto* master = app.add_subcommand("master", "Run the master node");
  master->add_option("mode", mode, "serial | analog | script")
      ->check(CLI::IsMember({"serial", "analog", "script"}));
  master->add_option("--script", script_path, "Scenario file for script mode");
  master->add_flag("--loopback", loopback, "Drive an in-process slave instead of TCP");

  auto* bridge = app.add_subcommand("bridge", "Serve command and telemetry over WebSocket");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (master->parsed() && mode == "script" && script_path.empty()) {
    std::cerr << "master: script mode needs --script <file>\n";
    return kUsage;
  }

  Config cfg;
  if (!config_path.empty()) {
    try {
      cfg = load_config(config_path);
    } catch (const ConfigError& e) {
      std::cerr << e.what() << '\n';
      return kUsage;
    } catch (const std::system_error& e) {
      std::cerr << e.what() << '\n';
      return kIo;
    }
  }

  if (fk->parsed()) return cmd_fk(cfg, fk_args);
  if (ik->parsed()) return cmd_ik(cfg, ik_args);
  if (roundtrip->parsed()) return cmd_roundtrip(cfg, n, seed, tol);
  if (atlas->parsed()) return cmd_atlas(cfg, n, seed, atlas_out);
  if (slave->parsed()) return cmd_slave(cfg);
  if (master->parsed()) return cmd_master(cfg, mode, script_path, loopback);
  if (bridge->parsed()) return cmd_bridge(cfg);
  return kUsage;
}
