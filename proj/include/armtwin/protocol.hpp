#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "armtwin/expected.hpp"
#include "armtwin/kinematics.hpp"
#include "armtwin/workspace.hpp"

namespace armtwin {

/// CRC-8, polynomial 0x07, initial value 0x00, no reflection, no final xor.
std::uint8_t crc8(std::span<const std::uint8_t> bytes);
std::uint8_t crc8(std::string_view text);

/// One master->slave command. Angles are held as integer microradians, the
/// resolution of the wire format, so every Frame value encodes exactly.
struct Frame {
  std::uint16_t seq = 0;
  std::array<std::int64_t, kJointCount> microrad{};

  /// Rounds each angle to the nearest microradian. Throws
  /// std::invalid_argument on non-finite input.
  static Frame from_angles(std::uint16_t seq, const JointAngles& angles);
  JointAngles angles() const;

  friend bool operator==(const Frame&, const Frame&) = default;
};

enum class FrameError { MalformedFrame, CrcMismatch };
std::string_view to_string(FrameError e);

/// `J,<seq>,<t1>,...,<t5>,<crc>\n`, angles in radians with six decimals,
/// crc as two uppercase hex digits over the bytes between the first and the
/// last comma.
std::string encode_frame(const Frame& frame);

/// Accepts exactly what encode_frame produces, with or without the trailing
/// newline.
Expected<Frame, FrameError> decode_frame(std::string_view line);

// Master-side inputs, one per acquisition mode.
struct AngleLine {
  std::array<double, kJointCount> degrees{};
};
struct CoordLine {
  ToolPosition target;
  double grip_degrees = 0.0;
};
struct AnalogReadings {
  std::array<int, kJointCount> counts{};
};

using MasterInput = std::variant<AngleLine, CoordLine, AnalogReadings>;

inline constexpr int kAnalogMax = 1023;

enum class InputError {
  MalformedInput,
  AnalogOutOfRange,
  NegativeReach,
  Unreachable,
  BaseSingular,
};
std::string_view to_string(InputError e);
InputError input_error_from(IkError e);

/// Serial grammar: `A <d1> .. <d5>` (degrees), `C <x> <y> <z> <g>` (mm, mm,
/// mm, degrees), plus `P <v1> .. <v5>` for recorded potentiometer readings.
Expected<MasterInput, InputError> parse_master_line(std::string_view line);

/// Five whitespace-separated ADC counts, as produced by the analog console.
Expected<MasterInput, InputError> parse_analog_line(std::string_view line);

/// Every input mode ends up as radians: degrees are converted, coordinates
/// go through ik_solve, ADC counts map linearly onto each joint's range.
Expected<JointAngles, InputError> normalize_input(const MasterInput& input,
                                                  const LinkLengths& links,
                                                  const JointLimits& limits);

struct ChangeDetector {
  std::optional<JointAngles> last_sent;
  double delta_min = deg_to_rad(0.5);
};

struct ChangeDecision {
  ChangeDetector detector;
  bool emit = false;
};

/// Emit when nothing was sent yet or any joint moved by at least delta_min.
ChangeDecision change_filter(const ChangeDetector& detector, const JointAngles& thetas);

// Fixed-point text helpers shared by the wire formats and the CLI. Never
// produce "-0.000".
std::string format_fixed(double value, int decimals);
std::string format_microrad(std::int64_t microrad);

}  // namespace armtwin
