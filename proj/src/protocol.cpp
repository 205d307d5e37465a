#include "armtwin/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace armtwin {

namespace {

constexpr std::array<std::uint8_t, 256> make_crc8_table() {
  std::array<std::uint8_t, 256> table{};
  for (int i = 0; i < 256; ++i) {
    auto c = static_cast<std::uint8_t>(i);
    for (int b = 0; b < 8; ++b) {
      c = static_cast<std::uint8_t>((c & 0x80) ? (c << 1) ^ 0x07 : (c << 1));
    }
    table[static_cast<std::size_t>(i)] = c;
  }
  return table;
}

constexpr auto kCrc8Table = make_crc8_table();

constexpr char kHexDigits[] = "0123456789ABCDEF";

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == '\n')) ++i;
    const std::size_t start = i;
    while (i < s.size() && !(s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == '\n')) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Canonical unsigned decimal: no sign, no leading zeros.
std::optional<std::uint64_t> parse_canonical_uint(std::string_view s) {
  if (!all_digits(s) || s.size() > 18) return std::nullopt;
  if (s.size() > 1 && s[0] == '0') return std::nullopt;
  std::uint64_t v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

// Canonical `-?<int>.<6 digits>`; zero is never negative.
std::optional<std::int64_t> parse_microrad(std::string_view s) {
  bool negative = false;
  if (!s.empty() && s[0] == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const auto whole = parse_canonical_uint(s.substr(0, dot));
  const auto frac = s.substr(dot + 1);
  if (!whole || frac.size() != 6 || !all_digits(frac)) return std::nullopt;
  std::int64_t f = 0;
  std::from_chars(frac.data(), frac.data() + frac.size(), f);
  const std::int64_t magnitude = static_cast<std::int64_t>(*whole) * 1'000'000 + f;
  if (negative && magnitude == 0) return std::nullopt;
  return negative ? -magnitude : magnitude;
}

std::optional<double> parse_decimal(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Expected<MasterInput, InputError> parse_counts(std::span<const std::string_view> fields) {
  if (fields.size() != kJointCount) return InputError::MalformedInput;
  AnalogReadings in;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const auto v = parse_int(fields[i]);
    if (!v) return InputError::MalformedInput;
    in.counts[i] = *v;
  }
  return MasterInput{in};
}

}  // namespace

std::uint8_t crc8(std::span<const std::uint8_t> bytes) {
  std::uint8_t crc = 0x00;
  for (const auto b : bytes) crc = kCrc8Table[crc ^ b];
  return crc;
}

std::uint8_t crc8(std::string_view text) {
  return crc8(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                            text.size()));
}

Frame Frame::from_angles(std::uint16_t seq, const JointAngles& angles) {
  Frame f;
  f.seq = seq;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    if (!std::isfinite(angles[j]) || std::abs(angles[j]) > 1e9) {
      throw std::invalid_argument("Frame: joint angle not finite");
    }
    f.microrad[j] = std::llround(angles[j] * 1e6);
  }
  return f;
}

JointAngles Frame::angles() const {
  JointAngles q;
  for (std::size_t j = 0; j < kJointCount; ++j) q[j] = static_cast<double>(microrad[j]) / 1e6;
  return q;
}

std::string_view to_string(FrameError e) {
  switch (e) {
    case FrameError::MalformedFrame:
      return "MalformedFrame";
    case FrameError::CrcMismatch:
      return "CrcMismatch";
  }
  return "?";
}

std::string format_microrad(std::int64_t microrad) {
  const bool negative = microrad < 0;
  const std::uint64_t mag =
      negative ? static_cast<std::uint64_t>(-(microrad + 1)) + 1 : static_cast<std::uint64_t>(microrad);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s%llu.%06llu", negative ? "-" : "",
                static_cast<unsigned long long>(mag / 1'000'000),
                static_cast<unsigned long long>(mag % 1'000'000));
  return buf;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out(buf);
  if (out.front() == '-' &&
      std::all_of(out.begin() + 1, out.end(), [](char c) { return c == '0' || c == '.'; })) {
    out.erase(out.begin());
  }
  return out;
}

std::string encode_frame(const Frame& frame) {
  std::string payload = std::to_string(frame.seq);
  for (const auto t : frame.microrad) {
    payload += ',';
    payload += format_microrad(t);
  }
  const std::uint8_t crc = crc8(payload);

  std::string line = "J,";
  line += payload;
  line += ',';
  line += kHexDigits[crc >> 4];
  line += kHexDigits[crc & 0x0F];
  line += '\n';
  return line;
}

Expected<Frame, FrameError> decode_frame(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (line.size() < 2 || line[0] != 'J' || line[1] != ',') return FrameError::MalformedFrame;

  const auto last_comma = line.rfind(',');
  if (last_comma <= 1) return FrameError::MalformedFrame;

  const auto crc_text = line.substr(last_comma + 1);
  const auto hex_value = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (crc_text.size() != 2 || hex_value(crc_text[0]) < 0 || hex_value(crc_text[1]) < 0) {
    return FrameError::MalformedFrame;
  }
  const auto expected_crc = static_cast<std::uint8_t>(hex_value(crc_text[0]) * 16 + hex_value(crc_text[1]));

  const auto payload = line.substr(2, last_comma - 2);
  if (crc8(payload) != expected_crc) return FrameError::CrcMismatch;

  const auto fields = split(payload, ',');
  if (fields.size() != 1 + kJointCount) return FrameError::MalformedFrame;

  const auto seq = parse_canonical_uint(fields[0]);
  if (!seq || *seq > 0xFFFF) return FrameError::MalformedFrame;

  Frame frame;
  frame.seq = static_cast<std::uint16_t>(*seq);
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const auto t = parse_microrad(fields[j + 1]);
    if (!t) return FrameError::MalformedFrame;
    frame.microrad[j] = *t;
  }
  return frame;
}

std::string_view to_string(InputError e) {
  switch (e) {
    case InputError::MalformedInput:
      return "MalformedInput";
    case InputError::AnalogOutOfRange:
      return "AnalogOutOfRange";
    case InputError::NegativeReach:
      return "NegativeReach";
    case InputError::Unreachable:
      return "Unreachable";
    case InputError::BaseSingular:
      return "BaseSingular";
  }
  return "?";
}

InputError input_error_from(IkError e) {
  switch (e) {
    case IkError::NegativeReach:
      return InputError::NegativeReach;
    case IkError::Unreachable:
      return InputError::Unreachable;
    case IkError::BaseSingular:
      return InputError::BaseSingular;
  }
  return InputError::Unreachable;
}

Expected<MasterInput, InputError> parse_master_line(std::string_view line) {
  const auto fields = split_ws(line);
  if (fields.empty()) return InputError::MalformedInput;

  const auto tag = fields[0];
  const std::span<const std::string_view> args(fields.data() + 1, fields.size() - 1);

  if (tag == "A") {
    if (args.size() != kJointCount) return InputError::MalformedInput;
    AngleLine in;
    for (std::size_t i = 0; i < kJointCount; ++i) {
      const auto v = parse_decimal(args[i]);
      if (!v) return InputError::MalformedInput;
      in.degrees[i] = *v;
    }
    return MasterInput{in};
  }
  if (tag == "C") {
    if (args.size() != 4) return InputError::MalformedInput;
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto d = parse_decimal(args[i]);
      if (!d) return InputError::MalformedInput;
      v[i] = *d;
    }
    return MasterInput{CoordLine{{v[0], v[1], v[2]}, v[3]}};
  }
  if (tag == "P") return parse_counts(args);
  return InputError::MalformedInput;
}

Expected<MasterInput, InputError> parse_analog_line(std::string_view line) {
  const auto fields = split_ws(line);
  return parse_counts(fields);
}

Expected<JointAngles, InputError> normalize_input(const MasterInput& input,
                                                  const LinkLengths& links,
                                                  const JointLimits& limits) {
  if (const auto* a = std::get_if<AngleLine>(&input)) {
    JointAngles q;
    for (std::size_t j = 0; j < kJointCount; ++j) q[j] = deg_to_rad(a->degrees[j]);
    return q;
  }
  if (const auto* c = std::get_if<CoordLine>(&input)) {
    const auto ik = ik_solve(c->target, deg_to_rad(c->grip_degrees), links);
    if (!ik) return input_error_from(ik.error());
    return ik->angles;
  }
  const auto& analog = std::get<AnalogReadings>(input);
  JointAngles q;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const int v = analog.counts[j];
    if (v < 0 || v > kAnalogMax) return InputError::AnalogOutOfRange;
    const auto& r = limits.joint[j];
    q[j] = std::lerp(r.min, r.max, static_cast<double>(v) / kAnalogMax);
  }
  return q;
}

ChangeDecision change_filter(const ChangeDetector& detector, const JointAngles& thetas) {
  ChangeDecision out{detector, false};
  if (!detector.last_sent) {
    out.emit = true;
  } else {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      if (std::abs(thetas[j] - (*detector.last_sent)[j]) >= detector.delta_min) {
        out.emit = true;
        break;
      }
    }
  }
  if (out.emit) out.detector.last_sent = thetas;
  return out;
}

}  // namespace armtwin
