// Copyright 2026 The SubSense Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Vehicle-side wire formats. Both layouts are fixed bit-for-bit; see
// docs/wire-formats.md.
//
// Sensor frame (8 bytes, gripper Arduino -> host):
//   [0xA5][0x04][pot_raw u16 LE][button 0x00|0x01][seq][CRC-16/CCITT-FALSE LE]
//   CRC covers bytes 1..5.
//
// Command frame (9 + N bytes, host -> vehicle):
//   [0xFE][N][seq][sysid 0xFF][compid 0x00][msg_id u16 LE][payload N][CRC-16/X.25 LE]
//   CRC covers every byte after the magic up to the end of the payload.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subsense::wire {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::uint16_t Crc16CcittFalse(ByteView data);
std::uint16_t Crc16X25(ByteView data);

// -- sensor frames ---------------------------------------------------------

inline constexpr std::uint8_t kSensorSync = 0xA5;
inline constexpr std::uint8_t kSensorBodyLen = 0x04;
inline constexpr std::size_t kSensorFrameSize = 8;
inline constexpr std::uint16_t kPotRawMax = 1023;

struct SensorFrame {
  std::uint8_t seq = 0;
  std::uint16_t pot_raw = 0;
  bool button = false;

  bool operator==(const SensorFrame&) const = default;
};

// -- command frames --------------------------------------------------------

inline constexpr std::uint8_t kCommandMagic = 0xFE;
inline constexpr std::uint8_t kCommandSysId = 0xFF;
inline constexpr std::uint8_t kCommandCompId = 0x00;
inline constexpr std::size_t kCommandHeaderSize = 7;
inline constexpr std::size_t kCommandOverhead = kCommandHeaderSize + 2;
inline constexpr std::size_t kMaxPayload = 64;

enum class MsgId : std::uint16_t {
  kSetServo = 1,
  kManualSetpoint = 2,
};

bool IsKnownMsgId(std::uint16_t id);
/// Payload length a message id requires.
std::size_t ExpectedPayloadLength(MsgId id);

struct CommandFrame {
  std::uint8_t seq = 0;
  std::uint16_t msg_id = 0;
  Bytes payload;

  bool operator==(const CommandFrame&) const = default;
};

struct SetServo {
  std::uint8_t channel = 0;
  std::uint16_t width_us = 1500;

  bool operator==(const SetServo&) const = default;
};

inline constexpr std::int16_t kManualAxisLimit = 1000;

/// Six axes in milli-units of [-1, 1]: surge, sway, heave, roll, pitch, yaw.
struct ManualSetpoint {
  std::array<std::int16_t, 6> axes{};

  bool operator==(const ManualSetpoint&) const = default;
};

// -- errors ----------------------------------------------------------------

enum class DecodeError {
  kNone,
  kTruncated,
  kBadSync,
  kBadLength,
  kBadCrc,
  kBadPayload,
  kUnknownMsgId,
  kPayloadLengthMismatch,
};

const char* ToString(DecodeError e);

class EncodeError : public std::invalid_argument {
 public:
  explicit EncodeError(const std::string& what) : std::invalid_argument(what) {}
};

template <typename T>
struct Decoded {
  std::optional<T> value;
  DecodeError error = DecodeError::kNone;

  explicit operator bool() const { return value.has_value(); }
};

Bytes EncodeSensorFrame(const SensorFrame& f);
/// Decodes the frame at the start of `bytes`; trailing bytes are ignored.
Decoded<SensorFrame> DecodeSensorFrame(ByteView bytes);

Bytes EncodeCommand(const CommandFrame& c);
/// Frames any msg id and payload without validation. Test and tooling use only.
Bytes EncodeCommandUnchecked(const CommandFrame& c);
Decoded<CommandFrame> DecodeCommand(ByteView bytes);
/// Size of the command frame at the start of `bytes`, if the header is present.
std::optional<std::size_t> CommandFrameSize(ByteView bytes);

CommandFrame MakeSetServo(std::uint8_t seq, const SetServo& s);
CommandFrame MakeManualSetpoint(std::uint8_t seq, const ManualSetpoint& m);
Decoded<SetServo> ParseSetServo(const CommandFrame& c);
Decoded<ManualSetpoint> ParseManualSetpoint(const CommandFrame& c);

/// Converts a [-1, 1] axis to milli-units, rounding to nearest.
std::int16_t ToMilli(double axis);
double FromMilli(std::int16_t milli);

// -- stream decoding -------------------------------------------------------

struct StreamCounters {
  std::uint64_t frames = 0;
  std::uint64_t bad_sync_bytes = 0;
  std::uint64_t bad_length = 0;
  std::uint64_t bad_crc = 0;
  std::uint64_t bad_payload = 0;
};

/// Byte-stream decoder for sensor frames. On any failure it drops the
/// leading byte and rescans for the next sync byte.
class SensorStreamDecoder {
 public:
  void Feed(ByteView bytes);
  std::optional<SensorFrame> Next();
  std::vector<SensorFrame> DrainAll();

  const StreamCounters& counters() const { return counters_; }
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::deque<std::uint8_t> buffer_;
  StreamCounters counters_;
};

/// Tracks the 8-bit sequence counter and counts frames skipped by gaps.
class SequenceTracker {
 public:
  /// Returns the number of frames missing before `seq`.
  std::uint32_t Observe(std::uint8_t seq);
  std::uint64_t total_missing() const { return total_missing_; }

 private:
  std::optional<std::uint8_t> last_;
  std::uint64_t total_missing_ = 0;
};

// -- serial-to-UDP bridge ----------------------------------------------------

struct BridgeStats {
  std::uint64_t frames_forwarded = 0;
  std::uint64_t frames_dropped_crc = 0;
  std::vector<double> latency_samples;  // ms, one per forwarded frame

  std::uint64_t frames_received() const { return frames_forwarded + frames_dropped_crc; }
  double MeanLatencyMs() const;
  double MaxLatencyMs() const;
};

using ClockMs = std::function<double()>;

/// Monotonic wall clock in fractional milliseconds.
double SteadyClockMs();

/// Forwards each CRC-valid frame (sensor or command layout) unchanged as one
/// datagram and drops everything else, recording ingest-to-emit latency.
class Bridge {
 public:
  explicit Bridge(ClockMs clock = SteadyClockMs) : clock_(std::move(clock)) {}

  std::optional<Bytes> Forward(ByteView datagram_in, double ingest_ms);

  const BridgeStats& stats() const { return stats_; }
  void ResetStats() { stats_ = {}; }
  double Now() const { return clock_(); }

 private:
  ClockMs clock_;
  BridgeStats stats_;
};

/// True if `bytes` is exactly one valid sensor or command frame.
bool IsValidFrame(ByteView bytes);

}  // namespace subsense::wire
