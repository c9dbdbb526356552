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

#include "subsense/wire.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace subsense::wire {

namespace {

// MSB-first table for polynomial 0x1021.
constexpr std::array<std::uint16_t, 256> MakeMsbTable() {
  std::array<std::uint16_t, 256> t{};
  for (int i = 0; i < 256; ++i) {
    std::uint16_t crc = static_cast<std::uint16_t>(i << 8);
    for (int b = 0; b < 8; ++b) {
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021) : static_cast<std::uint16_t>(crc << 1);
    }
    t[i] = crc;
  }
  return t;
}

// LSB-first table for the reflected polynomial 0x8408.
constexpr std::array<std::uint16_t, 256> MakeLsbTable() {
  std::array<std::uint16_t, 256> t{};
  for (int i = 0; i < 256; ++i) {
    std::uint16_t crc = static_cast<std::uint16_t>(i);
    for (int b = 0; b < 8; ++b) {
      crc = (crc & 1) ? static_cast<std::uint16_t>((crc >> 1) ^ 0x8408) : static_cast<std::uint16_t>(crc >> 1);
    }
    t[i] = crc;
  }
  return t;
}

constexpr auto kMsbTable = MakeMsbTable();
constexpr auto kLsbTable = MakeLsbTable();

void PutU16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint16_t GetU16(ByteView b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

}  // namespace

std::uint16_t Crc16CcittFalse(ByteView data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    crc = static_cast<std::uint16_t>((crc << 8) ^ kMsbTable[((crc >> 8) ^ byte) & 0xFF]);
  }
  return crc;
}

std::uint16_t Crc16X25(ByteView data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    crc = static_cast<std::uint16_t>((crc >> 8) ^ kLsbTable[(crc ^ byte) & 0xFF]);
  }
  return static_cast<std::uint16_t>(crc ^ 0xFFFF);
}

const char* ToString(DecodeError e) {
  switch (e) {
    case DecodeError::kNone:
      return "none";
    case DecodeError::kTruncated:
      return "truncated";
    case DecodeError::kBadSync:
      return "bad_sync";
    case DecodeError::kBadLength:
      return "bad_length";
    case DecodeError::kBadCrc:
      return "bad_crc";
    case DecodeError::kBadPayload:
      return "bad_payload";
    case DecodeError::kUnknownMsgId:
      return "unknown_msg_id";
    case DecodeError::kPayloadLengthMismatch:
      return "payload_length_mismatch";
  }
  return "?";
}

// -- sensor frames ---------------------------------------------------------

Bytes EncodeSensorFrame(const SensorFrame& f) {
  if (f.pot_raw > kPotRawMax) {
    throw EncodeError("pot_raw " + std::to_string(f.pot_raw) + " exceeds 1023");
  }
  Bytes out;
  out.reserve(kSensorFrameSize);
  out.push_back(kSensorSync);
  out.push_back(kSensorBodyLen);
  PutU16(out, f.pot_raw);
  out.push_back(f.button ? 0x01 : 0x00);
  out.push_back(f.seq);
  PutU16(out, Crc16CcittFalse(ByteView(out).subspan(1, 5)));
  return out;
}

Decoded<SensorFrame> DecodeSensorFrame(ByteView b) {
  if (b.empty()) return {std::nullopt, DecodeError::kTruncated};
  if (b[0] != kSensorSync) return {std::nullopt, DecodeError::kBadSync};
  if (b.size() < 2) return {std::nullopt, DecodeError::kTruncated};
  if (b[1] != kSensorBodyLen) return {std::nullopt, DecodeError::kBadLength};
  if (b.size() < kSensorFrameSize) return {std::nullopt, DecodeError::kTruncated};
  if (Crc16CcittFalse(b.subspan(1, 5)) != GetU16(b, 6)) return {std::nullopt, DecodeError::kBadCrc};

  SensorFrame f;
  f.pot_raw = GetU16(b, 2);
  if (f.pot_raw > kPotRawMax || b[4] > 0x01) return {std::nullopt, DecodeError::kBadPayload};
  f.button = b[4] == 0x01;
  f.seq = b[5];
  return {f, DecodeError::kNone};
}

// -- command frames --------------------------------------------------------

bool IsKnownMsgId(std::uint16_t id) {
  return id == static_cast<std::uint16_t>(MsgId::kSetServo) || id == static_cast<std::uint16_t>(MsgId::kManualSetpoint);
}

std::size_t ExpectedPayloadLength(MsgId id) {
  switch (id) {
    case MsgId::kSetServo:
      return 3;
    case MsgId::kManualSetpoint:
      return 12;
  }
  return 0;
}

Bytes EncodeCommandUnchecked(const CommandFrame& c) {
  if (c.payload.size() > kMaxPayload) throw EncodeError("payload exceeds 64 bytes");
  Bytes out;
  out.reserve(kCommandOverhead + c.payload.size());
  out.push_back(kCommandMagic);
  out.push_back(static_cast<std::uint8_t>(c.payload.size()));
  out.push_back(c.seq);
  out.push_back(kCommandSysId);
  out.push_back(kCommandCompId);
  PutU16(out, c.msg_id);
  out.insert(out.end(), c.payload.begin(), c.payload.end());
  PutU16(out, Crc16X25(ByteView(out).subspan(1)));
  return out;
}

Bytes EncodeCommand(const CommandFrame& c) {
  if (!IsKnownMsgId(c.msg_id)) throw EncodeError("unknown msg_id " + std::to_string(c.msg_id));
  if (c.payload.size() != ExpectedPayloadLength(static_cast<MsgId>(c.msg_id))) {
    throw EncodeError("payload length does not match msg_id " + std::to_string(c.msg_id));
  }
  if (c.msg_id == static_cast<std::uint16_t>(MsgId::kManualSetpoint) && !ParseManualSetpoint(c)) {
    throw EncodeError("MANUAL_SETPOINT axis outside [-1000, 1000]");
  }
  if (c.msg_id == static_cast<std::uint16_t>(MsgId::kSetServo) && !ParseSetServo(c)) {
    throw EncodeError("SET_SERVO width outside [1100, 1900]");
  }
  return EncodeCommandUnchecked(c);
}

std::optional<std::size_t> CommandFrameSize(ByteView b) {
  if (b.size() < 2 || b[0] != kCommandMagic) return std::nullopt;
  return kCommandOverhead + b[1];
}

Decoded<CommandFrame> DecodeCommand(ByteView b) {
  if (b.empty()) return {std::nullopt, DecodeError::kTruncated};
  if (b[0] != kCommandMagic) return {std::nullopt, DecodeError::kBadSync};
  if (b.size() < 2) return {std::nullopt, DecodeError::kTruncated};
  const std::size_t len = b[1];
  if (len > kMaxPayload) return {std::nullopt, DecodeError::kBadLength};
  const std::size_t total = kCommandOverhead + len;
  if (b.size() < total) return {std::nullopt, DecodeError::kTruncated};
  if (Crc16X25(b.subspan(1, total - 3)) != GetU16(b, total - 2)) return {std::nullopt, DecodeError::kBadCrc};
  if (b[3] != kCommandSysId || b[4] != kCommandCompId) return {std::nullopt, DecodeError::kBadPayload};

  CommandFrame c;
  c.seq = b[2];
  c.msg_id = GetU16(b, 5);
  if (!IsKnownMsgId(c.msg_id)) return {std::nullopt, DecodeError::kUnknownMsgId};
  if (len != ExpectedPayloadLength(static_cast<MsgId>(c.msg_id))) {
    return {std::nullopt, DecodeError::kPayloadLengthMismatch};
  }
  c.payload.assign(b.begin() + kCommandHeaderSize, b.begin() + kCommandHeaderSize + len);
  return {std::move(c), DecodeError::kNone};
}

CommandFrame MakeSetServo(std::uint8_t seq, const SetServo& s) {
  CommandFrame c{seq, static_cast<std::uint16_t>(MsgId::kSetServo), {}};
  c.payload.push_back(s.channel);
  PutU16(c.payload, s.width_us);
  return c;
}

CommandFrame MakeManualSetpoint(std::uint8_t seq, const ManualSetpoint& m) {
  CommandFrame c{seq, static_cast<std::uint16_t>(MsgId::kManualSetpoint), {}};
  for (std::int16_t v : m.axes) PutU16(c.payload, static_cast<std::uint16_t>(v));
  return c;
}

Decoded<SetServo> ParseSetServo(const CommandFrame& c) {
  if (c.msg_id != static_cast<std::uint16_t>(MsgId::kSetServo)) return {std::nullopt, DecodeError::kUnknownMsgId};
  if (c.payload.size() != 3) return {std::nullopt, DecodeError::kPayloadLengthMismatch};
  SetServo s{c.payload[0], GetU16(c.payload, 1)};
  if (s.width_us < 1100 || s.width_us > 1900) return {std::nullopt, DecodeError::kBadPayload};
  return {s, DecodeError::kNone};
}

Decoded<ManualSetpoint> ParseManualSetpoint(const CommandFrame& c) {
  if (c.msg_id != static_cast<std::uint16_t>(MsgId::kManualSetpoint)) {
    return {std::nullopt, DecodeError::kUnknownMsgId};
  }
  if (c.payload.size() != 12) return {std::nullopt, DecodeError::kPayloadLengthMismatch};
  ManualSetpoint m;
  for (std::size_t i = 0; i < m.axes.size(); ++i) {
    m.axes[i] = static_cast<std::int16_t>(GetU16(c.payload, 2 * i));
    if (m.axes[i] < -kManualAxisLimit || m.axes[i] > kManualAxisLimit) {
      return {std::nullopt, DecodeError::kBadPayload};
    }
  }
  return {m, DecodeError::kNone};
}

std::int16_t ToMilli(double axis) {
  if (std::isnan(axis)) return 0;
  return static_cast<std::int16_t>(std::lround(std::clamp(axis, -1.0, 1.0) * kManualAxisLimit));
}

double FromMilli(std::int16_t milli) { return static_cast<double>(milli) / kManualAxisLimit; }

// -- stream decoding -------------------------------------------------------

void SensorStreamDecoder::Feed(ByteView bytes) { buffer_.insert(buffer_.end(), bytes.begin(), bytes.end()); }

std::optional<SensorFrame> SensorStreamDecoder::Next() {
  while (!buffer_.empty()) {
    if (buffer_.front() != kSensorSync) {
      buffer_.pop_front();
      ++counters_.bad_sync_bytes;
      continue;
    }
    if (buffer_.size() < kSensorFrameSize) {
      // A wrong length byte can be rejected before the rest arrives.
      if (buffer_.size() >= 2 && buffer_[1] != kSensorBodyLen) {
        ++counters_.bad_length;
        buffer_.pop_front();
        continue;
      }
      return std::nullopt;
    }
    std::array<std::uint8_t, kSensorFrameSize> window{};
    std::copy_n(buffer_.begin(), kSensorFrameSize, window.begin());
    auto d = DecodeSensorFrame(window);
    if (d) {
      buffer_.erase(buffer_.begin(), buffer_.begin() + kSensorFrameSize);
      ++counters_.frames;
      return d.value;
    }
    switch (d.error) {
      case DecodeError::kBadLength:
        ++counters_.bad_length;
        break;
      case DecodeError::kBadCrc:
        ++counters_.bad_crc;
        break;
      default:
        ++counters_.bad_payload;
        break;
    }
    buffer_.pop_front();
  }
  return std::nullopt;
}

std::vector<SensorFrame> SensorStreamDecoder::DrainAll() {
  std::vector<SensorFrame> out;
  while (auto f = Next()) out.push_back(*f);
  return out;
}

std::uint32_t SequenceTracker::Observe(std::uint8_t seq) {
  std::uint32_t missing = 0;
  if (last_) missing = static_cast<std::uint8_t>(seq - *last_ - 1);
  last_ = seq;
  total_missing_ += missing;
  return missing;
}

// -- bridge ----------------------------------------------------------------

double BridgeStats::MeanLatencyMs() const {
  if (latency_samples.empty()) return 0.0;
  return std::accumulate(latency_samples.begin(), latency_samples.end(), 0.0) /
         static_cast<double>(latency_samples.size());
}

double BridgeStats::MaxLatencyMs() const {
  if (latency_samples.empty()) return 0.0;
  return *std::max_element(latency_samples.begin(), latency_samples.end());
}

double SteadyClockMs() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

bool IsValidFrame(ByteView bytes) {
  if (bytes.empty()) return false;
  if (bytes[0] == kSensorSync) return bytes.size() == kSensorFrameSize && DecodeSensorFrame(bytes).value.has_value();
  if (bytes[0] == kCommandMagic) {
    auto size = CommandFrameSize(bytes);
    return size && *size == bytes.size() && DecodeCommand(bytes).value.has_value();
  }
  return false;
}

std::optional<Bytes> Bridge::Forward(ByteView datagram_in, double ingest_ms) {
  if (!IsValidFrame(datagram_in)) {
    ++stats_.frames_dropped_crc;
    return std::nullopt;
  }
  Bytes out(datagram_in.begin(), datagram_in.end());
  ++stats_.frames_forwarded;
  stats_.latency_samples.push_back(std::max(0.0, clock_() - ingest_ms));
  return out;
}

}  // namespace subsense::wire
