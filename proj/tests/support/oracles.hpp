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

// Reference implementations used only by tests. None of this code calls into
// the library; each oracle is written from the stated rule directly so that
// a shared mistake cannot make both sides agree.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include <boost/crc.hpp>

namespace oracle {

// -- CRC ---------------------------------------------------------------------------

/// Bit-at-a-time CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xorout.
inline std::uint16_t CcittFalseBitwise(const std::vector<std::uint8_t>& data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    for (int i = 7; i >= 0; --i) {
      const bool in = (byte >> i) & 1;
      const bool top = (crc >> 15) & 1;
      crc = static_cast<std::uint16_t>(crc << 1);
      if (in != top) crc ^= 0x1021;
    }
  }
  return crc;
}

/// Bit-at-a-time CRC-16/X.25: poly 0x1021 reflected, init 0xFFFF, xorout 0xFFFF.
inline std::uint16_t X25Bitwise(const std::vector<std::uint8_t>& data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    for (int i = 0; i < 8; ++i) {
      const bool in = (byte >> i) & 1;
      const bool low = crc & 1;
      crc = static_cast<std::uint16_t>(crc >> 1);
      if (in != low) crc ^= 0x8408;
    }
  }
  return static_cast<std::uint16_t>(~crc);
}

inline std::uint16_t CcittFalseBoost(const std::vector<std::uint8_t>& data) {
  boost::crc_optimal<16, 0x1021, 0xFFFF, 0x0000, false, false> crc;
  crc.process_bytes(data.data(), data.size());
  return static_cast<std::uint16_t>(crc.checksum());
}

inline std::uint16_t X25Boost(const std::vector<std::uint8_t>& data) {
  boost::crc_optimal<16, 0x1021, 0xFFFF, 0xFFFF, true, true> crc;
  crc.process_bytes(data.data(), data.size());
  return static_cast<std::uint16_t>(crc.checksum());
}

inline const std::vector<std::uint8_t>& CheckString() {
  static const std::vector<std::uint8_t> s{'1', '2', '3', '4', '5', '6', '7', '8', '9'};
  return s;
}

// Published catalogue check values over "123456789".
inline constexpr std::uint16_t kCcittFalseCheck = 0x29B1;
inline constexpr std::uint16_t kX25Check = 0x906E;

// -- controller laws ---------------------------------------------------------------

/// T2 as the affine map from (n_tol, 1] onto [t2_max, t2_min].
inline double T2(double e, double n_tol = 0.05, double t2_min = 10.0, double t2_max = 300.0) {
  if (e <= n_tol) return t2_max;
  const double slope = (t2_min - t2_max) / (1.0 - n_tol);
  return t2_max + slope * (e - n_tol);
}

/// Gripper closure rate per second for a pulse width, closing positive.
inline double GripperRate(int width_us, double rate_max = 2.0) {
  const int off = width_us - 1500;
  const int mag = off < 0 ? -off : off;
  if (mag <= 30) return 0.0;
  const double r = rate_max * (mag - 30) / 370.0;
  return off < 0 ? r : -r;
}

// -- Tower of Hanoi ------------------------------------------------------------------

/// State as the pole index of each disc, disc 0 smallest. 3^3 = 27 states.
using HanoiState = std::array<int, 3>;

inline int Encode(const HanoiState& s) { return s[0] + 3 * s[1] + 9 * s[2]; }

inline HanoiState Decode(int code) { return {code % 3, (code / 3) % 3, code / 9}; }

/// Top disc of a pole: the smallest disc sitting on it.
inline std::optional<int> Top(const HanoiState& s, int pole) {
  for (int d = 0; d < 3; ++d) {
    if (s[d] == pole) return d;
  }
  return std::nullopt;
}

/// The four rules spelled out: one disc, from the top, never larger on smaller, stays on a pole.
inline bool BruteForceLegal(const HanoiState& s, int from, int to) {
  if (from == to) return false;
  const auto moving = Top(s, from);
  if (!moving) return false;
  const auto dest = Top(s, to);
  return !dest || *dest > *moving;
}

/// Bottom-first stacks for a state: larger discs lower.
inline std::array<std::vector<int>, 3> Stacks(const HanoiState& s) {
  std::array<std::vector<int>, 3> poles;
  for (int d = 2; d >= 0; --d) poles[s[d]].push_back(d);
  return poles;
}

/// Breadth-first shortest path length between two states.
inline int BfsDistance(const HanoiState& from, const HanoiState& to) {
  std::map<int, int> dist;
  std::queue<int> q;
  dist[Encode(from)] = 0;
  q.push(Encode(from));
  while (!q.empty()) {
    const int cur = q.front();
    q.pop();
    if (cur == Encode(to)) return dist[cur];
    const HanoiState s = Decode(cur);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (!BruteForceLegal(s, a, b)) continue;
        HanoiState n = s;
        n[*Top(s, a)] = b;
        if (dist.emplace(Encode(n), dist[cur] + 1).second) q.push(Encode(n));
      }
    }
  }
  return -1;
}

}  // namespace oracle
