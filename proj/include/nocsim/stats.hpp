/*
 * Copyright 2026 The nocsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

#include "json.hpp"
#include "nocsim/common.hpp"

namespace nocsim {

namespace detail {

/// All floating-point output is printed with 6 significant digits.
inline std::string format_g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

/// Rounds to the 6-significant-digit value that format_g6 prints, for
/// numeric JSON fields.
inline double round_g6(double x) { return std::strtod(format_g6(x).c_str(), nullptr); }

}  // namespace detail

/// Counters collected over one measurement window. measured_cycles is the
/// configured window length; a deadlocked run keeps the full denominator so
/// its throughput collapses toward zero instead of being inflated by an
/// early halt.
struct WindowStats {
  std::int64_t packets_injected = 0;
  std::int64_t packets_received = 0;
  std::int64_t flits_injected = 0;
  std::int64_t flits_received = 0;
  std::int64_t sum_packet_latency = 0;  // cycles, summed at tail ejection
  Cycle measured_cycles = 0;
  bool deadlock = false;

  friend bool operator==(const WindowStats&, const WindowStats&) = default;
};

/// Aggregate throughput in packets per cycle.
inline double throughput(const WindowStats& s) {
  if (s.measured_cycles <= 0)
    throw ContractError("throughput: measured_cycles must be positive");
  return static_cast<double>(s.packets_received) /
         static_cast<double>(s.measured_cycles);
}

/// Per-node variant of throughput().
inline double throughput_per_node(const WindowStats& s, int node_count) {
  if (node_count <= 0)
    throw ContractError("throughput_per_node: node_count must be positive");
  return throughput(s) / node_count;
}

/// Mean packet latency in cycles. Undefined when nothing was received.
inline double avg_latency(const WindowStats& s) {
  if (s.packets_received <= 0)
    throw ContractError("avg_latency: no packets received");
  return static_cast<double>(s.sum_packet_latency) /
         static_cast<double>(s.packets_received);
}

inline nlohmann::json to_json(const WindowStats& s) {
  const double lat = s.packets_received > 0 ? avg_latency(s) : 0.0;
  return nlohmann::json{
      {"cycle_window", s.measured_cycles},
      {"packets_injected", s.packets_injected},
      {"packets_received", s.packets_received},
      {"flits_injected", s.flits_injected},
      {"flits_received", s.flits_received},
      {"avg_latency", detail::round_g6(lat)},
      {"throughput", detail::round_g6(throughput(s))},
      {"deadlock", s.deadlock},
  };
}

inline std::string window_stats_csv_header() {
  return "cycle_window,packets_injected,packets_received,flits_injected,"
         "flits_received,avg_latency,throughput,deadlock";
}

inline std::string to_csv_row(const WindowStats& s) {
  const double lat = s.packets_received > 0 ? avg_latency(s) : 0.0;
  std::string row;
  row += std::to_string(s.measured_cycles);
  row += ',';
  row += std::to_string(s.packets_injected);
  row += ',';
  row += std::to_string(s.packets_received);
  row += ',';
  row += std::to_string(s.flits_injected);
  row += ',';
  row += std::to_string(s.flits_received);
  row += ',';
  row += detail::format_g6(lat);
  row += ',';
  row += detail::format_g6(throughput(s));
  row += ',';
  row += s.deadlock ? '1' : '0';
  return row;
}

}  // namespace nocsim
