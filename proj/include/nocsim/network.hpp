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

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "nocsim/common.hpp"
#include "nocsim/mesh.hpp"
#include "nocsim/rng.hpp"
#include "nocsim/routing.hpp"
#include "nocsim/sim_config.hpp"
#include "nocsim/stats.hpp"
#include "nocsim/traffic.hpp"
#include "nocsim/vc_allocation.hpp"

namespace nocsim {

struct Flit {
  std::uint32_t packet_id = 0;
  std::uint16_t src = 0;
  std::uint16_t dst = 0;
  bool head = false;
  bool tail = false;
  Cycle inject_cycle = 0;  // cycle the packet was created at its source
};

/// Fixed-capacity FIFO of flits. Overflow is an invariant violation, not a
/// recoverable condition: credits must have prevented the push.
class VcBuffer {
 public:
  VcBuffer() = default;
  explicit VcBuffer(int capacity) : slots_(static_cast<std::size_t>(capacity)) {}

  bool empty() const { return count_ == 0; }
  bool full() const { return count_ == static_cast<int>(slots_.size()); }
  int size() const { return count_; }
  int capacity() const { return static_cast<int>(slots_.size()); }

  void push(const Flit& f) {
    if (full()) throw InvariantViolation("VcBuffer: overflow");
    slots_[static_cast<std::size_t>((head_ + count_) % capacity())] = f;
    ++count_;
  }

  const Flit& front() const {
    if (empty()) throw InvariantViolation("VcBuffer: front of empty buffer");
    return slots_[static_cast<std::size_t>(head_)];
  }

  Flit pop() {
    Flit f = front();
    head_ = (head_ + 1) % capacity();
    --count_;
    return f;
  }

 private:
  std::vector<Flit> slots_;
  int head_ = 0;
  int count_ = 0;
};

namespace detail {

/// One virtual channel on an input port. A VC is held by a single packet
/// from the upstream head-flit claim until its tail flit departs this
/// buffer (wormhole). out_port is -1 while the head is unrouted.
struct InputVc {
  std::int8_t out_port = -1;
  std::int16_t out_vc = -1;
  bool active = false;
  VcBuffer buf;
};

struct InputPortMeta {
  bool exists = false;
  std::int16_t src_router = -1;  // upstream router feeding this port (-1: local NI)
  std::int8_t src_port = -1;     // ... and its output port index back toward us
  std::int16_t vc_begin = 0;     // range into RouterState::vcs
  std::int16_t vc_count = 0;
  std::int16_t idle_vcs = 0;     // VCs not currently claimed by a packet
};

struct LinkRegister {
  bool valid = false;
  std::int16_t vc = -1;  // downstream input VC the flit was allocated to
  Flit flit;
};

struct OutputPort {
  bool exists = false;
  std::int16_t dst_router = -1;  // -1 for the Local ejection port
  std::int8_t dst_port = -1;
  int rr_vc = 0;     // round-robin start for downstream VC allocation
  int rr_grant = 0;  // round-robin start for switch arbitration
  std::int32_t credit_base = 0;       // audit bookkeeping
  std::vector<std::int16_t> assigned;  // input VC slots currently routed here
  std::vector<std::int32_t> credits;   // free slots per downstream VC
  LinkRegister link;

  void drop_assigned(std::int16_t slot) {
    for (auto& s : assigned) {
      if (s == slot) {
        s = assigned.back();
        assigned.pop_back();
        return;
      }
    }
  }
};

/// A router's input VCs live in one flat array (ports are ranges into it)
/// so the switch-allocation scan walks contiguous memory.
struct RouterState {
  Coord coord;
  std::array<InputPortMeta, kPorts> in;
  std::array<OutputPort, kPorts> out;
  std::vector<InputVc> vcs;
  std::vector<std::int8_t> slot_port;   // port owning each flat VC index
  std::vector<std::int16_t> unrouted;   // VC slots whose head flit awaits a route
  std::int32_t flits = 0;               // resident flits across this router's buffers
};

/// Per-node network interface: an unbounded source queue plus the packet
/// currently being streamed into the router's Local input port.
struct NiState {
  struct Pending {
    std::uint32_t id = 0;
    std::uint16_t src = 0;
    std::uint16_t dst = 0;
    Cycle created = 0;
  };
  std::deque<Pending> queue;
  bool streaming = false;
  Pending current;
  int vc = -1;
  int sent = 0;
  int rr_vc = 0;
};

struct CreditEvent {
  std::int32_t* counter;  // upstream credit cell; routers never reallocate
  std::int32_t slot;      // flat credit-slot id, for audit accounting
};

}  // namespace detail

/// Cycle-level k-ary 2-mesh with wormhole switching, virtual channels and
/// credit-based flow control. Routers are single-cycle: a flit can be
/// routed, win VC and switch allocation, and enter the output link register
/// in the cycle it reaches the front of its buffer; the link delivers it at
/// the next cycle boundary, so every hop costs one cycle.
///
/// One instance is single-threaded; independent instances can run
/// concurrently. All randomness flows from the per-instance seeded
/// generator.
class NetworkState {
 public:
  NetworkState(const SimConfig& cfg, const std::optional<VcAllocation>& vc_alloc)
      : cfg_(cfg), rng_(cfg.rng_seed) {
    cfg_.validate();
    const int k = cfg_.mesh_radix;
    const int n = cfg_.node_count();
    if (vc_alloc) vc_alloc->validate(n);

    routers_.resize(static_cast<std::size_t>(n));
    nis_.resize(static_cast<std::size_t>(n));
    for (int id = 0; id < n; ++id) {
      detail::RouterState& r = routers_[static_cast<std::size_t>(id)];
      r.coord = coord_of(id, k);
      for (int p = 0; p < kPorts; ++p) {
        int vcs = 0;
        if (p == kLocalPort) {
          // Local injection port, never reconfigured by allocations.
          vcs = cfg_.vc_default;
          r.in[kLocalPort].exists = true;
        } else {
          const auto d = static_cast<Direction>(p);
          const Coord nb = step_toward(r.coord, d);
          if (!in_mesh(nb, k)) continue;
          const int nb_id = node_id(nb, k);
          vcs = vc_alloc ? vc_alloc->counts[static_cast<std::size_t>(id)]
                                           [static_cast<std::size_t>(p)]
                         : cfg_.vc_default;
          r.in[static_cast<std::size_t>(p)].exists = true;
          r.in[static_cast<std::size_t>(p)].src_router = static_cast<std::int16_t>(nb_id);
          r.in[static_cast<std::size_t>(p)].src_port =
              static_cast<std::int8_t>(opposite(d));
          r.out[static_cast<std::size_t>(p)].exists = true;
          r.out[static_cast<std::size_t>(p)].dst_router = static_cast<std::int16_t>(nb_id);
          r.out[static_cast<std::size_t>(p)].dst_port =
              static_cast<std::int8_t>(opposite(d));
        }
        r.in[static_cast<std::size_t>(p)].vc_begin =
            static_cast<std::int16_t>(r.vcs.size());
        r.in[static_cast<std::size_t>(p)].vc_count = static_cast<std::int16_t>(vcs);
        r.in[static_cast<std::size_t>(p)].idle_vcs = static_cast<std::int16_t>(vcs);
        for (int v = 0; v < vcs; ++v) {
          detail::InputVc vc;
          vc.buf = VcBuffer(cfg_.vc_buffer_depth);
          r.vcs.push_back(std::move(vc));
          r.slot_port.push_back(static_cast<std::int8_t>(p));
        }
      }
      r.out[kLocalPort].exists = true;  // ejection, infinite sink
    }
    // Credit counters mirror the downstream input buffers.
    std::int32_t credit_slots = 0;
    for (auto& r : routers_) {
      for (int p = 0; p < kMeshPorts; ++p) {
        auto& out = r.out[static_cast<std::size_t>(p)];
        if (!out.exists) continue;
        const auto& dst_ip = routers_[static_cast<std::size_t>(out.dst_router)]
                                 .in[static_cast<std::size_t>(out.dst_port)];
        out.credits.assign(static_cast<std::size_t>(dst_ip.vc_count),
                           cfg_.vc_buffer_depth);
        out.credit_base = credit_slots;
        credit_slots += dst_ip.vc_count;
      }
    }
    audit_pending_.assign(static_cast<std::size_t>(credit_slots), 0);
    credit_events_.reserve(static_cast<std::size_t>(n) * 8);
    active_links_.reserve(static_cast<std::size_t>(n) * kMeshPorts);
  }

  // Single-owner by design (and the credit queue holds pointers into the
  // router array): movable, not copyable.
  NetworkState(const NetworkState&) = delete;
  NetworkState& operator=(const NetworkState&) = delete;
  NetworkState(NetworkState&&) = default;
  NetworkState& operator=(NetworkState&&) = default;

  const SimConfig& config() const { return cfg_; }
  Cycle cycle() const { return cycle_; }

  void set_routing(RoutingAlgorithm alg) { routing_ = alg; }
  RoutingAlgorithm routing() const { return routing_; }

  /// Audit interval in cycles (0 disables). Every interval the flit
  /// conservation identity is re-counted from the buffers; every 16th
  /// interval the full credit/bookkeeping audit runs. Per-packet latency
  /// floors are checked at every ejection while auditing is on. Violations
  /// throw InvariantViolation.
  void set_audit_every(Cycle n) { audit_every_ = n; }

  bool port_exists(int router, Direction d) const {
    return router_at(router).in[static_cast<std::size_t>(d)].exists;
  }
  int input_vc_count(int router, Direction d) const {
    const auto& ip = router_at(router).in[static_cast<std::size_t>(d)];
    return ip.exists ? ip.vc_count : 0;
  }
  int mesh_neighbor_count(int router) const {
    int c = 0;
    for (int p = 0; p < kMeshPorts; ++p)
      if (router_at(router).in[static_cast<std::size_t>(p)].exists) ++c;
    return c;
  }

  std::int64_t total_flits_injected() const { return injected_total_; }
  std::int64_t total_flits_received() const { return received_total_; }

  /// Flits resident in buffers and link registers, recounted from scratch.
  std::int64_t count_resident_flits() const {
    std::int64_t res = 0;
    for (const auto& r : routers_) {
      for (const auto& vc : r.vcs) res += vc.buf.size();
      for (int p = 0; p < kMeshPorts; ++p) {
        const auto& out = r.out[static_cast<std::size_t>(p)];
        if (out.exists && out.link.valid) ++res;
      }
    }
    return res;
  }

  /// Runs warmup_cycles (stats discarded) then measure_cycles (stats
  /// collected). Halts early with deadlock=true if no flit moves for
  /// stall_threshold consecutive cycles while flits are resident.
  WindowStats run_window(const TrafficSpec& traffic, double rate) {
    if (!(rate >= 0.0 && rate <= 1.0))
      throw ContractError("run_window: rate must be in [0, 1]");
    if (traffic.mesh_radix != cfg_.mesh_radix)
      throw ConfigError("run_window: traffic mesh_radix mismatch");

    WindowStats stats;
    stats.measured_cycles = cfg_.measure_cycles;
    Cycle stall_run = 0;
    const Cycle total = cfg_.warmup_cycles + cfg_.measure_cycles;
    for (Cycle c = 0; c < total; ++c) {
      const bool measuring = c >= cfg_.warmup_cycles;
      const bool moved = step_cycle(traffic, rate, measuring, stats);
      if (audit_every_ > 0 && cycle_ % audit_every_ == 0) {
        if (cycle_ % (16 * audit_every_) == 0)
          audit();
        else
          audit_conservation();
      }
      if (!moved && resident_ > 0) {
        if (++stall_run >= cfg_.stall_threshold) {
          stats.deadlock = true;
          break;
        }
      } else {
        stall_run = 0;
      }
    }
    return stats;
  }

  /// Flit conservation only: every flit ever injected is accounted for by
  /// an ejection or a buffer/link slot, recounted from the ground truth.
  void audit_conservation() const {
    if (count_resident_flits() != resident_)
      throw InvariantViolation("audit: resident flit counter drifted");
    if (injected_total_ != received_total_ + resident_)
      throw InvariantViolation("audit: flit conservation violated");
  }

  /// Full consistency check; throws InvariantViolation on failure.
  void audit() const {
    audit_conservation();
    for (const auto& e : credit_events_)
      ++audit_pending_[static_cast<std::size_t>(e.slot)];
    std::int64_t per_router = 0;
    std::int64_t regs = 0;
    for (const auto& r : routers_) {
      per_router += r.flits;
      for (int p = 0; p < kMeshPorts; ++p) {
        const auto& out = r.out[static_cast<std::size_t>(p)];
        if (!out.exists) continue;
        if (out.link.valid) ++regs;
        const auto& dst = routers_[static_cast<std::size_t>(out.dst_router)];
        const auto& dst_ip = dst.in[static_cast<std::size_t>(out.dst_port)];
        for (int v = 0; v < static_cast<int>(out.credits.size()); ++v) {
          const int credit = out.credits[static_cast<std::size_t>(v)];
          if (credit < 0) throw InvariantViolation("audit: negative credit");
          const int in_flight = (out.link.valid && out.link.vc == v) ? 1 : 0;
          const int in_queue =
              audit_pending_[static_cast<std::size_t>(out.credit_base + v)];
          const int occupancy =
              dst.vcs[static_cast<std::size_t>(dst_ip.vc_begin + v)].buf.size();
          if (credit + in_queue + in_flight + occupancy != cfg_.vc_buffer_depth)
            throw InvariantViolation("audit: credit accounting mismatch");
        }
      }
    }
    for (const auto& e : credit_events_)
      audit_pending_[static_cast<std::size_t>(e.slot)] = 0;
    if (per_router + regs != resident_)
      throw InvariantViolation("audit: per-router flit counters drifted");
    for (const auto& r : routers_) {
      // Unique valid entries plus a matching population count imply the
      // list is exactly the set of VCs waiting on a route.
      for (std::size_t i = 0; i < r.unrouted.size(); ++i) {
        const auto& vc = r.vcs[static_cast<std::size_t>(r.unrouted[i])];
        if (vc.out_port >= 0 || vc.buf.empty())
          throw InvariantViolation("audit: stale unrouted entry");
        for (std::size_t j = i + 1; j < r.unrouted.size(); ++j)
          if (r.unrouted[j] == r.unrouted[i])
            throw InvariantViolation("audit: duplicate unrouted entry");
      }
      std::size_t needs_route = 0;
      for (const auto& vc : r.vcs)
        if (vc.out_port < 0 && !vc.buf.empty()) ++needs_route;
      if (needs_route != r.unrouted.size())
        throw InvariantViolation("audit: head missing from unrouted list");
      for (int p = 0; p < kPorts; ++p) {
        const auto& ip = r.in[static_cast<std::size_t>(p)];
        if (!ip.exists) continue;
        int idle = 0;
        for (int v = 0; v < ip.vc_count; ++v)
          if (!r.vcs[static_cast<std::size_t>(ip.vc_begin + v)].active) ++idle;
        if (idle != ip.idle_vcs)
          throw InvariantViolation("audit: idle VC counter drifted");
      }
    }
  }

 private:
  const detail::RouterState& router_at(int id) const {
    if (id < 0 || id >= static_cast<int>(routers_.size()))
      throw ContractError("router id out of range");
    return routers_[static_cast<std::size_t>(id)];
  }

  bool step_cycle(const TrafficSpec& traffic, double rate, bool measuring,
                  WindowStats& stats) {
    const Cycle now = cycle_;
    bool moved = false;

    // 1. Credit arrival and link delivery from the previous cycle.
    for (const auto& e : credit_events_) ++*e.counter;
    credit_events_.clear();
    if (!active_links_.empty()) {
      moved = true;
      for (const auto& [rid, port] : active_links_) {
        auto& out =
            routers_[static_cast<std::size_t>(rid)].out[static_cast<std::size_t>(port)];
        auto& dst = routers_[static_cast<std::size_t>(out.dst_router)];
        const auto& dst_ip = dst.in[static_cast<std::size_t>(out.dst_port)];
        const auto slot = static_cast<std::int16_t>(dst_ip.vc_begin + out.link.vc);
        auto& dvc = dst.vcs[static_cast<std::size_t>(slot)];
        dvc.buf.push(out.link.flit);
        if (out.link.flit.head) dst.unrouted.push_back(slot);
        ++dst.flits;
        out.link.valid = false;
      }
      active_links_.clear();
    }

    // 2. Traffic generation and injection, one flit per node per cycle.
    const int n = cfg_.node_count();
    if (rate > 0.0) {
      const double p_start = rate / cfg_.packet_length;
      for (int node = 0; node < n; ++node) {
        detail::NiState& ni = nis_[static_cast<std::size_t>(node)];
        if (rng_.next_bernoulli(p_start)) {
          detail::NiState::Pending pkt;
          pkt.id = next_packet_id_++;
          pkt.src = static_cast<std::uint16_t>(node);
          pkt.dst = static_cast<std::uint16_t>(dest_for(traffic, node, rng_));
          pkt.created = now;
          ni.queue.push_back(pkt);
        }
        moved |= stream_from_ni(node, ni, measuring, stats);
      }
    } else {
      for (int node = 0; node < n; ++node)
        moved |= stream_from_ni(node, nis_[static_cast<std::size_t>(node)], measuring,
                                stats);
    }

    // 3. Single-cycle routers: route + VC allocate, then switch traversal.
    for (int id = 0; id < n; ++id) {
      detail::RouterState& r = routers_[static_cast<std::size_t>(id)];
      if (r.flits == 0) continue;
      route_and_allocate(id, r);
      moved |= switch_traverse(id, r, now, measuring, stats);
    }

    ++cycle_;
    return moved;
  }

  bool stream_from_ni(int node, detail::NiState& ni, bool measuring,
                      WindowStats& stats) {
    detail::RouterState& r = routers_[static_cast<std::size_t>(node)];
    const auto& lport = r.in[kLocalPort];
    if (!ni.streaming) {
      if (ni.queue.empty()) return false;
      for (int t = 0; t < lport.vc_count; ++t) {
        const int v = (ni.rr_vc + t) % lport.vc_count;
        auto& vc = r.vcs[static_cast<std::size_t>(lport.vc_begin + v)];
        if (vc.active) continue;
        vc.active = true;
        --r.in[kLocalPort].idle_vcs;
        ni.rr_vc = (v + 1) % lport.vc_count;
        ni.vc = v;
        ni.sent = 0;
        ni.current = ni.queue.front();
        ni.queue.pop_front();
        ni.streaming = true;
        break;
      }
      if (!ni.streaming) return false;
    }
    auto& vc = r.vcs[static_cast<std::size_t>(lport.vc_begin + ni.vc)];
    if (vc.buf.full()) return false;
    Flit f;
    f.packet_id = ni.current.id;
    f.src = ni.current.src;
    f.dst = ni.current.dst;
    f.inject_cycle = ni.current.created;
    f.head = ni.sent == 0;
    f.tail = ni.sent == cfg_.packet_length - 1;
    vc.buf.push(f);
    if (f.head)
      r.unrouted.push_back(static_cast<std::int16_t>(lport.vc_begin + ni.vc));
    ++ni.sent;
    ++r.flits;
    ++resident_;
    ++injected_total_;
    if (measuring) {
      ++stats.flits_injected;
      if (f.head) ++stats.packets_injected;
    }
    if (f.tail) ni.streaming = false;  // VC stays active until drained
    return true;
  }

  int free_downstream_vcs(const detail::OutputPort& out) const {
    const auto& dst = routers_[static_cast<std::size_t>(out.dst_router)];
    return dst.in[static_cast<std::size_t>(out.dst_port)].idle_vcs;
  }

  void route_and_allocate(int id, detail::RouterState& r) {
    if (r.unrouted.empty()) return;
    const int k = cfg_.mesh_radix;
    std::size_t kept = 0;
    for (std::size_t u = 0; u < r.unrouted.size(); ++u) {
      const std::int16_t idx = r.unrouted[u];
      auto& ivc = r.vcs[static_cast<std::size_t>(idx)];
      const Flit& f = ivc.buf.front();
      if (!f.head) throw InvariantViolation("route: unrouted VC holds a body flit");
      if (f.dst == id) {
        ivc.out_port = kLocalPort;
        ivc.out_vc = -1;
        r.out[kLocalPort].assigned.push_back(idx);
        continue;
      }
      FreeVcCounts free{};
      if (routing_ == RoutingAlgorithm::AdaptiveNorthLast) {
        for (int d = 0; d < kMeshPorts; ++d) {
          const auto& out = r.out[static_cast<std::size_t>(d)];
          if (out.exists) free[static_cast<std::size_t>(d)] = free_downstream_vcs(out);
        }
      }
      const auto cands =
          route_candidates(routing_, r.coord, coord_of(f.dst, k), free);
      const Direction dir =
          cands.count == 1
              ? cands.dirs[0]
              : cands.dirs[rng_.next_below(static_cast<std::uint32_t>(cands.count))];
      auto& out = r.out[static_cast<std::size_t>(static_cast<int>(dir))];
      auto& dst = routers_[static_cast<std::size_t>(out.dst_router)];
      auto& dst_ip = dst.in[static_cast<std::size_t>(out.dst_port)];
      bool allocated = false;
      if (dst_ip.idle_vcs > 0) {
        for (int t = 0; t < dst_ip.vc_count; ++t) {
          const int dv = (out.rr_vc + t) % dst_ip.vc_count;
          auto& dvc = dst.vcs[static_cast<std::size_t>(dst_ip.vc_begin + dv)];
          if (dvc.active) continue;
          dvc.active = true;
          --dst_ip.idle_vcs;
          out.rr_vc = (dv + 1) % dst_ip.vc_count;
          ivc.out_port = static_cast<std::int8_t>(dir);
          ivc.out_vc = static_cast<std::int16_t>(dv);
          out.assigned.push_back(idx);
          allocated = true;
          break;
        }
      }
      // No free downstream VC: retry (and for the adaptive/random
      // algorithms re-decide) next cycle.
      if (!allocated) r.unrouted[kept++] = idx;
    }
    r.unrouted.resize(kept);
  }

  bool switch_traverse(int id, detail::RouterState& r, Cycle now, bool measuring,
                       WindowStats& stats) {
    bool moved = false;
    std::array<bool, kPorts> used_in{};
    const int total = static_cast<int>(r.vcs.size());
    for (int op = 0; op < kPorts; ++op) {
      auto& out = r.out[static_cast<std::size_t>(op)];
      if (!out.exists || out.assigned.empty()) continue;
      if (op != kLocalPort && out.link.valid) continue;
      // Round-robin: the grantable requester closest after rr_grant wins.
      int winner = -1;
      int winner_dist = total + 1;
      for (const std::int16_t slot : out.assigned) {
        const auto& ivc = r.vcs[static_cast<std::size_t>(slot)];
        if (ivc.buf.empty()) continue;
        if (used_in[static_cast<std::size_t>(r.slot_port[static_cast<std::size_t>(slot)])])
          continue;
        if (op != kLocalPort && out.credits[static_cast<std::size_t>(ivc.out_vc)] <= 0)
          continue;
        const int dist = (slot - out.rr_grant + total) % total;
        if (dist < winner_dist) {
          winner_dist = dist;
          winner = slot;
        }
      }
      if (winner < 0) continue;
      out.rr_grant = (winner + 1) % total;
      const int in_port = r.slot_port[static_cast<std::size_t>(winner)];
      used_in[static_cast<std::size_t>(in_port)] = true;
      auto& ivc = r.vcs[static_cast<std::size_t>(winner)];
      const int out_vc = ivc.out_vc;
      const Flit f = ivc.buf.pop();
      --r.flits;
      moved = true;

      // Freed slot: return a credit to the upstream router (NI links read
      // occupancy directly and need none).
      const auto& ip = r.in[static_cast<std::size_t>(in_port)];
      if (ip.src_router >= 0) {
        auto& up_out = routers_[static_cast<std::size_t>(ip.src_router)]
                           .out[static_cast<std::size_t>(ip.src_port)];
        const int vc = winner - ip.vc_begin;
        credit_events_.push_back(detail::CreditEvent{
            &up_out.credits[static_cast<std::size_t>(vc)], up_out.credit_base + vc});
      }
      if (f.tail) {
        if (!ivc.buf.empty())
          throw InvariantViolation("traverse: flits behind a tail");
        ivc.active = false;
        ivc.out_port = -1;
        ivc.out_vc = -1;
        ++r.in[static_cast<std::size_t>(in_port)].idle_vcs;
        out.drop_assigned(static_cast<std::int16_t>(winner));
      }

      if (op == kLocalPort) {
        ++received_total_;
        --resident_;
        if (measuring) {
          ++stats.flits_received;
          if (f.tail) {
            ++stats.packets_received;
            stats.sum_packet_latency += now - f.inject_cycle;
          }
        }
        if (audit_every_ > 0 && f.tail) {
          const Cycle lat = now - f.inject_cycle;
          if (lat < manhattan(coord_of(f.src, cfg_.mesh_radix),
                              coord_of(f.dst, cfg_.mesh_radix)))
            throw InvariantViolation("traverse: latency below hop distance");
        }
      } else {
        --out.credits[static_cast<std::size_t>(out_vc)];
        out.link.valid = true;
        out.link.flit = f;
        out.link.vc = static_cast<std::int16_t>(out_vc);
        active_links_.emplace_back(static_cast<std::int16_t>(id),
                                   static_cast<std::int8_t>(op));
      }
    }
    return moved;
  }

  SimConfig cfg_;
  Rng rng_;
  RoutingAlgorithm routing_ = RoutingAlgorithm::XY;
  std::vector<detail::RouterState> routers_;
  std::vector<detail::NiState> nis_;
  std::vector<detail::CreditEvent> credit_events_;
  std::vector<std::pair<std::int16_t, std::int8_t>> active_links_;
  mutable std::vector<int> audit_pending_;
  Cycle cycle_ = 0;
  Cycle audit_every_ = 0;
  std::uint32_t next_packet_id_ = 0;
  std::int64_t resident_ = 0;
  std::int64_t injected_total_ = 0;
  std::int64_t received_total_ = 0;
};

/// Builds a fresh network: buffers empty, credits full, cycle zero. Without
/// an allocation every mesh port gets vc_default VCs.
inline NetworkState build_network(const SimConfig& cfg,
                                  const std::optional<VcAllocation>& vc_alloc = {}) {
  return NetworkState(cfg, vc_alloc);
}

}  // namespace nocsim
