#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "wsnlight/frame.hpp"
#include "wsnlight/rng.hpp"

namespace wsnlight {

enum class Role : uint8_t { Mn = 0, Sn = 1, Lcn = 2 };

struct NodeId {
    Role role = Role::Mn;
    uint8_t id = 0; // 0 for the MN, 1..15 for SN/LCN

    auto operator<=>(const NodeId&) const = default;
};

struct Vec2 {
    double x = 0;
    double y = 0;
};

struct ChannelParams {
    double data_rate_bps = 4000; // "4KB/s" read as 4000 bit/s; configurable
    int preamble_bits = 8;
    double range_m = 80;
    double p_loss = 0;          // independent per-receiver Bernoulli loss
    int rx_queue_capacity = 8;
};

// Address byte + frame byte, plus preamble.
double on_air_duration(const ChannelParams& params);

struct RadioPacket {
    NodeId src;
    std::optional<Vec2> src_pos; // missing position means "in range of everyone"
    HwAddress dest;
    Frame frame;
    double t_start = 0;
    double t_end = 0;
    uint64_t serial = 0; // assigned by the channel
};

// Bounded FIFO of received frames; overflow drops the oldest entry.
class RxQueue {
public:
    explicit RxQueue(int capacity = 8) : capacity_(capacity) {}

    // Returns the dropped frame when the queue was full.
    std::optional<Frame> push(const Frame& f);
    std::optional<Frame> pop();
    size_t size() const { return q_.size(); }
    int capacity() const { return capacity_; }

private:
    int capacity_;
    std::deque<Frame> q_;
};

struct ReceiverConfig {
    HwAddress rx_addr = kBroadcastAddr;
    RxQueue queue{8};

    bool accepts(HwAddress dest) const {
        return dest == kBroadcastAddr || dest == rx_addr;
    }
};

struct ChannelReceiver {
    NodeId node;
    std::optional<Vec2> pos;
    HwAddress rx_addr;
};

// Single shared medium. Transmissions are registered as they start; delivery
// of a packet is resolved at its t_end, when every interval that could have
// overlapped it is known. Overlapping packets destroy each other at every
// receiver in range of both senders (no capture effect).
class Channel {
public:
    explicit Channel(ChannelParams params) : params_(params) {}

    const ChannelParams& params() const { return params_; }
    double duration() const { return on_air_duration(params_); }

    RadioPacket begin(NodeId src, std::optional<Vec2> src_pos, HwAddress dest, Frame frame,
                      double t_start);

    // Delivery set for a packet at its t_end. Receivers are evaluated in the
    // order given, so callers pass them sorted for reproducible loss draws.
    std::vector<NodeId> resolve(const RadioPacket& pkt, std::span<const ChannelReceiver> receivers,
                                Rng& rng);

    size_t active_count() const { return active_.size(); }

private:
    bool collided_at(const RadioPacket& pkt, const ChannelReceiver& rx) const;

    ChannelParams params_;
    std::vector<RadioPacket> active_;
    double max_duration_ = 0;
    uint64_t next_serial_ = 1;
};

bool in_range(const std::optional<Vec2>& a, const std::optional<Vec2>& b, double range_m);

} // namespace wsnlight
