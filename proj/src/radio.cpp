#include "wsnlight/radio.hpp"

#include <algorithm>
#include <cmath>

namespace wsnlight {

double on_air_duration(const ChannelParams& params) {
    return (params.preamble_bits + 16) / params.data_rate_bps;
}

std::optional<Frame> RxQueue::push(const Frame& f) {
    std::optional<Frame> dropped;
    if (static_cast<int>(q_.size()) >= capacity_) {
        dropped = q_.front();
        q_.pop_front();
    }
    q_.push_back(f);
    return dropped;
}

std::optional<Frame> RxQueue::pop() {
    if (q_.empty()) return std::nullopt;
    Frame f = q_.front();
    q_.pop_front();
    return f;
}

bool in_range(const std::optional<Vec2>& a, const std::optional<Vec2>& b, double range_m) {
    if (!a || !b) return true; // nodes without coordinates hear everything
    const double dx = a->x - b->x;
    const double dy = a->y - b->y;
    return std::sqrt(dx * dx + dy * dy) <= range_m;
}

RadioPacket Channel::begin(NodeId src, std::optional<Vec2> src_pos, HwAddress dest, Frame frame,
                           double t_start) {
    RadioPacket pkt{src, src_pos, dest, frame, t_start, t_start + duration(), next_serial_++};
    max_duration_ = std::max(max_duration_, duration());
    active_.push_back(pkt);
    return pkt;
}

bool Channel::collided_at(const RadioPacket& pkt, const ChannelReceiver& rx) const {
    for (const RadioPacket& other : active_) {
        if (other.serial == pkt.serial) continue;
        const bool overlaps = other.t_start < pkt.t_end && pkt.t_start < other.t_end;
        if (!overlaps) continue;
        // The interferer matters if the receiver can hear it, or is it.
        if (other.src == rx.node) return true;
        if (in_range(other.src_pos, rx.pos, params_.range_m)) return true;
    }
    return false;
}

std::vector<NodeId> Channel::resolve(const RadioPacket& pkt,
                                     std::span<const ChannelReceiver> receivers, Rng& rng) {
    std::vector<NodeId> delivered;
    for (const ChannelReceiver& rx : receivers) {
        if (rx.node == pkt.src) continue;
        if (!in_range(pkt.src_pos, rx.pos, params_.range_m)) continue;
        if (!(pkt.dest == kBroadcastAddr || pkt.dest == rx.rx_addr)) continue;
        if (collided_at(pkt, rx)) continue;
        if (rng.bernoulli(params_.p_loss)) continue;
        delivered.push_back(rx.node);
    }
    // Anything that ended long enough ago can no longer overlap a pending packet.
    const double horizon = pkt.t_end - 2 * max_duration_;
    std::erase_if(active_, [&](const RadioPacket& p) { return p.t_end < horizon; });
    return delivered;
}

} // namespace wsnlight
