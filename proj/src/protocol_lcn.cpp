#include <algorithm>

#include "wsnlight/protocol.hpp"

namespace wsnlight {

namespace {

void hello(LcnState& lcn, const ProtocolParams& p, double now, Rng& rng, Actions& out) {
    out.push_back(SendAction{kBroadcastAddr, Frame{FrameKind::LcnHello, lcn.id}, 0});
    out.push_back(TimerAction{TimerKind::HelloBackoff,
                              now + rng.uniform(p.hello_backoff_min_s, p.hello_backoff_max_s)});
}

} // namespace

void lcn_init(LcnState& lcn, const ProtocolParams& p, double now, Rng& rng, Actions& out) {
    // First hello is also backed off so lamps powered up together desync.
    out.push_back(TimerAction{TimerKind::HelloBackoff,
                              now + rng.uniform(p.hello_backoff_min_s, p.hello_backoff_max_s)});
}

void lcn_handle(LcnState& lcn, const TimerFired& ev, const ProtocolParams& p, double, Rng& rng,
                Actions& out) {
    if (ev.kind != TimerKind::HelloBackoff) return;
    if (!lcn.commissioned) hello(lcn, p, ev.t, rng, out);
}

void lcn_handle(LcnState& lcn, const FrameRx& ev, const ProtocolParams& p, Actions& out) {
    const Frame& f = ev.frame;
    switch (f.kind) {
        case FrameKind::MnIdEcho:
            if (f.nibble == lcn.id) {
                lcn.awaiting_addr = true; // LISTEN2: next MN_ADDR_SET is ours
            } else {
                out.push_back(TraceAction{TraceKind::Drop, "drop echo other-id id=%d", f.nibble});
            }
            break;

        case FrameKind::MnAddrSet:
            if (!lcn.awaiting_addr) {
                out.push_back(TraceAction{TraceKind::Drop, "drop addr-set not-awaiting"});
            } else if (f.nibble == 0) {
                out.push_back(TraceAction{TraceKind::Drop, "drop addr-set bad-index"});
            } else {
                lcn.rx_addr = lcn_hw_address(f.nibble);
                lcn.commissioned = true;
                lcn.awaiting_addr = false;
                out.push_back(TraceAction{TraceKind::State, "commissioned addr-index=%d", f.nibble});
                out.push_back(SendAction{kBroadcastAddr, Frame{FrameKind::LcnAddrAck, f.nibble}, 0});
            }
            break;

        case FrameKind::LcnStepInc:
        case FrameKind::LcnStepDec: {
            const int delta = f.kind == FrameKind::LcnStepInc ? f.nibble : -f.nibble;
            const int next = std::clamp(lcn.level + delta, 0, p.dim_levels);
            if (next == lcn.level) {
                out.push_back(TraceAction{TraceKind::Drop, "step clamped level=%d", lcn.level});
            } else {
                lcn.level = next;
                out.push_back(DimAction{lcn.level});
            }
            break;
        }

        case FrameKind::LcnSetMax:
            // Repeated copies arrive on lossy links; only the first saves.
            if (!lcn.forced_max) {
                lcn.saved_level = lcn.level;
                lcn.forced_max = true;
            }
            if (lcn.level != p.dim_levels) {
                lcn.level = p.dim_levels;
                out.push_back(DimAction{lcn.level});
            } else {
                out.push_back(TraceAction{TraceKind::State, "set-max already-full"});
            }
            break;

        case FrameKind::LcnRestore:
            if (!lcn.forced_max) {
                out.push_back(TraceAction{TraceKind::State, "restore no-change"});
                break;
            }
            lcn.forced_max = false;
            if (lcn.level != lcn.saved_level) {
                lcn.level = lcn.saved_level;
                out.push_back(DimAction{lcn.level});
            } else {
                out.push_back(TraceAction{TraceKind::State, "restore no-change"});
            }
            break;

        case FrameKind::TopoPing:
            // Unicast pings are for lamps; broadcast pings target sensors.
            if (ev.dest == kBroadcastAddr) {
                out.push_back(TraceAction{TraceKind::Drop, "drop ping broadcast"});
            } else if (f.nibble != lcn.id) {
                out.push_back(TraceAction{TraceKind::Drop, "drop ping other-id id=%d", f.nibble});
            } else {
                out.push_back(SendAction{kBroadcastAddr, Frame{FrameKind::TopoPong, lcn.id}, 0});
            }
            break;

        default:
            out.push_back(TraceAction{TraceKind::Drop, "drop frame not-for-lcn"});
            break;
    }
}

} // namespace wsnlight
