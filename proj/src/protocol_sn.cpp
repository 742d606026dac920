#include "wsnlight/protocol.hpp"

namespace wsnlight {

void sn_handle(SnState& sn, const FrameRx& ev, const ProtocolParams& p, Actions& out) {
    const Frame& f = ev.frame;
    switch (f.kind) {
        case FrameKind::MnBcast: {
            if (f.nibble == 0) {
                out.push_back(TraceAction{TraceKind::Drop, "drop bcast bad-index"});
                break;
            }
            sn.tx_dest = mn_hw_address(f.nibble);
            const bool newly = !sn.registered;
            sn.registered = true;
            if (newly)
                out.push_back(TraceAction{TraceKind::State, "registered mn-index=%d", f.nibble});
            // Acknowledge in the sender's id slot so simultaneous replies
            // from several SNs cannot collide.
            out.push_back(
                SendAction{sn.tx_dest, Frame{FrameKind::SnAck, sn.id}, sn.id * p.sn_slot_s});
            break;
        }

        case FrameKind::TopoPing:
            if (f.nibble != sn.id) {
                out.push_back(TraceAction{TraceKind::Drop, "drop ping other-id id=%d", f.nibble});
            } else if (!sn.registered) {
                out.push_back(TraceAction{TraceKind::Drop, "drop ping unregistered"});
            } else {
                out.push_back(SendAction{sn.tx_dest, Frame{FrameKind::TopoPong, sn.id}, 0});
            }
            break;

        default:
            out.push_back(TraceAction{TraceKind::Drop, "drop frame not-for-sn"});
            break;
    }
}

void sn_handle(SnState& sn, const SenseTick& ev, const ProtocolParams& p, Actions& out) {
    if (!sn.registered) return;
    if (ev.measured_lux < sn.target_lux - sn.deadband_lux) {
        sn.last_request = SnState::Request::Inc;
        sn.last_request_at = ev.t;
        out.push_back(
            SendAction{sn.tx_dest, Frame{FrameKind::SnReqInc, sn.id}, sn.id * p.sn_slot_s});
    } else if (ev.measured_lux > sn.target_lux + sn.deadband_lux) {
        sn.last_request = SnState::Request::Dec;
        sn.last_request_at = ev.t;
        out.push_back(
            SendAction{sn.tx_dest, Frame{FrameKind::SnReqDec, sn.id}, sn.id * p.sn_slot_s});
    }
    // inside the deadband: stay silent
}

} // namespace wsnlight
