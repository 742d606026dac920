#include <algorithm>
#include <cmath>

#include "wsnlight/protocol.hpp"

namespace wsnlight {

namespace {

void send(Actions& out, HwAddress dest, FrameKind kind, uint8_t nibble, double delay = 0) {
    out.push_back(SendAction{dest, Frame{kind, nibble}, delay});
}

void arm(Actions& out, TimerKind kind, double at) { out.push_back(TimerAction{kind, at}); }

void drop(Actions& out, const char* fmt, int a = 0, int b = 0) {
    out.push_back(TraceAction{TraceKind::Drop, fmt, a, b});
}

void state_trace(Actions& out, const char* fmt, int a = 0, int b = 0) {
    out.push_back(TraceAction{TraceKind::State, fmt, a, b});
}

int free_addr_index(const MnState& mn) {
    for (int idx = 1; idx <= 15; ++idx) {
        bool used = mn.pending && mn.pending->addr_index == idx;
        for (const auto& [id, e] : mn.lcn_table) used = used || e.addr_index == idx;
        if (!used) return idx;
    }
    return -1;
}

double next_cmd_slot(double now, const MnState& mn, const ProtocolParams& p) {
    const double offset =
        mn.phase == Phase::P3Mapping ? p.p3_cmd_offset_s : p.p4_cmd_offset_s;
    double at = std::ceil(now) + offset;
    if (at <= now) at += 1.0;
    return at;
}

void send_handshake(const MnState& mn, Actions& out) {
    send(out, kBroadcastAddr, FrameKind::MnIdEcho, mn.pending->lcn_id);
    send(out, kBroadcastAddr, FrameKind::MnAddrSet, mn.pending->addr_index);
}

void send_all_off(const MnState& mn, const ProtocolParams& p, Actions& out) {
    for (const auto& [id, e] : mn.lcn_table) {
        int remaining = p.dim_levels;
        while (remaining > 0) {
            const int n = std::min(remaining, 15);
            send(out, lcn_hw_address(e.addr_index), FrameKind::LcnStepDec,
                 static_cast<uint8_t>(n));
            remaining -= n;
        }
    }
}

bool counters_settled(const MappingWindow& w, const ProtocolParams& p) {
    for (const auto& [sn, count] : w.dec_counts)
        if (count > 0 && count < p.debounce_requests) return false;
    return true;
}

void enqueue_job(MnState& mn, uint8_t lcn_id) {
    if (mn.window && mn.window->lcn_id == lcn_id) return;
    if (std::find(mn.jobs.begin(), mn.jobs.end(), lcn_id) != mn.jobs.end()) return;
    mn.jobs.push_back(lcn_id);
}

void enter_p4(MnState& mn, const ProtocolParams& p, double now, Actions& out);

void open_next_window(MnState& mn, const ProtocolParams& p, double now, Actions& out) {
    if (mn.standby) return; // resumed on wake
    while (!mn.jobs.empty()) {
        const uint8_t lcn_id = mn.jobs.front();
        auto it = mn.lcn_table.find(lcn_id);
        if (it == mn.lcn_table.end()) { // evicted while queued
            mn.jobs.pop_front();
            continue;
        }
        mn.jobs.pop_front();
        const double opens_at = next_cmd_slot(now, mn, p);
        MappingWindow w;
        w.lcn_id = lcn_id;
        w.opened_at = opens_at;
        w.min_close_at = opens_at + (p.debounce_requests + 2) * p.sense_period_s;
        w.timeout_at = opens_at + p.p3_window_timeout_s;
        mn.window = w;
        // Unacknowledged command, so several copies go out; the LCN treats
        // repeats as no-ops.
        for (int k = 0; k < std::max(1, p.window_cmd_repeats); ++k)
            send(out, lcn_hw_address(it->second.addr_index), FrameKind::LcnSetMax, 0,
                 opens_at - now + k * p.sense_period_s);
        arm(out, TimerKind::WindowPoll, w.min_close_at);
        state_trace(out, "window-open lcn=%d", lcn_id);
        return;
    }
    if (mn.phase == Phase::P3Mapping) enter_p4(mn, p, now, out);
}

void close_window(MnState& mn, const ProtocolParams& p, double now, bool timed_out,
                  Actions& out) {
    // Window polls run on the command-slot grid, so the restore can go out
    // right away; the next window's set-max follows a full second later and
    // never sees two lamps forced up at once.
    auto it = mn.lcn_table.find(mn.window->lcn_id);
    if (it != mn.lcn_table.end())
        for (int k = 0; k < std::max(1, p.window_cmd_repeats); ++k)
            send(out, lcn_hw_address(it->second.addr_index), FrameKind::LcnRestore, 0,
                 k * p.sense_period_s);
    state_trace(out, "window-close lcn=%d timeout=%d", mn.window->lcn_id, timed_out ? 1 : 0);
    if (timed_out)
        ++mn.windows_closed_timeout;
    else
        ++mn.windows_closed_settled;
    mn.window.reset();
    open_next_window(mn, p, now, out);
}

// Standby flips 0.9 s past the hour so the park-all burst transmits in a
// sub-second zone no SN request or audit ping can occupy.
constexpr double kStandbySlack = 0.9;

void arm_standby(MnState& mn, const ProtocolParams& p, double now, Actions& out) {
    if (p.active_hours_per_day >= 24) return;
    const double end_h = std::fmod(p.active_from_h + p.active_hours_per_day, 24.0);
    if (in_active_window(now, p)) {
        arm(out, TimerKind::StandbyEnter, now + seconds_until_hour(now, end_h) + kStandbySlack);
    } else {
        mn.standby = true;
        state_trace(out, "standby=1");
        send_all_off(mn, p, out);
        arm(out, TimerKind::StandbyExit,
            now + seconds_until_hour(now, p.active_from_h) + kStandbySlack);
    }
}

void enter_p4(MnState& mn, const ProtocolParams& p, double now, Actions& out) {
    mn.phase = Phase::P4Normal;
    mn.phase_entered_at = now;
    mn.last_advance_timeout = false; // mapping either drained its jobs or never had any
    mn.commissioning_done_at = now;
    state_trace(out, "phase=4 timeout=%d", mn.last_advance_timeout ? 1 : 0);
    // Audit rounds start on whole seconds; the slot plan assumes it.
    arm(out, TimerKind::AuditTick, std::ceil(now + p.audit_period_s));
    arm_standby(mn, p, now, out);
}

void enter_p3(MnState& mn, const ProtocolParams& p, double now, Actions& out) {
    mn.phase = Phase::P3Mapping;
    mn.phase_entered_at = now;
    state_trace(out, "phase=3 timeout=%d", mn.last_advance_timeout ? 1 : 0);
    for (const auto& [id, e] : mn.lcn_table) enqueue_job(mn, id);
    open_next_window(mn, p, now, out); // enters P4 directly when nothing to map
}

void enter_p2(MnState& mn, const ProtocolParams& p, double now, Actions& out) {
    mn.phase = Phase::P2SnReg;
    mn.phase_entered_at = now;
    mn.pending.reset();
    state_trace(out, "phase=2 timeout=%d", mn.last_advance_timeout ? 1 : 0);
    if (p.expected_sns >= 0 && static_cast<int>(mn.sn_table.size()) >= p.expected_sns) {
        mn.last_advance_timeout = false;
        enter_p3(mn, p, now, out);
        return;
    }
    // Broadcast on the whole-second grid so the slotted SN_ACK train cannot
    // drift into the sensors' per-second request slots.
    const double bcast_at = std::ceil(now);
    send(out, kBroadcastAddr, FrameKind::MnBcast, mn.own_addr_index, bcast_at - now);
    arm(out, TimerKind::P2Rebroadcast, bcast_at + p.p2_rebroadcast_s);
    arm(out, TimerKind::P2Deadline, now + p.p2_timeout_s);
}

bool p1_full(const MnState& mn, const ProtocolParams& p) {
    if (p.expected_lcns < 0) return static_cast<int>(mn.lcn_table.size()) >= 15;
    return static_cast<int>(mn.lcn_table.size()) >= std::min(p.expected_lcns, 15);
}

bool p2_full(const MnState& mn, const ProtocolParams& p) {
    if (p.expected_sns < 0) return static_cast<int>(mn.sn_table.size()) >= 15;
    return static_cast<int>(mn.sn_table.size()) >= std::min(p.expected_sns, 15);
}

void handle_hello(MnState& mn, uint8_t id, double now, const ProtocolParams& p, Actions& out) {
    if (id == 0) {
        drop(out, "drop hello bad-id");
        return;
    }
    if (mn.phase == Phase::P2SnReg || mn.phase == Phase::P3Mapping) {
        drop(out, "drop hello busy-phase id=%d", id);
        return;
    }
    if (auto it = mn.lcn_table.find(id); it != mn.lcn_table.end()) {
        // Re-hello after assignment: replay the same address, table untouched.
        send(out, kBroadcastAddr, FrameKind::MnIdEcho, id);
        send(out, kBroadcastAddr, FrameKind::MnAddrSet, it->second.addr_index);
        state_trace(out, "handshake-replay lcn=%d addr=%d", id, it->second.addr_index);
        return;
    }
    if (mn.pending) {
        if (mn.pending->lcn_id == id) {
            send_handshake(mn, out); // retry for the same node
        } else {
            drop(out, "drop hello handshake-busy id=%d", id);
        }
        return;
    }
    const int idx = free_addr_index(mn);
    if (idx < 0 || mn.lcn_table.size() >= 15) {
        drop(out, "drop hello table-full id=%d", id);
        return;
    }
    mn.pending = PendingHandshake{id, static_cast<uint8_t>(idx), 0};
    send_handshake(mn, out);
    arm(out, TimerKind::HandshakeRetry, now + p.handshake_retry_s);
}

} // namespace

void mn_init(MnState& mn, const ProtocolParams& p, double now, Actions& out) {
    mn.phase = Phase::P1LcnReg;
    mn.phase_entered_at = now;
    state_trace(out, "phase=1");
    if (p1_full(mn, p)) { // degenerate rosters commission instantly
        mn.last_advance_timeout = false;
        enter_p2(mn, p, now, out);
        return;
    }
    arm(out, TimerKind::P1Deadline, now + p.p1_timeout_s);
}

void mn_handle(MnState& mn, const FrameRx& ev, const ProtocolParams& p, Actions& out) {
    const double now = ev.t;
    const Frame& f = ev.frame;
    switch (f.kind) {
        case FrameKind::LcnHello:
            handle_hello(mn, f.nibble, now, p, out);
            break;

        case FrameKind::LcnAddrAck: {
            if (!mn.pending || mn.pending->addr_index != f.nibble) {
                drop(out, "drop ack unexpected idx=%d", f.nibble);
                break;
            }
            const uint8_t id = mn.pending->lcn_id;
            mn.lcn_table[id] = LcnEntry{mn.pending->addr_index, now, 0};
            state_trace(out, "lcn-join id=%d addr=%d", id, mn.pending->addr_index);
            mn.pending.reset();
            if (mn.phase == Phase::P1LcnReg && p1_full(mn, p)) {
                mn.last_advance_timeout = false;
                enter_p2(mn, p, now, out);
            } else if (mn.phase == Phase::P4Normal) {
                enqueue_job(mn, id); // incremental mapping pass for the newcomer
                if (!mn.window) open_next_window(mn, p, now, out);
            }
            break;
        }

        case FrameKind::SnAck: {
            const uint8_t id = f.nibble;
            if (id == 0) {
                drop(out, "drop sn-ack bad-id");
                break;
            }
            if (mn.phase == Phase::P1LcnReg) {
                drop(out, "drop sn-ack wrong-phase id=%d", id);
                break;
            }
            if (mn.audit_open)
                for (auto it = mn.audit_slots.rbegin(); it != mn.audit_slots.rend(); ++it)
                    if (it->target == NodeId{Role::Sn, id} && it->ping_at <= now) {
                        it->answered = true;
                        break;
                    }
            auto it = mn.sn_table.find(id);
            if (it != mn.sn_table.end()) {
                it->second.last_seen = now;
                it->second.miss_count = 0;
                break; // refresh only; rx record suffices
            }
            mn.sn_table[id] = SnEntry{now, 0, {}};
            state_trace(out, "sn-join id=%d", id);
            if (mn.phase == Phase::P2SnReg && p2_full(mn, p)) {
                mn.last_advance_timeout = false;
                enter_p3(mn, p, now, out);
            } else if (mn.phase == Phase::P4Normal) {
                // A sensor joining mid-run has no mapping yet; rediscover it by
                // cycling every lamp once.
                for (const auto& [lcn_id, e] : mn.lcn_table) enqueue_job(mn, lcn_id);
                if (!mn.window) open_next_window(mn, p, now, out);
            }
            break;
        }

        case FrameKind::SnReqDec:
        case FrameKind::SnReqInc: {
            const uint8_t id = f.nibble;
            const bool dec = f.kind == FrameKind::SnReqDec;
            auto it = mn.sn_table.find(id);
            if (id == 0 || it == mn.sn_table.end()) {
                drop(out, "drop req unknown-sn id=%d", id);
                break;
            }
            it->second.last_seen = now;
            if (mn.audit_open)
                for (auto slot = mn.audit_slots.rbegin(); slot != mn.audit_slots.rend(); ++slot)
                    if (slot->target == NodeId{Role::Sn, id} && slot->ping_at <= now) {
                        slot->answered = true;
                        break;
                    }
            if (mn.window) {
                if (!dec) {
                    drop(out, "drop req-inc in-window id=%d", id);
                    break;
                }
                if (now < mn.window->opened_at) {
                    drop(out, "drop req window-pending id=%d", id);
                    break;
                }
                const int count = ++mn.window->dec_counts[id];
                if (count == p.debounce_requests) {
                    it->second.mapped_lcns.insert(mn.window->lcn_id);
                    state_trace(out, "map sn=%d lcn=%d", id, mn.window->lcn_id);
                } else if (count > p.debounce_requests) {
                    drop(out, "drop req counted id=%d", id);
                }
                break;
            }
            if (mn.phase != Phase::P4Normal) {
                drop(out, "drop req wrong-phase id=%d", id);
                break;
            }
            if (mn.standby) {
                drop(out, "drop req standby id=%d", id);
                break;
            }
            if (it->second.mapped_lcns.empty()) {
                drop(out, "drop req unmapped-sn id=%d", id);
                break;
            }
            for (uint8_t lcn_id : it->second.mapped_lcns) {
                auto lcn = mn.lcn_table.find(lcn_id);
                if (lcn == mn.lcn_table.end()) continue;
                send(out, lcn_hw_address(lcn->second.addr_index),
                     dec ? FrameKind::LcnStepDec : FrameKind::LcnStepInc,
                     static_cast<uint8_t>(p.dim_step));
            }
            break;
        }

        case FrameKind::TopoPong: {
            const uint8_t id = f.nibble;
            bool matched = false;
            if (mn.audit_open)
                for (auto it = mn.audit_slots.rbegin(); it != mn.audit_slots.rend(); ++it)
                    if (it->target.id == id && it->ping_at <= now && !it->answered) {
                        it->answered = true;
                        if (it->target.role == Role::Lcn) {
                            if (auto e = mn.lcn_table.find(id); e != mn.lcn_table.end())
                                e->second.last_seen = now;
                        } else if (auto e = mn.sn_table.find(id); e != mn.sn_table.end()) {
                            e->second.last_seen = now;
                        }
                        matched = true;
                        break;
                    }
            if (!matched) drop(out, "drop pong stray id=%d", id);
            break;
        }

        default:
            drop(out, "drop frame not-for-mn");
            break;
    }
}

void mn_handle(MnState& mn, const TimerFired& ev, const ProtocolParams& p, Actions& out) {
    const double now = ev.t;
    switch (ev.kind) {
        case TimerKind::P1Deadline:
            if (mn.phase == Phase::P1LcnReg) {
                mn.last_advance_timeout = true;
                enter_p2(mn, p, now, out);
            }
            break;

        case TimerKind::P2Deadline:
            if (mn.phase == Phase::P2SnReg) {
                mn.last_advance_timeout = true;
                enter_p3(mn, p, now, out);
            }
            break;

        case TimerKind::P2Rebroadcast:
            if (mn.phase == Phase::P2SnReg) {
                send(out, kBroadcastAddr, FrameKind::MnBcast, mn.own_addr_index);
                arm(out, TimerKind::P2Rebroadcast, now + p.p2_rebroadcast_s);
            }
            break;

        case TimerKind::HandshakeRetry:
            if (mn.pending) {
                if (++mn.pending->retries > p.handshake_max_retries) {
                    state_trace(out, "handshake-abandoned lcn=%d", mn.pending->lcn_id);
                    mn.pending.reset();
                    break;
                }
                send_handshake(mn, out);
                arm(out, TimerKind::HandshakeRetry, now + p.handshake_retry_s);
            }
            break;

        case TimerKind::WindowPoll:
            if (mn.window) {
                if (now >= mn.window->timeout_at) {
                    close_window(mn, p, now, true, out);
                } else if (now >= mn.window->min_close_at && counters_settled(*mn.window, p)) {
                    close_window(mn, p, now, false, out);
                } else {
                    arm(out, TimerKind::WindowPoll, now + p.sense_period_s);
                }
            }
            break;

        case TimerKind::AuditTick: {
            if (mn.phase != Phase::P4Normal) break;
            send(out, kBroadcastAddr, FrameKind::MnBcast, mn.own_addr_index);
            mn.audit_slots.clear();
            int slot = 0;
            for (const auto& [id, e] : mn.lcn_table) {
                const double at = now + p.ping_offset_s + slot * p.ping_slot_s;
                send(out, lcn_hw_address(e.addr_index), FrameKind::TopoPing, id, at - now);
                mn.audit_slots.push_back(AuditSlot{NodeId{Role::Lcn, id}, at, false});
                ++slot;
            }
            for (const auto& [id, e] : mn.sn_table) {
                const double at = now + p.ping_offset_s + slot * p.ping_slot_s;
                send(out, kBroadcastAddr, FrameKind::TopoPing, id, at - now);
                mn.audit_slots.push_back(AuditSlot{NodeId{Role::Sn, id}, at, false});
                ++slot;
            }
            mn.audit_open = true;
            arm(out, TimerKind::AuditClose, now + p.audit_close_s);
            arm(out, TimerKind::AuditTick, std::ceil(now + p.audit_period_s));
            break;
        }

        case TimerKind::AuditClose: {
            if (!mn.audit_open) break;
            // Second chance before anything counts as missed: re-ping the
            // silent entries in a fresh slot sweep.
            int slot = 0;
            bool any = false;
            for (AuditSlot& s : mn.audit_slots) {
                if (s.answered) continue;
                const double at = now + p.ping_offset_s + slot * p.ping_slot_s;
                if (s.target.role == Role::Lcn) {
                    auto it = mn.lcn_table.find(s.target.id);
                    if (it == mn.lcn_table.end()) continue;
                    send(out, lcn_hw_address(it->second.addr_index), FrameKind::TopoPing,
                         s.target.id, at - now);
                } else {
                    send(out, kBroadcastAddr, FrameKind::TopoPing, s.target.id, at - now);
                }
                s.ping_at = at;
                any = true;
                ++slot;
            }
            if (any) {
                arm(out, TimerKind::AuditFinal, now + p.audit_final_s);
                break;
            }
            [[fallthrough]];
        }

        case TimerKind::AuditFinal: {
            if (!mn.audit_open) break;
            std::vector<NodeId> evicted;
            for (const AuditSlot& slot : mn.audit_slots) {
                if (slot.target.role == Role::Lcn) {
                    auto it = mn.lcn_table.find(slot.target.id);
                    if (it == mn.lcn_table.end()) continue;
                    if (slot.answered) {
                        it->second.miss_count = 0;
                    } else if (++it->second.miss_count >= p.evict_misses) {
                        evicted.push_back(slot.target);
                    }
                } else {
                    auto it = mn.sn_table.find(slot.target.id);
                    if (it == mn.sn_table.end()) continue;
                    if (slot.answered) {
                        it->second.miss_count = 0;
                    } else if (++it->second.miss_count >= p.evict_misses) {
                        evicted.push_back(slot.target);
                    }
                }
            }
            for (const NodeId& n : evicted) {
                if (n.role == Role::Lcn) {
                    state_trace(out, "evict lcn=%d misses=%d", n.id, p.evict_misses);
                    mn.lcn_table.erase(n.id);
                    for (auto& [sn, e] : mn.sn_table) e.mapped_lcns.erase(n.id);
                    std::erase(mn.jobs, n.id);
                    if (mn.window && mn.window->lcn_id == n.id) {
                        mn.window.reset();
                        open_next_window(mn, p, now, out);
                    }
                } else {
                    state_trace(out, "evict sn=%d misses=%d", n.id, p.evict_misses);
                    mn.sn_table.erase(n.id);
                }
            }
            mn.audit_open = false;
            mn.audit_slots.clear();
            break;
        }

        case TimerKind::StandbyEnter: {
            if (mn.phase != Phase::P4Normal || p.active_hours_per_day >= 24) break;
            mn.standby = true;
            state_trace(out, "standby=1");
            if (mn.window) { // suspend mapping until the building reopens
                auto it = mn.lcn_table.find(mn.window->lcn_id);
                if (it != mn.lcn_table.end())
                    send(out, lcn_hw_address(it->second.addr_index), FrameKind::LcnRestore, 0);
                enqueue_job(mn, mn.window->lcn_id);
                mn.window.reset();
            }
            send_all_off(mn, p, out);
            arm(out, TimerKind::StandbyExit,
                now + seconds_until_hour(now, p.active_from_h) + kStandbySlack);
            break;
        }

        case TimerKind::StandbyExit: {
            if (mn.phase != Phase::P4Normal || p.active_hours_per_day >= 24) break;
            mn.standby = false;
            state_trace(out, "standby=0");
            const double end_h = std::fmod(p.active_from_h + p.active_hours_per_day, 24.0);
            arm(out, TimerKind::StandbyEnter,
                now + seconds_until_hour(now, end_h) + kStandbySlack);
            if (!mn.window) open_next_window(mn, p, now, out);
            break;
        }

        default:
            break;
    }
}

bool in_active_window(double now_s, const ProtocolParams& p) {
    if (p.active_hours_per_day >= 24) return true;
    double h = std::fmod(now_s / 3600.0, 24.0);
    if (h < 0) h += 24.0;
    const double from = p.active_from_h;
    const double end = from + p.active_hours_per_day;
    if (end <= 24.0) return h >= from && h < end;
    return h >= from || h < end - 24.0;
}

double seconds_until_hour(double now_s, double hour_of_day) {
    double h = std::fmod(now_s / 3600.0, 24.0);
    if (h < 0) h += 24.0;
    double delta = hour_of_day - h;
    if (delta <= 1e-9) delta += 24.0;
    return delta * 3600.0;
}

} // namespace wsnlight
