#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "wsnlight/frame.hpp"
#include "wsnlight/radio.hpp"
#include "wsnlight/rng.hpp"

namespace wsnlight {

/*
 * Event-driven state machines for the three node roles.
 *
 * The master walks four phases:
 *   P1  LCN address assignment (hello / id-echo / addr-set / ack handshake,
 *       serialized, one LCN at a time)
 *   P2  SN registration (periodic MN_BCAST, SNs answer SN_ACK)
 *   P3  mapping: each lamp is driven to max in turn; a sensor that sends the
 *       configured number of decrease requests during that window is mapped
 *       to the lamp
 *   P4  normal operation: requests fan out as dim steps to mapped lamps,
 *       plus a periodic topology audit and runtime joins
 *
 * Handlers are pure: they mutate only the passed state and append to the
 * action list. All timing emerges from ArmTimer/Send-delay actions, all
 * randomness from the injected generator, so identical inputs replay
 * identically.
 *
 * The radio has no arbitration, so replies that several nodes would send at
 * the same instant are offset into per-id time slots (SN replies) or fixed
 * sub-second windows (audit pings, mapping commands). With a lossless
 * channel the schedule is collision-free for full 15+15 rosters.
 */

enum class Phase : int { P1LcnReg = 1, P2SnReg = 2, P3Mapping = 3, P4Normal = 4 };

enum class TraceKind : uint8_t { Tx = 0, Rx, Drop, State, Dim, Energy };

enum class TimerKind : uint8_t {
    P1Deadline,
    P2Deadline,
    P2Rebroadcast,
    HandshakeRetry,
    WindowPoll,
    AuditTick,
    AuditClose,
    AuditFinal,
    StandbyEnter,
    StandbyExit,
    HelloBackoff,
};

struct ProtocolParams {
    double p1_timeout_s = 10;
    double p2_timeout_s = 10;
    double p3_window_timeout_s = 20; // per-lamp mapping window cap
    double p2_rebroadcast_s = 2;
    double handshake_retry_s = 1;
    int handshake_max_retries = 8;
    double hello_backoff_min_s = 0.5;
    double hello_backoff_max_s = 2.0;
    double audit_period_s = 60;
    double audit_close_s = 5;  // unanswered entries are re-pinged here
    double audit_final_s = 2;  // grace after the re-ping before misses count
    double sense_period_s = 1;
    int window_cmd_repeats = 3; // set-max/restore copies per mapping window
    int dim_levels = 10; // K: lamp runs 0..K
    int dim_step = 1;    // levels per SN request
    int debounce_requests = 5;
    int evict_misses = 3;
    // Slot layout within a second: SN replies/requests sit at id*sn_slot_s,
    // audit pings from ping_offset_s onward, mapping commands at the cmd
    // offsets. Disjoint by construction for ids 1..15.
    double sn_slot_s = 0.02;
    double ping_slot_s = 0.015;
    double ping_offset_s = 0.35;
    double p3_cmd_offset_s = 0.5;
    double p4_cmd_offset_s = 0.85;
    // Commissioning phases end early once this many nodes registered
    // ("table is full"); -1 waits for the phase timer, -2 takes the
    // scenario roster size.
    int expected_lcns = -2;
    int expected_sns = -2;
    // Daily operating window; outside it the MN parks every lamp at zero and
    // ignores requests. 24 disables standby.
    double active_hours_per_day = 24;
    double active_from_h = 0;
};

// Index <-> hardware address mapping is role-scoped: the frame kind tells the
// receiver which base to apply, so 15 LCNs and the MN fit 4-bit indices.
inline HwAddress mn_hw_address(uint8_t index) { return HwAddress{static_cast<uint8_t>(0x10 + index)}; }
inline HwAddress lcn_hw_address(uint8_t index) { return HwAddress{static_cast<uint8_t>(0x20 + index)}; }

// ---- actions -------------------------------------------------------------

struct SendAction {
    HwAddress dest;
    Frame frame;
    double delay_s = 0; // transmit this long after the event (plus tx queueing)
};

struct DimAction {
    int level;
};

struct TimerAction {
    TimerKind kind;
    double at;
};

// fmt is a printf literal consuming up to two ints; kept unformatted until
// the engine knows the record is wanted.
struct TraceAction {
    TraceKind kind;
    const char* fmt;
    int a = 0;
    int b = 0;
};

using Action = std::variant<SendAction, DimAction, TimerAction, TraceAction>;
using Actions = std::vector<Action>;

// ---- events ----------------------------------------------------------------

struct FrameRx {
    Frame frame;
    HwAddress dest; // address the receiver matched (own or broadcast)
    double t;
};

struct TimerFired {
    TimerKind kind;
    double t;
};

struct SenseTick {
    double measured_lux;
    double t;
};

// ---- master node -----------------------------------------------------------

struct LcnEntry {
    uint8_t addr_index = 0;
    double last_seen = 0;
    int miss_count = 0;

    bool operator==(const LcnEntry&) const = default;
};

struct SnEntry {
    double last_seen = 0;
    int miss_count = 0;
    std::set<uint8_t> mapped_lcns;

    bool operator==(const SnEntry&) const = default;
};

struct PendingHandshake {
    uint8_t lcn_id = 0;
    uint8_t addr_index = 0;
    int retries = 0;

    bool operator==(const PendingHandshake&) const = default;
};

struct MappingWindow {
    uint8_t lcn_id = 0;
    double opened_at = 0;
    double min_close_at = 0;
    double timeout_at = 0;
    std::map<uint8_t, int> dec_counts; // per SN id, this window

    bool operator==(const MappingWindow&) const = default;
};

struct AuditSlot {
    NodeId target;
    double ping_at = 0;
    bool answered = false;

    bool operator==(const AuditSlot&) const = default;
};

struct MnState {
    Phase phase = Phase::P1LcnReg;
    double phase_entered_at = 0;
    bool last_advance_timeout = false;
    std::map<uint8_t, LcnEntry> lcn_table;
    std::map<uint8_t, SnEntry> sn_table;
    std::optional<PendingHandshake> pending;
    std::deque<uint8_t> jobs; // LCN ids awaiting a mapping window
    std::optional<MappingWindow> window;
    std::vector<AuditSlot> audit_slots;
    bool audit_open = false;
    bool standby = false;
    uint8_t own_addr_index = 1;
    double commissioning_done_at = -1;
    int windows_closed_settled = 0;
    int windows_closed_timeout = 0;

    bool operator==(const MnState&) const = default;
};

void mn_init(MnState& mn, const ProtocolParams& p, double now, Actions& out);
void mn_handle(MnState& mn, const FrameRx& ev, const ProtocolParams& p, Actions& out);
void mn_handle(MnState& mn, const TimerFired& ev, const ProtocolParams& p, Actions& out);

// ---- sensor node -----------------------------------------------------------

struct SnState {
    uint8_t id = 0;
    HwAddress tx_dest = kUnassignedAddr;
    bool registered = false;
    double target_lux = 500;
    double deadband_lux = 20;
    double sense_period_s = 1;
    enum class Request : uint8_t { None, Inc, Dec } last_request = Request::None;
    double last_request_at = -1;

    bool operator==(const SnState&) const = default;
};

void sn_handle(SnState& sn, const FrameRx& ev, const ProtocolParams& p, Actions& out);
void sn_handle(SnState& sn, const SenseTick& ev, const ProtocolParams& p, Actions& out);

// ---- light control node ------------------------------------------------------

struct LcnState {
    uint8_t id = 0;
    HwAddress rx_addr = kBroadcastAddr; // broadcast-only until commissioned
    bool commissioned = false;
    bool awaiting_addr = false;
    int level = 0;
    int saved_level = 0;
    bool forced_max = false; // between set-max and restore; makes both idempotent

    bool operator==(const LcnState&) const = default;
};

void lcn_init(LcnState& lcn, const ProtocolParams& p, double now, Rng& rng, Actions& out);
void lcn_handle(LcnState& lcn, const FrameRx& ev, const ProtocolParams& p, Actions& out);
void lcn_handle(LcnState& lcn, const TimerFired& ev, const ProtocolParams& p, double now_unused,
                Rng& rng, Actions& out);

// ---- shared helpers ----------------------------------------------------------

bool in_active_window(double now_s, const ProtocolParams& p);
double seconds_until_hour(double now_s, double hour_of_day);

} // namespace wsnlight
