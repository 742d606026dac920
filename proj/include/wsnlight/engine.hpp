#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsnlight/energy.hpp"
#include "wsnlight/protocol.hpp"
#include "wsnlight/radio.hpp"
#include "wsnlight/scenario.hpp"

namespace wsnlight {

// Deterministic discrete-event scheduler gluing scenario, nodes, channel,
// plant and ledger together. One run = one totally ordered event sequence;
// (scenario, seed) fixes the trace byte for byte.

enum class EvKind : uint8_t { Activate, Deactivate, TxEnd, Timer, Sense, EndOfRun };

struct Event {
    double t = 0;
    uint64_t seq = 0; // tiebreaker, assigned by the queue
    EvKind kind = EvKind::EndOfRun;
    NodeId node;
    TimerKind timer = TimerKind::HelloBackoff;
    RadioPacket pkt;
};

class EventQueue {
public:
    void push(Event e) {
        e.seq = next_seq_++;
        q_.push(e);
    }
    // Sorts after every other event with the same timestamp.
    void push_last(Event e) {
        e.seq = UINT64_MAX;
        q_.push(e);
    }
    bool empty() const { return q_.empty(); }
    Event pop() {
        Event e = q_.top();
        q_.pop();
        return e;
    }

private:
    struct Order {
        bool operator()(const Event& a, const Event& b) const {
            if (a.t != b.t) return a.t > b.t;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Order> q_;
    uint64_t next_seq_ = 0;
};

struct TraceRecord {
    double t = 0;
    NodeId node;
    TraceKind kind = TraceKind::State;
    std::string detail;
};

struct PhaseChange {
    Phase phase;
    double t;
    bool by_timeout;
};

struct DimChange {
    double t;
    uint8_t lcn_id;
    uint8_t lamp_id;
    int level;
};

struct SimResult {
    std::vector<TraceRecord> trace;
    EnergyReport report;
    double commissioning_done_at = -1; // P4 entry, -1 if never reached
    Phase final_phase = Phase::P1LcnReg;
    std::map<uint8_t, std::set<uint8_t>> mapping; // SN id -> mapped LCN ids
    std::map<uint8_t, int> lcn_levels;            // final dim levels
    std::vector<PhaseChange> phase_changes;
    std::vector<DimChange> dim_history;
    int windows_closed_settled = 0;
    int windows_closed_timeout = 0;
    uint64_t events_processed = 0;

    std::string trace_text() const; // tab-separated, one record per line
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(std::vector<Diagnostic> d)
        : std::runtime_error(format_diagnostics(d)), diagnostics(std::move(d)) {}
    std::vector<Diagnostic> diagnostics;
};

// Runs the scenario to its configured duration. Throws ValidationError
// before any event executes when the scenario has validation errors.
SimResult run(const Scenario& sc);

std::string node_name(NodeId n);
const char* trace_kind_name(TraceKind k);

} // namespace wsnlight
