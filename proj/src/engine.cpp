#include "wsnlight/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace wsnlight {

std::string node_name(NodeId n) {
    char buf[16];
    switch (n.role) {
        case Role::Mn:
            return "MN";
        case Role::Sn:
            std::snprintf(buf, sizeof buf, "SN%u", unsigned(n.id));
            return buf;
        case Role::Lcn:
            std::snprintf(buf, sizeof buf, "LCN%u", unsigned(n.id));
            return buf;
    }
    return "?";
}

const char* trace_kind_name(TraceKind k) {
    switch (k) {
        case TraceKind::Tx: return "tx";
        case TraceKind::Rx: return "rx";
        case TraceKind::Drop: return "drop";
        case TraceKind::State: return "state";
        case TraceKind::Dim: return "dim";
        case TraceKind::Energy: return "energy";
    }
    return "?";
}

std::string SimResult::trace_text() const {
    std::string out;
    out.reserve(trace.size() * 48);
    char buf[64];
    for (const TraceRecord& r : trace) {
        std::snprintf(buf, sizeof buf, "%.6f\t", r.t);
        out += buf;
        out += node_name(r.node);
        out += '\t';
        out += trace_kind_name(r.kind);
        out += '\t';
        out += r.detail;
        out += '\n';
    }
    return out;
}

namespace {

struct NodeRuntime {
    bool alive = false;
    double tx_free_at = 0;
    std::optional<Vec2> pos;
    ReceiverConfig rx;
};

class Engine {
public:
    explicit Engine(const Scenario& sc)
        : sc_(sc), params_(sc.protocol), rng_(sc.run.seed), channel_(sc.channel),
          levels_(sc.room.lamps.size(), 0.0) {
        if (params_.expected_lcns == -2) params_.expected_lcns = static_cast<int>(sc.lcns.size());
        if (params_.expected_sns == -2) params_.expected_sns = static_cast<int>(sc.sns.size());
    }

    SimResult run();

private:
    void trace(double t, NodeId node, TraceKind kind, const std::string& detail) {
        if (sc_.run.trace_mask & (1u << static_cast<int>(kind)))
            result_.trace.push_back(TraceRecord{t, node, kind, detail});
    }
    bool traced(TraceKind kind) const { return sc_.run.trace_mask & (1u << static_cast<int>(kind)); }

    std::string frame_desc(const Frame& f, HwAddress dest) const {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%s n=%u dest=0x%02X", kind_name(f.kind),
                      unsigned(f.nibble), unsigned(dest.value));
        return buf;
    }

    NodeRuntime& runtime(NodeId n) { return runtimes_.at(n); }

    void rebuild_receivers() {
        receivers_.clear();
        for (auto& [id, rt] : runtimes_)
            if (rt.alive) receivers_.push_back(ChannelReceiver{id, rt.pos, rt.rx.rx_addr});
        receivers_dirty_ = false;
    }

    void realize(NodeId src, double now, Actions& actions);
    void dispatch_rx(NodeId node, const FrameRx& ev);
    void dispatch_mn_timer(const TimerFired& ev);
    void note_mn_phase(double t);
    void handle_event(const Event& ev);
    void finalize(double t);

    const Scenario& sc_;
    ProtocolParams params_; // expected roster counts resolved
    Rng rng_;
    Channel channel_;
    EventQueue q_;
    SimResult result_;

    MnState mn_;
    std::map<uint8_t, SnState> sns_;
    std::map<uint8_t, LcnState> lcns_;
    std::map<NodeId, NodeRuntime> runtimes_;
    std::vector<ChannelReceiver> receivers_;
    bool receivers_dirty_ = true;

    std::vector<double> levels_; // per lamp index, dim fraction
    std::vector<PowerSample> samples_;
    std::set<uint8_t> sense_armed_;
    Phase last_phase_ = Phase::P1LcnReg;
    Actions scratch_;
    bool done_ = false;
};

void Engine::note_mn_phase(double t) {
    if (mn_.phase != last_phase_) {
        last_phase_ = mn_.phase;
        result_.phase_changes.push_back(PhaseChange{mn_.phase, t, mn_.last_advance_timeout});
    }
}

void Engine::realize(NodeId src, double now, Actions& actions) {
    NodeRuntime& rt = runtime(src);
    for (Action& a : actions) {
        if (auto* send = std::get_if<SendAction>(&a)) {
            const double start = std::max(now + send->delay_s, rt.tx_free_at);
            RadioPacket pkt = channel_.begin(src, rt.pos, send->dest, send->frame, start);
            rt.tx_free_at = pkt.t_end;
            Event ev;
            ev.t = pkt.t_end;
            ev.kind = EvKind::TxEnd;
            ev.node = src;
            ev.pkt = pkt;
            q_.push(ev);
        } else if (auto* dim = std::get_if<DimAction>(&a)) {
            // Only LCNs emit dim actions.
            const LcnSpec* spec = nullptr;
            for (const LcnSpec& l : sc_.lcns)
                if (l.id == src.id) spec = &l;
            if (!spec) continue;
            const int lamp_idx = sc_.room.lamp_index(spec->lamp_id);
            const double frac =
                static_cast<double>(dim->level) / static_cast<double>(params_.dim_levels);
            levels_[lamp_idx] = frac;
            samples_.push_back(PowerSample{
                now, spec->lamp_id, lamp_power_w(frac, sc_.room.lamps[lamp_idx].p_max_w)});
            result_.dim_history.push_back(DimChange{now, src.id, spec->lamp_id, dim->level});
            if (traced(TraceKind::Dim)) {
                char buf[48];
                std::snprintf(buf, sizeof buf, "level=%d/%d lamp=%u", dim->level,
                              params_.dim_levels, unsigned(spec->lamp_id));
                trace(now, src, TraceKind::Dim, buf);
            }
        } else if (auto* timer = std::get_if<TimerAction>(&a)) {
            Event ev;
            ev.t = timer->at;
            ev.kind = EvKind::Timer;
            ev.node = src;
            ev.timer = timer->kind;
            q_.push(ev);
        } else if (auto* tr = std::get_if<TraceAction>(&a)) {
            if (traced(tr->kind)) {
                char buf[96];
                std::snprintf(buf, sizeof buf, tr->fmt, tr->a, tr->b);
                trace(now, src, tr->kind, buf);
            }
        }
    }
}

void Engine::dispatch_rx(NodeId node, const FrameRx& ev) {
    scratch_.clear();
    switch (node.role) {
        case Role::Mn:
            mn_handle(mn_, ev, params_, scratch_);
            break;
        case Role::Sn:
            sn_handle(sns_.at(node.id), ev, params_, scratch_);
            break;
        case Role::Lcn: {
            LcnState& lcn = lcns_.at(node.id);
            const HwAddress before = lcn.rx_addr;
            lcn_handle(lcn, ev, params_, scratch_);
            if (lcn.rx_addr != before) {
                runtime(node).rx.rx_addr = lcn.rx_addr;
                receivers_dirty_ = true;
            }
            break;
        }
    }
    realize(node, ev.t, scratch_);
    if (node.role == Role::Mn) note_mn_phase(ev.t);
    if (node.role == Role::Sn) {
        const SnState& sn = sns_.at(node.id);
        if (sn.registered && !sense_armed_.count(node.id)) {
            sense_armed_.insert(node.id);
            Event se;
            se.t = std::floor(ev.t) + 1.0; // align sensing to second boundaries
            se.kind = EvKind::Sense;
            se.node = node;
            q_.push(se);
        }
    }
}

void Engine::dispatch_mn_timer(const TimerFired& ev) {
    scratch_.clear();
    mn_handle(mn_, ev, params_, scratch_);
    realize(NodeId{Role::Mn, 0}, ev.t, scratch_);
    note_mn_phase(ev.t);
}

void Engine::handle_event(const Event& ev) {
    switch (ev.kind) {
        case EvKind::Activate: {
            NodeRuntime& rt = runtime(ev.node);
            rt.alive = true;
            receivers_dirty_ = true;
            scratch_.clear();
            if (ev.node.role == Role::Mn) {
                result_.phase_changes.push_back(PhaseChange{Phase::P1LcnReg, ev.t, false});
                mn_init(mn_, params_, ev.t, scratch_);
                realize(ev.node, ev.t, scratch_);
                note_mn_phase(ev.t);
            } else if (ev.node.role == Role::Lcn) {
                lcn_init(lcns_.at(ev.node.id), params_, ev.t, rng_, scratch_);
                realize(ev.node, ev.t, scratch_);
            } else {
                trace(ev.t, ev.node, TraceKind::State, "online");
            }
            break;
        }

        case EvKind::Deactivate:
            runtime(ev.node).alive = false;
            receivers_dirty_ = true;
            trace(ev.t, ev.node, TraceKind::State, "offline");
            break;

        case EvKind::TxEnd: {
            if (receivers_dirty_) rebuild_receivers();
            const std::vector<NodeId> delivered = channel_.resolve(ev.pkt, receivers_, rng_);
            if (traced(TraceKind::Tx))
                trace(ev.t, ev.pkt.src, TraceKind::Tx, frame_desc(ev.pkt.frame, ev.pkt.dest));
            for (NodeId node : delivered) {
                NodeRuntime& rt = runtime(node);
                // Hardware receive queue; drained immediately by the node.
                if (auto lost = rt.rx.queue.push(ev.pkt.frame))
                    trace(ev.t, node, TraceKind::Drop, "rx-queue overflow, oldest dropped");
                const Frame frame = *rt.rx.queue.pop();
                if (traced(TraceKind::Rx))
                    trace(ev.t, node, TraceKind::Rx,
                          frame_desc(frame, ev.pkt.dest) + " from=" + node_name(ev.pkt.src));
                dispatch_rx(node, FrameRx{frame, ev.pkt.dest, ev.t});
            }
            break;
        }

        case EvKind::Timer: {
            if (!runtime(ev.node).alive) break;
            if (ev.node.role == Role::Mn) {
                dispatch_mn_timer(TimerFired{ev.timer, ev.t});
            } else if (ev.node.role == Role::Lcn) {
                scratch_.clear();
                lcn_handle(lcns_.at(ev.node.id), TimerFired{ev.timer, ev.t}, params_, ev.t,
                           rng_, scratch_);
                realize(ev.node, ev.t, scratch_);
            }
            break;
        }

        case EvKind::Sense: {
            if (!runtime(ev.node).alive) break;
            SnState& sn = sns_.at(ev.node.id);
            const double ambient = sc_.daylight.ambient_at(ev.t);
            const double true_lux = illuminance_at(sc_.room, ev.node.id, levels_, ambient);
            const double measured = sensed_lux(true_lux, sc_.ldr);
            scratch_.clear();
            sn_handle(sn, SenseTick{measured, ev.t}, params_, scratch_);
            realize(ev.node, ev.t, scratch_);
            Event next;
            next.t = ev.t + sn.sense_period_s;
            next.kind = EvKind::Sense;
            next.node = ev.node;
            q_.push(next);
            break;
        }

        case EvKind::EndOfRun:
            finalize(ev.t);
            done_ = true;
            break;
    }
}

void Engine::finalize(double t) {
    result_.report =
        build_report(samples_, sc_.run.duration_s, sc_.room, params_.active_hours_per_day);
    if (traced(TraceKind::Energy)) {
        char buf[64];
        for (const auto& [lamp, wh] : result_.report.per_lamp_wh) {
            std::snprintf(buf, sizeof buf, "lamp=%u wh=%.3f", unsigned(lamp), wh);
            trace(t, NodeId{Role::Mn, 0}, TraceKind::Energy, buf);
        }
        std::snprintf(buf, sizeof buf, "total_wh_month=%.3f savings_wh_month=%.3f",
                      result_.report.total_wh_month, result_.report.savings_wh_month);
        trace(t, NodeId{Role::Mn, 0}, TraceKind::Energy, buf);
    }
    result_.commissioning_done_at = mn_.commissioning_done_at;
    result_.final_phase = mn_.phase;
    for (const auto& [id, e] : mn_.sn_table) result_.mapping[id] = e.mapped_lcns;
    for (const auto& [id, lcn] : lcns_) result_.lcn_levels[id] = lcn.level;
    result_.windows_closed_settled = mn_.windows_closed_settled;
    result_.windows_closed_timeout = mn_.windows_closed_timeout;
}

SimResult Engine::run() {
    auto diags = validate(sc_);
    if (has_errors(diags)) throw ValidationError(std::move(diags));

    // Node states and runtimes.
    const NodeId mn_id{Role::Mn, 0};
    runtimes_[mn_id] = NodeRuntime{false, 0, sc_.mn.pos, ReceiverConfig{mn_hw_address(1)}};
    for (const SnSpec& spec : sc_.sns) {
        SnState sn;
        sn.id = spec.id;
        sn.target_lux = spec.target_lux;
        sn.deadband_lux = spec.deadband_lux;
        sn.sense_period_s = params_.sense_period_s;
        sns_[spec.id] = sn;
        // Sensor radios stay on the broadcast address for their whole life.
        runtimes_[NodeId{Role::Sn, spec.id}] =
            NodeRuntime{false, 0, spec.pos, ReceiverConfig{kBroadcastAddr}};
    }
    for (const LcnSpec& spec : sc_.lcns) {
        LcnState lcn;
        lcn.id = spec.id;
        lcns_[spec.id] = lcn;
        runtimes_[NodeId{Role::Lcn, spec.id}] =
            NodeRuntime{false, 0, spec.pos, ReceiverConfig{kBroadcastAddr}};
    }
    for (auto& [id, rt] : runtimes_) {
        rt.rx = ReceiverConfig{rt.rx.rx_addr, RxQueue{sc_.channel.rx_queue_capacity}};
    }

    // Lamp power opens at zero.
    for (const LampDesc& lamp : sc_.room.lamps) samples_.push_back(PowerSample{0, lamp.id, 0});

    // Lifecycle events; the MN is always on from t = 0.
    Event ev;
    ev.kind = EvKind::Activate;
    ev.node = mn_id;
    ev.t = 0;
    q_.push(ev);
    for (const SnSpec& spec : sc_.sns) {
        ev.node = NodeId{Role::Sn, spec.id};
        ev.t = spec.on_at;
        ev.kind = EvKind::Activate;
        q_.push(ev);
        if (spec.off_at) {
            ev.t = *spec.off_at;
            ev.kind = EvKind::Deactivate;
            q_.push(ev);
        }
    }
    for (const LcnSpec& spec : sc_.lcns) {
        ev.node = NodeId{Role::Lcn, spec.id};
        ev.t = spec.on_at;
        ev.kind = EvKind::Activate;
        q_.push(ev);
        if (spec.off_at) {
            ev.t = *spec.off_at;
            ev.kind = EvKind::Deactivate;
            q_.push(ev);
        }
    }

    Event end;
    end.t = sc_.run.duration_s;
    end.kind = EvKind::EndOfRun;
    q_.push_last(end);

    while (!q_.empty() && !done_) {
        const Event e = q_.pop();
        if (e.t > sc_.run.duration_s) break;
        ++result_.events_processed;
        handle_event(e);
    }
    if (!done_) finalize(sc_.run.duration_s);
    return std::move(result_);
}

} // namespace

SimResult run(const Scenario& sc) {
    Engine engine(sc);
    return engine.run();
}

} // namespace wsnlight
