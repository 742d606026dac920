#include "wsnlight/scenario.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wsnlight {

using nlohmann::json;

namespace {

const char* const kTraceNames[6] = {"tx", "rx", "drop", "state", "dim", "energy"};

std::optional<Vec2> parse_pos(const json& j) {
    if (!j.contains("pos")) return std::nullopt;
    const auto& p = j.at("pos");
    return Vec2{p.at(0).get<double>(), p.at(1).get<double>()};
}

void diag(std::vector<Diagnostic>& out, Diagnostic::Severity sev, std::string path,
          std::string msg) {
    out.push_back(Diagnostic{sev, std::move(path), std::move(msg)});
}

} // namespace

unsigned trace_mask_from_names(const std::vector<std::string>& names) {
    unsigned mask = 0;
    for (const std::string& n : names) {
        if (n == "all") return kTraceAll;
        if (n == "none") return 0;
        for (int i = 0; i < 6; ++i)
            if (n == kTraceNames[i]) mask |= 1u << i;
    }
    return mask;
}

std::vector<std::string> trace_mask_names(unsigned mask) {
    std::vector<std::string> names;
    for (int i = 0; i < 6; ++i)
        if (mask & (1u << i)) names.push_back(kTraceNames[i]);
    return names;
}

std::optional<double> target_lux_preset(const std::string& name) {
    if (name == "filing_office") return 300.0;
    if (name == "general_office") return 500.0;
    if (name == "fine_painting") return 750.0;
    if (name == "precision_assembly") return 1000.0;
    return std::nullopt;
}

Scenario scenario_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scenario parse: ") + e.what());
    }
    try {
        Scenario sc;
        sc.name = j.value("name", std::string("scenario"));

        if (j.contains("room")) {
            const auto& room = j.at("room");
            for (const auto& s : room.value("sensors", json::array()))
                sc.room.sensors.push_back(
                    SensorDesc{s.at("id").get<uint8_t>(), s.value("daylight_gain", 0.0)});
            for (const auto& l : room.value("lamps", json::array()))
                sc.room.lamps.push_back(
                    LampDesc{l.at("id").get<uint8_t>(), l.value("p_max_w", 40.0)});
            for (const auto& row : room.value("coupling", json::array()))
                sc.room.coupling.push_back(row.get<std::vector<double>>());
        }

        if (j.contains("ldr")) {
            const auto& ldr = j.at("ldr");
            sc.ldr.r1_kohm = ldr.value("r1_kohm", 10.0);
            sc.ldr.adc_bits = ldr.value("adc_bits", 10);
        }

        if (j.contains("daylight")) {
            sc.daylight.segments.clear();
            for (const auto& seg : j.at("daylight").value("segments", json::array()))
                sc.daylight.segments.push_back(DaylightSegment{seg.at("from_h").get<double>(),
                                                               seg.at("to_h").get<double>(),
                                                               seg.at("lux").get<double>()});
        }

        if (j.contains("channel")) {
            const auto& ch = j.at("channel");
            sc.channel.data_rate_bps = ch.value("data_rate_bps", 4000.0);
            sc.channel.preamble_bits = ch.value("preamble_bits", 8);
            sc.channel.range_m = ch.value("range_m", 80.0);
            sc.channel.p_loss = ch.value("p_loss", 0.0);
            sc.channel.rx_queue_capacity = ch.value("rx_queue_capacity", 8);
        }

        if (j.contains("nodes")) {
            const auto& nodes = j.at("nodes");
            if (nodes.contains("mn")) sc.mn.pos = parse_pos(nodes.at("mn"));
            for (const auto& s : nodes.value("sns", json::array())) {
                SnSpec sn;
                sn.id = s.at("id").get<uint8_t>();
                if (s.contains("target_preset")) {
                    const auto preset = target_lux_preset(s.at("target_preset").get<std::string>());
                    if (!preset)
                        throw std::runtime_error("scenario parse: unknown target_preset \"" +
                                                 s.at("target_preset").get<std::string>() + "\"");
                    sn.target_lux = *preset;
                }
                sn.target_lux = s.value("target_lux", sn.target_lux);
                sn.deadband_lux = s.value("deadband_lux", 20.0);
                sn.pos = parse_pos(s);
                sn.on_at = s.value("on_at", 0.0);
                if (s.contains("off_at") && !s.at("off_at").is_null())
                    sn.off_at = s.at("off_at").get<double>();
                sc.sns.push_back(sn);
            }
            for (const auto& l : nodes.value("lcns", json::array())) {
                LcnSpec lcn;
                lcn.id = l.at("id").get<uint8_t>();
                lcn.lamp_id = l.value("lamp", lcn.id);
                lcn.pos = parse_pos(l);
                lcn.on_at = l.value("on_at", 0.0);
                if (l.contains("off_at") && !l.at("off_at").is_null())
                    lcn.off_at = l.at("off_at").get<double>();
                sc.lcns.push_back(lcn);
            }
        }

        if (j.contains("protocol")) {
            const auto& pr = j.at("protocol");
            ProtocolParams& p = sc.protocol;
            p.p1_timeout_s = pr.value("p1_timeout_s", p.p1_timeout_s);
            p.p2_timeout_s = pr.value("p2_timeout_s", p.p2_timeout_s);
            p.p3_window_timeout_s = pr.value("p3_window_s", p.p3_window_timeout_s);
            p.p2_rebroadcast_s = pr.value("p2_rebroadcast_s", p.p2_rebroadcast_s);
            p.audit_period_s = pr.value("audit_period_s", p.audit_period_s);
            p.sense_period_s = pr.value("sense_period_s", p.sense_period_s);
            p.dim_levels = pr.value("dim_levels", p.dim_levels);
            p.dim_step = pr.value("dim_step", p.dim_step);
            p.debounce_requests = pr.value("debounce_requests", p.debounce_requests);
            p.evict_misses = pr.value("evict_misses", p.evict_misses);
            p.hello_backoff_min_s = pr.value("hello_backoff_min_s", p.hello_backoff_min_s);
            p.hello_backoff_max_s = pr.value("hello_backoff_max_s", p.hello_backoff_max_s);
            p.expected_lcns = pr.value("expected_lcns", -2);
            p.expected_sns = pr.value("expected_sns", -2);
            p.active_hours_per_day = pr.value("active_hours_per_day", p.active_hours_per_day);
            p.active_from_h = pr.value("active_from_h", p.active_from_h);
        } else {
            sc.protocol.expected_lcns = -2;
            sc.protocol.expected_sns = -2;
        }
        // -2 marks "not given": default to the roster so commissioning can
        // finish as soon as everyone expected has registered.
        if (sc.protocol.expected_lcns == -2)
            sc.protocol.expected_lcns = static_cast<int>(sc.lcns.size());
        if (sc.protocol.expected_sns == -2)
            sc.protocol.expected_sns = static_cast<int>(sc.sns.size());

        if (j.contains("run")) {
            const auto& run = j.at("run");
            sc.run.duration_s = run.value("duration_s", sc.run.duration_s);
            sc.run.seed = run.value("seed", sc.run.seed);
            if (run.contains("trace"))
                sc.run.trace_mask =
                    trace_mask_from_names(run.at("trace").get<std::vector<std::string>>());
        }
        return sc;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scenario parse: ") + e.what());
    }
}

std::string scenario_to_json(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    auto& room = j["room"];
    for (const SensorDesc& s : sc.room.sensors)
        room["sensors"].push_back({{"id", s.id}, {"daylight_gain", s.daylight_gain}});
    for (const LampDesc& l : sc.room.lamps)
        room["lamps"].push_back({{"id", l.id}, {"p_max_w", l.p_max_w}});
    room["coupling"] = sc.room.coupling;
    j["ldr"] = {{"r1_kohm", sc.ldr.r1_kohm}, {"adc_bits", sc.ldr.adc_bits}};
    for (const DaylightSegment& seg : sc.daylight.segments)
        j["daylight"]["segments"].push_back(
            {{"from_h", seg.from_h}, {"to_h", seg.to_h}, {"lux", seg.lux}});
    j["channel"] = {{"data_rate_bps", sc.channel.data_rate_bps},
                    {"preamble_bits", sc.channel.preamble_bits},
                    {"range_m", sc.channel.range_m},
                    {"p_loss", sc.channel.p_loss},
                    {"rx_queue_capacity", sc.channel.rx_queue_capacity}};
    j["nodes"]["mn"] = json::object();
    if (sc.mn.pos) j["nodes"]["mn"]["pos"] = {sc.mn.pos->x, sc.mn.pos->y};
    for (const SnSpec& sn : sc.sns) {
        json s = {{"id", sn.id}, {"target_lux", sn.target_lux}, {"deadband_lux", sn.deadband_lux}};
        if (sn.pos) s["pos"] = {sn.pos->x, sn.pos->y};
        if (sn.on_at > 0) s["on_at"] = sn.on_at;
        if (sn.off_at) s["off_at"] = *sn.off_at;
        j["nodes"]["sns"].push_back(s);
    }
    for (const LcnSpec& lcn : sc.lcns) {
        json l = {{"id", lcn.id}, {"lamp", lcn.lamp_id}};
        if (lcn.pos) l["pos"] = {lcn.pos->x, lcn.pos->y};
        if (lcn.on_at > 0) l["on_at"] = lcn.on_at;
        if (lcn.off_at) l["off_at"] = *lcn.off_at;
        j["nodes"]["lcns"].push_back(l);
    }
    const ProtocolParams& p = sc.protocol;
    j["protocol"] = {{"p1_timeout_s", p.p1_timeout_s},
                     {"p2_timeout_s", p.p2_timeout_s},
                     {"p3_window_s", p.p3_window_timeout_s},
                     {"audit_period_s", p.audit_period_s},
                     {"sense_period_s", p.sense_period_s},
                     {"dim_levels", p.dim_levels},
                     {"dim_step", p.dim_step},
                     {"debounce_requests", p.debounce_requests},
                     {"evict_misses", p.evict_misses},
                     {"expected_lcns", p.expected_lcns},
                     {"expected_sns", p.expected_sns},
                     {"active_hours_per_day", p.active_hours_per_day},
                     {"active_from_h", p.active_from_h}};
    j["run"] = {{"duration_s", sc.run.duration_s},
                {"seed", sc.run.seed},
                {"trace", trace_mask_names(sc.run.trace_mask)}};
    return j.dump(2) + "\n";
}

std::vector<Diagnostic> validate(const Scenario& sc) {
    using Sev = Diagnostic::Severity;
    std::vector<Diagnostic> d;

    if (sc.sns.size() > 15)
        diag(d, Sev::Error, "nodes.sns",
             "more than 15 sensor nodes; ids are 4-bit with 0 reserved");
    if (sc.lcns.size() > 15)
        diag(d, Sev::Error, "nodes.lcns",
             "more than 15 light control nodes; ids are 4-bit with 0 reserved");

    std::set<uint8_t> seen;
    for (size_t i = 0; i < sc.sns.size(); ++i) {
        const SnSpec& sn = sc.sns[i];
        const std::string path = "nodes.sns[" + std::to_string(i) + "]";
        if (sn.id < 1 || sn.id > 15) diag(d, Sev::Error, path + ".id", "id must be in 1..15");
        if (!seen.insert(sn.id).second)
            diag(d, Sev::Error, path + ".id", "duplicate SN id " + std::to_string(sn.id));
        if (sc.room.sensor_index(sn.id) < 0)
            diag(d, Sev::Error, path, "no room sensor with id " + std::to_string(sn.id));
        if (sn.target_lux <= 0) diag(d, Sev::Error, path + ".target_lux", "must be positive");
        if (sn.deadband_lux < 0) diag(d, Sev::Error, path + ".deadband_lux", "must be >= 0");
        if (sn.off_at && *sn.off_at <= sn.on_at)
            diag(d, Sev::Error, path + ".off_at", "must be after on_at");
    }
    seen.clear();
    for (size_t i = 0; i < sc.lcns.size(); ++i) {
        const LcnSpec& lcn = sc.lcns[i];
        const std::string path = "nodes.lcns[" + std::to_string(i) + "]";
        if (lcn.id < 1 || lcn.id > 15) diag(d, Sev::Error, path + ".id", "id must be in 1..15");
        if (!seen.insert(lcn.id).second)
            diag(d, Sev::Error, path + ".id", "duplicate LCN id " + std::to_string(lcn.id));
        if (sc.room.lamp_index(lcn.lamp_id) < 0)
            diag(d, Sev::Error, path + ".lamp", "no lamp with id " + std::to_string(lcn.lamp_id));
        if (lcn.off_at && *lcn.off_at <= lcn.on_at)
            diag(d, Sev::Error, path + ".off_at", "must be after on_at");
    }

    if (sc.room.coupling.size() != sc.room.sensors.size())
        diag(d, Sev::Error, "room.coupling", "one row per sensor required");
    for (size_t s = 0; s < sc.room.coupling.size(); ++s) {
        if (sc.room.coupling[s].size() != sc.room.lamps.size())
            diag(d, Sev::Error, "room.coupling[" + std::to_string(s) + "]",
                 "one column per lamp required");
        for (double c : sc.room.coupling[s])
            if (c < 0)
                diag(d, Sev::Error, "room.coupling[" + std::to_string(s) + "]",
                     "coupling must be >= 0");
    }
    for (size_t s = 0; s < sc.room.sensors.size(); ++s)
        if (sc.room.sensors[s].daylight_gain < 0 || sc.room.sensors[s].daylight_gain > 1)
            diag(d, Sev::Error, "room.sensors[" + std::to_string(s) + "].daylight_gain",
                 "must be in [0, 1]");
    for (size_t l = 0; l < sc.room.lamps.size(); ++l)
        if (sc.room.lamps[l].p_max_w < 0)
            diag(d, Sev::Error, "room.lamps[" + std::to_string(l) + "].p_max_w", "must be >= 0");

    if (!sc.daylight.covers_day())
        diag(d, Sev::Error, "daylight.segments", "segments must tile [0, 24] contiguously");
    for (const DaylightSegment& seg : sc.daylight.segments)
        if (seg.lux < 0) diag(d, Sev::Error, "daylight.segments", "lux must be >= 0");

    if (sc.channel.data_rate_bps <= 0)
        diag(d, Sev::Error, "channel.data_rate_bps", "must be positive");
    if (sc.channel.p_loss < 0 || sc.channel.p_loss > 1)
        diag(d, Sev::Error, "channel.p_loss", "must be in [0, 1]");
    if (sc.channel.range_m <= 0) diag(d, Sev::Error, "channel.range_m", "must be positive");
    if (sc.channel.rx_queue_capacity < 1)
        diag(d, Sev::Error, "channel.rx_queue_capacity", "must be >= 1");
    if (sc.channel.preamble_bits < 0)
        diag(d, Sev::Error, "channel.preamble_bits", "must be >= 0");

    const ProtocolParams& p = sc.protocol;
    if (p.dim_levels < 1) diag(d, Sev::Error, "protocol.dim_levels", "must be >= 1");
    if (p.dim_step < 1 || p.dim_step > 15)
        diag(d, Sev::Error, "protocol.dim_step", "must be in 1..15 (4-bit step count)");
    if (p.debounce_requests < 1) diag(d, Sev::Error, "protocol.debounce_requests", "must be >= 1");
    if (p.evict_misses < 1) diag(d, Sev::Error, "protocol.evict_misses", "must be >= 1");
    if (p.sense_period_s <= 0) diag(d, Sev::Error, "protocol.sense_period_s", "must be positive");
    if (p.audit_period_s <= p.audit_close_s + p.audit_final_s)
        diag(d, Sev::Error, "protocol.audit_period_s",
             "must exceed the audit close and retry windows");
    if (p.hello_backoff_min_s <= 0 || p.hello_backoff_max_s < p.hello_backoff_min_s)
        diag(d, Sev::Error, "protocol.hello_backoff", "need 0 < min <= max");
    if (p.active_hours_per_day <= 0 || p.active_hours_per_day > 24)
        diag(d, Sev::Error, "protocol.active_hours_per_day", "must be in (0, 24]");
    if (p.active_from_h < 0 || p.active_from_h >= 24)
        diag(d, Sev::Error, "protocol.active_from_h", "must be in [0, 24)");

    if (sc.run.duration_s <= 0) diag(d, Sev::Error, "run.duration_s", "must be positive");

    // A single dim step must not be able to jump the deadband, or the loop
    // can hunt around the target forever.
    for (const SnSpec& sn : sc.sns) {
        const int s = sc.room.sensor_index(sn.id);
        if (s < 0 || sc.room.coupling.size() <= static_cast<size_t>(s)) continue;
        double worst = 0;
        for (double c : sc.room.coupling[s])
            worst = std::max(worst, c * p.dim_step / p.dim_levels);
        if (worst > sn.deadband_lux + 1e-9) {
            std::ostringstream msg;
            msg << "oscillation risk: one dim step moves sensor " << int(sn.id) << " by up to "
                << worst << " lux, deadband is " << sn.deadband_lux;
            diag(d, Sev::Warning, "nodes.sns", msg.str());
        }
    }

    return d;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const Diagnostic& d : diags)
        if (d.severity == Diagnostic::Severity::Error) return true;
    return false;
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const Diagnostic& d : diags) {
        out += d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ";
        out += d.path + ": " + d.message + "\n";
    }
    return out;
}

Scenario scenario_table2() {
    Scenario sc;
    sc.name = "table2";

    // Lamps 1..4 in the corners, 5 in the middle, 40 W tubes.
    for (uint8_t id = 1; id <= 5; ++id) sc.room.lamps.push_back(LampDesc{id, 40.0});

    // One sensor per corner pair plus one under the middle lamp. Couplings
    // are tuned so that with the daylit-half ambient the corner pairs settle
    // at half duty and the middle lamp at full, exactly the Table 2 schedule.
    sc.room.sensors = {{1, 0.5}, {2, 0.5}, {3, 0.38}};
    sc.room.coupling = {
        {150, 150, 0, 0, 0},
        {0, 0, 150, 150, 0},
        {0, 0, 0, 0, 200},
    };

    // 12 h of use per day: a short bright spell for commissioning, a daylit
    // morning half, a dark evening half, then the building is closed.
    sc.daylight.segments = {{0.0, 0.1, 700}, {0.1, 6.0, 500}, {6.0, 24.0, 0}};

    for (uint8_t id = 1; id <= 3; ++id)
        sc.sns.push_back(SnSpec{id, 400.0, 20.0, std::nullopt, 0.0, std::nullopt});
    for (uint8_t id = 1; id <= 5; ++id)
        sc.lcns.push_back(LcnSpec{id, id, std::nullopt, 0.0, std::nullopt});

    sc.protocol.expected_lcns = 5;
    sc.protocol.expected_sns = 3;
    sc.protocol.active_hours_per_day = 12;
    sc.protocol.active_from_h = 0;

    sc.run.duration_s = 30.0 * 86400.0;
    sc.run.seed = 1;
    // Level changes, state transitions and the energy summary are recorded;
    // per-frame records over 30 days would dwarf them.
    sc.run.trace_mask = trace_mask_from_names({"state", "dim", "energy"});
    return sc;
}

} // namespace wsnlight
