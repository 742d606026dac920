#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsnlight/plant.hpp"
#include "wsnlight/protocol.hpp"
#include "wsnlight/radio.hpp"

namespace wsnlight {

struct MnSpec {
    std::optional<Vec2> pos;
};

struct SnSpec {
    uint8_t id = 0;
    double target_lux = 500;
    double deadband_lux = 20;
    std::optional<Vec2> pos;
    double on_at = 0;
    std::optional<double> off_at;
};

struct LcnSpec {
    uint8_t id = 0;
    uint8_t lamp_id = 0;
    std::optional<Vec2> pos;
    double on_at = 0;
    std::optional<double> off_at;
};

constexpr unsigned kTraceAll = 0x3F; // one bit per TraceKind

struct RunSpec {
    double duration_s = 86400;
    uint64_t seed = 1;
    unsigned trace_mask = kTraceAll;
};

struct Scenario {
    std::string name = "scenario";
    Room room;
    LdrCircuit ldr;
    DaylightProfile daylight;
    ChannelParams channel;
    MnSpec mn;
    std::vector<SnSpec> sns;
    std::vector<LcnSpec> lcns;
    ProtocolParams protocol;
    RunSpec run;
};

struct Diagnostic {
    enum class Severity { Error, Warning } severity;
    std::string path; // dotted field path, e.g. "nodes.lcns[2].id"
    std::string message;
};

// Structural and semantic checks; run() refuses scenarios with errors,
// warnings only flag shaky control-loop settings.
std::vector<Diagnostic> validate(const Scenario& sc);

bool has_errors(const std::vector<Diagnostic>& diags);
std::string format_diagnostics(const std::vector<Diagnostic>& diags);

// Throws std::runtime_error with a parse message on malformed input.
Scenario scenario_from_json(const std::string& json_text);
std::string scenario_to_json(const Scenario& sc);

// Work-plane illuminance presets (CIBSE-style levels).
std::optional<double> target_lux_preset(const std::string& name);

// Built-in reference setup: five 40 W tubes (four corners, one middle),
// 400 lux target, 12 h of daily use split into a daylit and a dark half.
// Runs 30 simulated days by default.
Scenario scenario_table2();

unsigned trace_mask_from_names(const std::vector<std::string>& names);
std::vector<std::string> trace_mask_names(unsigned mask);

} // namespace wsnlight
