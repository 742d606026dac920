#include "wsnlight.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "wsnlight/energy.hpp"
#include "wsnlight/engine.hpp"
#include "wsnlight/scenario.hpp"

using namespace wsnlight;

struct wsn_scenario {
    Scenario sc;
};

struct wsn_result {
    SimResult res;
    std::string trace_text;
    std::string report_text;
    std::string report_csv;
};

namespace {

thread_local std::string g_last_error;

wsn_status fail(wsn_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* wsn_status_name(wsn_status s) {
    switch (s) {
        case WSN_OK: return "ok";
        case WSN_ERR_ARGUMENT: return "argument";
        case WSN_ERR_IO: return "io";
        case WSN_ERR_PARSE: return "parse";
        case WSN_ERR_VALIDATION: return "validation";
        case WSN_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* wsn_last_error(void) { return g_last_error.c_str(); }

wsn_status wsn_scenario_from_string(const char* json_text, wsn_scenario** out) {
    if (!json_text || !out) return fail(WSN_ERR_ARGUMENT, "null argument");
    try {
        auto* handle = new wsn_scenario{scenario_from_json(json_text)};
        *out = handle;
        return WSN_OK;
    } catch (const std::exception& e) {
        return fail(WSN_ERR_PARSE, e.what());
    }
}

wsn_status wsn_scenario_from_file(const char* path, wsn_scenario** out) {
    if (!path || !out) return fail(WSN_ERR_ARGUMENT, "null argument");
    std::ifstream in(path);
    if (!in) return fail(WSN_ERR_IO, std::string("cannot read ") + path);
    std::ostringstream content;
    content << in.rdbuf();
    return wsn_scenario_from_string(content.str().c_str(), out);
}

wsn_status wsn_scenario_table2(wsn_scenario** out) {
    if (!out) return fail(WSN_ERR_ARGUMENT, "null argument");
    *out = new wsn_scenario{scenario_table2()};
    return WSN_OK;
}

void wsn_scenario_free(wsn_scenario* sc) { delete sc; }

void wsn_scenario_set_seed(wsn_scenario* sc, uint64_t seed) {
    if (sc) sc->sc.run.seed = seed;
}

void wsn_scenario_set_duration(wsn_scenario* sc, double seconds) {
    if (sc) sc->sc.run.duration_s = seconds;
}

wsn_status wsn_scenario_set_trace(wsn_scenario* sc, const char* kinds_csv) {
    if (!sc || !kinds_csv) return fail(WSN_ERR_ARGUMENT, "null argument");
    std::vector<std::string> names;
    std::stringstream ss(kinds_csv);
    std::string item;
    while (std::getline(ss, item, ',')) names.push_back(item);
    sc->sc.run.trace_mask = trace_mask_from_names(names);
    return WSN_OK;
}

const char* wsn_scenario_name(const wsn_scenario* sc) { return sc ? sc->sc.name.c_str() : ""; }

wsn_status wsn_scenario_validate(const wsn_scenario* sc, char** diagnostics_out) {
    if (!sc) return fail(WSN_ERR_ARGUMENT, "null scenario");
    const auto diags = validate(sc->sc);
    const std::string text = format_diagnostics(diags);
    if (diagnostics_out) *diagnostics_out = dup_string(text);
    if (has_errors(diags)) return fail(WSN_ERR_VALIDATION, text);
    return WSN_OK;
}

wsn_status wsn_run(const wsn_scenario* sc, wsn_result** out) {
    if (!sc || !out) return fail(WSN_ERR_ARGUMENT, "null argument");
    try {
        SimResult res = run(sc->sc);
        *out = new wsn_result{std::move(res), {}, {}, {}};
        return WSN_OK;
    } catch (const ValidationError& e) {
        return fail(WSN_ERR_VALIDATION, e.what());
    } catch (const std::exception& e) {
        return fail(WSN_ERR_INTERNAL, e.what());
    }
}

void wsn_result_free(wsn_result* r) { delete r; }

const char* wsn_result_trace_text(wsn_result* r) {
    if (!r) return "";
    if (r->trace_text.empty()) r->trace_text = r->res.trace_text();
    return r->trace_text.c_str();
}

const char* wsn_result_report_text(wsn_result* r) {
    if (!r) return "";
    if (r->report_text.empty()) r->report_text = r->res.report.text();
    return r->report_text.c_str();
}

const char* wsn_result_report_csv(wsn_result* r) {
    if (!r) return "";
    if (r->report_csv.empty()) r->report_csv = r->res.report.csv();
    return r->report_csv.c_str();
}

wsn_status wsn_result_energy(const wsn_result* r, wsn_energy* out) {
    if (!r || !out) return fail(WSN_ERR_ARGUMENT, "null argument");
    const EnergyReport& rep = r->res.report;
    out->total_wh_day = rep.total_wh_day;
    out->total_wh_month = rep.total_wh_month;
    out->baseline_wh_day = rep.baseline_wh_day;
    out->baseline_wh_month = rep.baseline_wh_month;
    out->savings_wh_month = rep.savings_wh_month;
    return WSN_OK;
}

double wsn_result_commissioning_time(const wsn_result* r) {
    return r ? r->res.commissioning_done_at : -1.0;
}

void wsn_table2_arithmetic(wsn_table2_figures* out) {
    if (!out) return;
    Room room;
    for (uint8_t id = 1; id <= 5; ++id) room.lamps.push_back(LampDesc{id, 40.0});
    const BaselineEnergy normal = baseline(room, 12.0);

    // Proposed schedule: corners at half power while daylight helps, all
    // lamps full through the dark half. Built as a power trace so the same
    // integrator that scores simulations produces the reference numbers.
    std::vector<PowerSample> day;
    for (uint8_t id = 1; id <= 4; ++id) {
        day.push_back(PowerSample{0, id, lamp_power_w(0.5, 40.0)});
        day.push_back(PowerSample{6 * 3600.0, id, lamp_power_w(1.0, 40.0)});
        day.push_back(PowerSample{12 * 3600.0, id, 0});
    }
    day.push_back(PowerSample{0, 5, lamp_power_w(1.0, 40.0)});
    day.push_back(PowerSample{12 * 3600.0, 5, 0});
    std::sort(day.begin(), day.end(),
              [](const PowerSample& a, const PowerSample& b) { return a.t < b.t; });
    double wh_day = 0;
    for (const auto& [lamp, wh] : integrate(day, 86400.0)) wh_day += wh;

    out->normal_wh_day = normal.wh_day;
    out->normal_wh_month = normal.wh_month;
    out->proposed_wh_day = wh_day;
    out->proposed_wh_month = wh_day * 30.0;
    out->savings_wh_month = compare_savings(normal.wh_month, wh_day * 30.0);
}

void wsn_string_free(char* s) { std::free(s); }

} // extern "C"
