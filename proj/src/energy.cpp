#include "wsnlight/energy.hpp"

#include <cstdio>
#include <stdexcept>

namespace wsnlight {

std::map<uint8_t, double> integrate(const std::vector<PowerSample>& trace, double horizon_s) {
    std::map<uint8_t, double> wh;
    std::map<uint8_t, PowerSample> last;
    double prev_t = 0;
    for (const PowerSample& s : trace) {
        if (s.t < prev_t) throw std::invalid_argument("integrate: samples not time-ordered");
        prev_t = s.t;
        auto it = last.find(s.lamp_id);
        if (it != last.end()) {
            const double dt = std::min(s.t, horizon_s) - it->second.t;
            if (dt > 0) wh[s.lamp_id] += it->second.watts * dt / 3600.0;
        } else {
            wh[s.lamp_id] += 0.0; // make the lamp appear even if it never ran
        }
        last[s.lamp_id] = s;
    }
    for (const auto& [lamp, s] : last) {
        const double dt = horizon_s - s.t;
        if (dt > 0) wh[lamp] += s.watts * dt / 3600.0;
    }
    return wh;
}

BaselineEnergy baseline(const Room& room, double occupied_hours_per_day) {
    double day = 0;
    for (const LampDesc& lamp : room.lamps) day += lamp.p_max_w * occupied_hours_per_day;
    return {day, day * 30.0};
}

double compare_savings(double baseline_wh, double actual_wh) { return baseline_wh - actual_wh; }

EnergyReport build_report(const std::vector<PowerSample>& trace, double horizon_s,
                          const Room& room, double occupied_hours_per_day) {
    EnergyReport r;
    r.per_lamp_wh = integrate(trace, horizon_s);
    double total = 0;
    for (const auto& [lamp, wh] : r.per_lamp_wh) total += wh;
    const double days = horizon_s / 86400.0;
    r.total_wh_day = days > 0 ? total / days : 0.0;
    r.total_wh_month = r.total_wh_day * 30.0;
    const BaselineEnergy base = baseline(room, occupied_hours_per_day);
    r.baseline_wh_day = base.wh_day;
    r.baseline_wh_month = base.wh_month;
    r.savings_wh_month = compare_savings(r.baseline_wh_month, r.total_wh_month);
    return r;
}

std::string EnergyReport::text() const {
    char buf[128];
    std::string out;
    auto line = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s %.3f\n", key, v);
        out += buf;
    };
    line("baseline_wh_day", baseline_wh_day);
    line("baseline_wh_month", baseline_wh_month);
    line("total_wh_day", total_wh_day);
    line("total_wh_month", total_wh_month);
    line("savings_wh_month", savings_wh_month);
    for (const auto& [lamp, wh] : per_lamp_wh) {
        std::snprintf(buf, sizeof buf, "lamp_%u_wh_total %.3f\n", unsigned(lamp), wh);
        out += buf;
    }
    return out;
}

std::string EnergyReport::csv() const {
    char buf[128];
    std::string out = "metric,value\n";
    auto line = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s,%.3f\n", key, v);
        out += buf;
    };
    line("baseline_wh_day", baseline_wh_day);
    line("baseline_wh_month", baseline_wh_month);
    line("total_wh_day", total_wh_day);
    line("total_wh_month", total_wh_month);
    line("savings_wh_month", savings_wh_month);
    for (const auto& [lamp, wh] : per_lamp_wh) {
        std::snprintf(buf, sizeof buf, "lamp_%u_wh_total,%.3f\n", unsigned(lamp), wh);
        out += buf;
    }
    return out;
}

} // namespace wsnlight
