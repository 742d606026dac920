#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wsnlight/plant.hpp"

namespace wsnlight {

struct PowerSample {
    double t = 0;
    uint8_t lamp_id = 0;
    double watts = 0;
};

struct EnergyReport {
    std::map<uint8_t, double> per_lamp_wh; // over the whole run
    double total_wh_day = 0;
    double total_wh_month = 0; // daily x 30
    double baseline_wh_day = 0;
    double baseline_wh_month = 0;
    double savings_wh_month = 0;

    std::string text() const; // one metric per line, "key value"
    std::string csv() const;
};

// Exact piecewise-constant integration: each lamp holds its last sampled
// power until the next sample or the horizon. Samples must be time-ordered
// (std::invalid_argument otherwise) and within [0, horizon].
std::map<uint8_t, double> integrate(const std::vector<PowerSample>& trace, double horizon_s);

struct BaselineEnergy {
    double wh_day = 0;
    double wh_month = 0;
};

// Every lamp at full output for the occupied hours; a month is 30 days.
BaselineEnergy baseline(const Room& room, double occupied_hours_per_day);

double compare_savings(double baseline_wh, double actual_wh);

// Assembles the report from a run's power trace. days = horizon / 86400;
// per-day figures are the run average (exact when the schedule repeats daily).
EnergyReport build_report(const std::vector<PowerSample>& trace, double horizon_s,
                          const Room& room, double occupied_hours_per_day);

} // namespace wsnlight
