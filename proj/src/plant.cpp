#include "wsnlight/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsnlight {

int Room::sensor_index(uint8_t sensor_id) const {
    for (size_t i = 0; i < sensors.size(); ++i)
        if (sensors[i].id == sensor_id) return static_cast<int>(i);
    return -1;
}

int Room::lamp_index(uint8_t lamp_id) const {
    for (size_t i = 0; i < lamps.size(); ++i)
        if (lamps[i].id == lamp_id) return static_cast<int>(i);
    return -1;
}

double ldr_resistance_kohm(double lux) {
    const double clamped = std::clamp(lux, kLuxClampLo, kLuxClampHi);
    return 500.0 / clamped;
}

double divider_voltage(double rl_kohm, double r1_kohm) {
    return 5.0 * rl_kohm / (rl_kohm + r1_kohm);
}

double voltage_to_lux(double vo, double r1_kohm) {
    if (!(vo > 0.0) || !(vo < 5.0)) throw std::domain_error("voltage_to_lux: Vo outside (0, 5)");
    return (2500.0 - 500.0 * vo) / (vo * r1_kohm);
}

int adc_sample(double vo, int adc_bits) {
    if (!(vo >= 0.0) || !(vo <= 5.0)) throw std::domain_error("adc_sample: Vo outside [0, 5]");
    const double full_scale = static_cast<double>((1 << adc_bits) - 1);
    return static_cast<int>(std::round(vo / 5.0 * full_scale)); // std::round is half away from zero
}

double adc_voltage(int code, int adc_bits) {
    const double full_scale = static_cast<double>((1 << adc_bits) - 1);
    return static_cast<double>(code) / full_scale * 5.0;
}

double sensed_lux(double true_lux, const LdrCircuit& ldr) {
    const double rl = ldr_resistance_kohm(true_lux);
    const double vo = divider_voltage(rl, ldr.r1_kohm);
    const int code = adc_sample(vo, ldr.adc_bits);
    const int max_code = (1 << ldr.adc_bits) - 1;
    if (code <= 0) return kLuxClampHi; // rail low: divider shorted, blinding light
    if (code >= max_code) return 0.0; // rail high: LDR open, darkness
    return voltage_to_lux(adc_voltage(code, ldr.adc_bits), ldr.r1_kohm);
}

double illuminance_at(const Room& room, uint8_t sensor_id, std::span<const double> levels,
                      double ambient_lux) {
    const int s = room.sensor_index(sensor_id);
    if (s < 0) throw std::out_of_range("illuminance_at: unknown sensor id");
    double lux = ambient_lux * room.sensors[s].daylight_gain;
    const auto& row = room.coupling[s];
    for (size_t l = 0; l < row.size() && l < levels.size(); ++l) lux += row[l] * levels[l];
    return lux;
}

double lamp_power_w(double level_fraction, double p_max_w) {
    return p_max_w * std::clamp(level_fraction, 0.0, 1.0);
}

double DaylightProfile::ambient_at(double sim_time_s) const {
    double h = std::fmod(sim_time_s / 3600.0, 24.0);
    if (h < 0) h += 24.0;
    for (const DaylightSegment& seg : segments)
        if (h >= seg.from_h && h < seg.to_h) return seg.lux;
    return segments.empty() ? 0.0 : segments.back().lux; // h == 24 boundary
}

bool DaylightProfile::covers_day() const {
    if (segments.empty()) return false;
    double at = 0;
    for (const DaylightSegment& seg : segments) {
        if (std::abs(seg.from_h - at) > 1e-9) return false;
        if (seg.to_h <= seg.from_h) return false;
        at = seg.to_h;
    }
    return std::abs(at - 24.0) < 1e-9;
}

} // namespace wsnlight
