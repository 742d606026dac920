#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wsnlight {

// Photometric world: daylight, lamp-to-sensor coupling, the LDR sensing
// chain, and lamp power. Everything here is stateless and exact.

struct SensorDesc {
    uint8_t id = 0;
    double daylight_gain = 0; // fraction of ambient lux reaching this work plane
};

struct LampDesc {
    uint8_t id = 0;
    double p_max_w = 40;
};

struct Room {
    std::vector<SensorDesc> sensors;
    std::vector<LampDesc> lamps;
    // coupling[s][l]: lux contributed at sensor s by lamp l at full output,
    // indices follow the sensors/lamps vectors.
    std::vector<std::vector<double>> coupling;

    int sensor_index(uint8_t sensor_id) const; // -1 when unknown
    int lamp_index(uint8_t lamp_id) const;
};

struct LdrCircuit {
    double r1_kohm = 10.0; // series resistor; Vcc is fixed at 5 V
    int adc_bits = 10;
};

constexpr double kLuxClampLo = 0.01;
constexpr double kLuxClampHi = 100000.0;

// R_L = 500 / lux [kOhm], lux clamped to [0.01, 100000].
double ldr_resistance_kohm(double lux);

// Vo = 5 * R_L / (R_L + R1).
double divider_voltage(double rl_kohm, double r1_kohm);

// Exact inverse of the divider + LDR law: lux = (2500 - 500*Vo) / (Vo * R1).
// Throws std::domain_error outside 0 < Vo < 5.
double voltage_to_lux(double vo, double r1_kohm);

// round(Vo/5 * (2^bits - 1)), half away from zero. Throws std::domain_error
// outside [0, 5].
int adc_sample(double vo, int adc_bits);

double adc_voltage(int code, int adc_bits);

// Full lux -> R_L -> Vo -> ADC -> lux chain, total over all inputs: the two
// rail codes map to the clamp extremes instead of raising.
double sensed_lux(double true_lux, const LdrCircuit& ldr);

// ambient * gain[s] + sum_l coupling[s][l] * levels[l]. levels are per-lamp
// dim fractions in [0,1], ordered like room.lamps. Throws std::out_of_range
// for an unknown sensor id.
double illuminance_at(const Room& room, uint8_t sensor_id, std::span<const double> levels,
                      double ambient_lux);

double lamp_power_w(double level_fraction, double p_max_w);

struct DaylightSegment {
    double from_h = 0;
    double to_h = 24;
    double lux = 0;
};

// Piecewise-constant, 24 h periodic daylight schedule.
struct DaylightProfile {
    std::vector<DaylightSegment> segments{{0, 24, 0}};

    double ambient_at(double sim_time_s) const;
    bool covers_day() const; // contiguous [0, 24] coverage
};

} // namespace wsnlight
