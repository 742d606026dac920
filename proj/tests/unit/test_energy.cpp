#include <doctest.h>

#include <stdexcept>

#include "wsnlight/energy.hpp"

using namespace wsnlight;

namespace {

Room five_lamp_room() {
    Room room;
    for (uint8_t id = 1; id <= 5; ++id) room.lamps.push_back(LampDesc{id, 40.0});
    return room;
}

} // namespace

TEST_CASE("integrate: constant power") {
    // 40 W for 6 h
    std::vector<PowerSample> t{{0, 1, 40}, {6 * 3600.0, 1, 0}};
    auto wh = integrate(t, 6 * 3600.0);
    CHECK(wh[1] == doctest::Approx(240.0));

    // 20 W for 6 h on four lamps
    std::vector<PowerSample> t4;
    for (uint8_t id = 1; id <= 4; ++id) t4.push_back(PowerSample{0, id, 20});
    wh = integrate(t4, 6 * 3600.0);
    double total = 0;
    for (auto& [id, v] : wh) total += v;
    CHECK(total == doctest::Approx(480.0));
}

TEST_CASE("integrate: zero-duration trace") {
    std::vector<PowerSample> t{{0, 1, 40}};
    auto wh = integrate(t, 0.0);
    CHECK(wh[1] == doctest::Approx(0.0));
}

TEST_CASE("integrate rejects unordered samples") {
    std::vector<PowerSample> t{{10, 1, 40}, {5, 1, 0}};
    CHECK_THROWS_AS(integrate(t, 20), std::invalid_argument);
}

TEST_CASE("integrate: level changes are piecewise-constant") {
    std::vector<PowerSample> t{{0, 1, 40}, {3600, 1, 20}, {2 * 3600.0, 1, 0}};
    auto wh = integrate(t, 3 * 3600.0);
    CHECK(wh[1] == doctest::Approx(60.0));
}

TEST_CASE("integrate additivity over concatenated traces") {
    // a covers [0, 3600), b continues from 3600 at the same power a ended on
    std::vector<PowerSample> a{{0, 1, 35}, {1800, 1, 10}};
    std::vector<PowerSample> b{{3600, 1, 10}, {5400, 1, 25}};
    std::vector<PowerSample> both = a;
    both.insert(both.end(), b.begin(), b.end());
    CHECK(integrate(both, 7200.0)[1] ==
          doctest::Approx(integrate(a, 3600.0)[1] + integrate(b, 7200.0)[1]).epsilon(1e-12));
}

TEST_CASE("integrate scales linearly with power") {
    std::vector<PowerSample> t{{0, 1, 40}, {1000, 1, 15}, {4000, 1, 33}};
    std::vector<PowerSample> doubled = t;
    for (auto& s : doubled) s.watts *= 2;
    CHECK(integrate(doubled, 6000.0)[1] == doctest::Approx(2 * integrate(t, 6000.0)[1]));
}

TEST_CASE("baseline: five 40 W lamps for 12 h") {
    const auto base = baseline(five_lamp_room(), 12.0);
    CHECK(base.wh_day == doctest::Approx(2400.0));
    CHECK(base.wh_month == doctest::Approx(72000.0));

    Room empty;
    const auto none = baseline(empty, 12.0);
    CHECK(none.wh_day == doctest::Approx(0.0));
}

TEST_CASE("savings comparison") {
    CHECK(compare_savings(72000, 57600) == doctest::Approx(14400.0));
    CHECK(compare_savings(500, 500) == doctest::Approx(0.0));
}

TEST_CASE("proposed daily schedule sums to 1920 Wh") {
    // 4 corner lamps at 20 W + the middle at 40 W for the daylit 6 h, all
    // five at 40 W for the dark 6 h: 480 + 240 + 1200.
    const double day = 4 * 20 * 6 + 1 * 40 * 6 + 5 * 40 * 6;
    CHECK(day == doctest::Approx(1920.0));
    CHECK(compare_savings(72000, day * 30) == doctest::Approx(14400.0));
}

TEST_CASE("report: month is 30 daily figures") {
    std::vector<PowerSample> t;
    for (uint8_t id = 1; id <= 5; ++id) t.push_back(PowerSample{0, id, 40});
    // two identical 12h-on/12h-off days
    for (uint8_t id = 1; id <= 5; ++id) t.push_back(PowerSample{12 * 3600.0, id, 0});
    for (uint8_t id = 1; id <= 5; ++id) t.push_back(PowerSample{24 * 3600.0, id, 40});
    for (uint8_t id = 1; id <= 5; ++id) t.push_back(PowerSample{36 * 3600.0, id, 0});
    const EnergyReport r = build_report(t, 2 * 86400.0, five_lamp_room(), 12.0);
    CHECK(r.total_wh_day == doctest::Approx(2400.0));
    CHECK(r.total_wh_month == doctest::Approx(72000.0));
    CHECK(r.baseline_wh_month == doctest::Approx(72000.0));
    CHECK(r.savings_wh_month == doctest::Approx(0.0));
    CHECK(r.savings_wh_month ==
          doctest::Approx(r.baseline_wh_month - r.total_wh_month).epsilon(1e-12));
}

TEST_CASE("report text and csv carry every metric") {
    std::vector<PowerSample> t{{0, 1, 40}};
    const EnergyReport r = build_report(t, 86400.0, five_lamp_room(), 12.0);
    const std::string text = r.text();
    CHECK(text.find("baseline_wh_month 72000.000") != std::string::npos);
    CHECK(text.find("lamp_1_wh_total") != std::string::npos);
    const std::string csv = r.csv();
    CHECK(csv.find("metric,value") == 0);
    CHECK(csv.find("savings_wh_month,") != std::string::npos);
}
