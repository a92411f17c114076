#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rql/error.hpp"
#include "rql/rf.hpp"

using namespace rql;

namespace {

SidebandMeasurement obs(double p0_dbm, double ssb_db) {
    SidebandMeasurement m;
    m.p0_dbm = p0_dbm;
    m.ssb_db = ssb_db;
    return m;
}

// Synthesizes one record and measures it: 6 GHz carrier, 250 MHz modulation,
// 32 samples per carrier cycle, 4 modulation periods.
SidebandSpectrum round_trip(double m_a, double m_p) {
    const double fc = 6e9, fm = 250e6, fs = 32 * fc;
    const auto x = synthesize_modulated(1.0, {m_a, m_p}, fc, fm, 4 / fm, fs);
    return spectrum_sidebands(x, fs, fc, fm);
}

}  // namespace

TEST_CASE("dBm and dB conversions") {
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
    CHECK(dbm_to_watts(-30.0) == doctest::Approx(1e-6));
    CHECK(watts_to_dbm(1e-3) == doctest::Approx(0.0));
    for (double dbm : {-40.0, -2.4, 0.0, 13.0}) CHECK(watts_to_dbm(dbm_to_watts(dbm)) == doctest::Approx(dbm));
    CHECK(db_to_power_ratio(-10.0) == doctest::Approx(0.1));
    CHECK(power_ratio_to_db(100.0) == doctest::Approx(20.0));
    CHECK_THROWS_AS(watts_to_dbm(0.0), DomainError);
    CHECK_THROWS_AS(power_ratio_to_db(-1.0), DomainError);
    CHECK(geometric_mean_dbm(0.0, -4.0) == -2.0);
    CHECK(dbm_to_watts(geometric_mean_dbm(0.0, -4.0)) ==
          doctest::Approx(std::sqrt(dbm_to_watts(0.0) * dbm_to_watts(-4.0))));
}

TEST_CASE("sideband dissipation on the two clock lines") {
    const auto q = am_pm_corrected_power(obs(-2.0, -69.3));
    const auto i = am_pm_corrected_power(obs(-2.4, -79.3));
    CHECK(q.watts == doctest::Approx(970e-9).epsilon(0.02));
    CHECK(i.watts == doctest::Approx(280e-9).epsilon(0.02));
    CHECK(q.watts + i.watts == doctest::Approx(1.25e-6).epsilon(0.02));
    CHECK(0.42 * (q.watts + i.watts) == doctest::Approx(510e-9).epsilon(0.05));
    // tighter: the values the formula gives
    CHECK(q.watts == doctest::Approx(960.9e-9).epsilon(1e-3));
    CHECK(i.watts == doctest::Approx(277.1e-9).epsilon(1e-3));
}

TEST_CASE("pure-AM bound exceeds the half-AM estimate by sqrt 2") {
    const auto m = obs(-2.0, -69.3);
    CHECK(ssb_power_upper_bound(m).watts / am_pm_corrected_power(m).watts == doctest::Approx(std::sqrt(2.0)));
    CHECK(am_pm_corrected_power(m, 1.0).ratio == ssb_power_upper_bound(m).ratio);
    CHECK_THROWS_AS(am_pm_corrected_power(m, 0.0), ParameterError);
    CHECK_THROWS_AS(am_pm_corrected_power(m, 1.1), ParameterError);
}

TEST_CASE("rounded shorthand tracks the exact ratio") {
    for (double ssb : {-90.0, -79.3, -69.3, -50.0}) {
        const double exact = am_pm_corrected_power(obs(0.0, ssb)).ratio_db();
        CHECK(std::abs(corrected_ratio_db_rounded(ssb) - exact) < 0.03);
    }
    CHECK(corrected_ratio_db_rounded(-69.3) == doctest::Approx(-28.15));
}

TEST_CASE("measurement checks") {
    CHECK_THROWS_AS(am_pm_corrected_power(obs(0.0, 0.0)), DomainError);
    CHECK_THROWS_AS(am_pm_corrected_power(obs(0.0, 3.0)), DomainError);
    SidebandMeasurement m = obs(0.0, -60.0);
    m.f_mod_hz = 7e9;
    CHECK_THROWS_AS(check_measurement(m), ParameterError);
}

TEST_CASE("AM and PM depth extraction") {
    CHECK(extract_ma(0.91) == doctest::Approx(0.023).epsilon(0.001 / 0.023));
    CHECK(std::abs(extract_ma(0.91) - 0.023) <= 0.001);
    CHECK(extract_ma(1.0) == 0.0);
    CHECK_THROWS_AS(extract_ma(1.1), DomainError);
    CHECK_THROWS_AS(extract_ma(0.0), DomainError);

    CHECK(std::abs(extract_mp(1.4e-12, 6e9) - 0.026) <= 0.001);
    CHECK(extract_mp(0.0, 6e9) == 0.0);
    CHECK_THROWS_AS(extract_mp(-1e-12, 6e9), ParameterError);
    CHECK_THROWS_AS(extract_mp(1e-12, 0.0), ParameterError);

    // forward model: a ratio built from m_a inverts back to m_a
    for (double ma : {0.0, 0.01, 0.1, 0.3}) CHECK(extract_ma((1 - 2 * ma) / (1 + 2 * ma)) == doctest::Approx(ma));
}

TEST_CASE("chop fundamental") {
    const double f = chop_fundamental(6.2e9, 12000, 12000);
    CHECK(f == doctest::Approx(258.333e3).epsilon(1e-5));
    CHECK(std::abs(f - 259e3) < 1e3);
    CHECK_THROWS_AS(chop_fundamental(6.2e9, 0, 12000), ParameterError);
    CHECK_THROWS_AS(chop_fundamental(0.0, 1, 1), ParameterError);
}

TEST_CASE("modulation round trip through the numeric spectrum") {
    const double grid[] = {0.0, 0.01, 0.023, 0.026, 0.05};
    for (double ma : grid) {
        for (double mp : grid) {
            if (ma == 0.0 && mp == 0.0) continue;
            CAPTURE(ma);
            CAPTURE(mp);
            const auto s = round_trip(ma, mp);
            const double expect = (ma * ma + mp * mp) / 4.0;
            CHECK(s.ssb_ratio() == doctest::Approx(expect).epsilon(0.02));
            CHECK(s.factors.m_a == doctest::Approx(ma).epsilon(0.02));
            CHECK(s.factors.m_p == doctest::Approx(mp).epsilon(0.02));
            CHECK(s.carrier_amplitude == doctest::Approx(1.0).epsilon(0.01));
        }
    }
    const auto none = round_trip(0.0, 0.0);
    CHECK(none.ssb_ratio() < 1e-20);
}

TEST_CASE("synthesis and analysis argument checks") {
    CHECK_THROWS_AS(synthesize_modulated(1.0, {}, 6e9, 250e6, 4 / 250e6, 3 * 6e9), ParameterError);
    CHECK_THROWS_AS(synthesize_modulated(1.0, {}, 6e9, 7e9, 1e-9, 32 * 6e9), ParameterError);
    CHECK_THROWS_AS(synthesize_modulated(1.0, {}, 6e9, 250e6, 1.5e-9, 32 * 6e9), ParameterError);
    CHECK_THROWS_AS(synthesize_modulated(1.0, {}, 0.0, 250e6, 4e-9, 32 * 6e9), ParameterError);

    const std::vector<double> empty;
    CHECK_THROWS_AS(spectrum_sidebands(empty, 1e9, 1e8, 1e7), ParameterError);
    const std::vector<double> zeros(1000, 0.0);
    CHECK_THROWS_AS(spectrum_sidebands(zeros, 1e9, 1e8, 1e7), DomainError);
    CHECK_THROWS_AS(spectrum_sidebands(zeros, 1e9, 1.0001e8, 1e7), ParameterError);
    CHECK_THROWS_AS(spectrum_sidebands(zeros, 1e9, 4.9e8, 1e7), ParameterError);
}

TEST_CASE("analyser trace sideband measurement") {
    const std::vector<SpectrumPoint> trace = {
        {6.2e9 - 300e3, -95.0}, {6.2e9 - 259e3, -71.3}, {6.2e9, -2.0},
        {6.2e9 + 258e3, -71.3}, {6.2e9 + 300e3, -95.0},
    };
    const auto r = measure_ssb(trace, 259e3, 1e3);
    CHECK(r.carrier_hz == 6.2e9);
    CHECK(r.carrier_dbm == -2.0);
    CHECK(r.ssb_db == doctest::Approx(-69.3));
    CHECK_THROWS_AS(measure_ssb(trace, 280e3, 1e3), ParameterError);
    CHECK_THROWS_AS(measure_ssb({}, 259e3, 1e3), ParameterError);
    CHECK_THROWS_AS(measure_ssb(trace, 0.0, 1e3), ParameterError);

    // unequal sidebands average in linear power
    const std::vector<SpectrumPoint> skew = {{1e9 - 1e6, -30.0}, {1e9, 0.0}, {1e9 + 1e6, -40.0}};
    CHECK(measure_ssb(skew, 1e6, 1.0).ssb_db == doctest::Approx(10 * std::log10(0.5 * (1e-3 + 1e-4))));
}
