#include <doctest.h>

#include <sstream>

#include "rql/config.hpp"
#include "rql/error.hpp"
#include "rql/report.hpp"

using namespace rql;

namespace {

template <class F>
auto from_text(const std::string& text, F&& parse) {
    std::istringstream in(text);
    return parse(in);
}

}  // namespace

TEST_CASE("gate table INI round trip") {
    GateTable t;
    t.set({GateKind::AndOr, 12, 97.5, 3});
    t.set({GateKind::Delay, 4, 110.25, 4});
    std::ostringstream out;
    write_gate_table(out, t);
    const auto back = from_text(out.str(), parse_gate_table);
    CHECK(back == t);
}

TEST_CASE("gate table partial override keeps defaults") {
    const auto t = from_text("# comment\n[Split]\nic_avg = 200 ; uA\n", parse_gate_table);
    CHECK(t[GateKind::Split].ic_avg_ua == 200.0);
    CHECK(t[GateKind::Split].jj_count == 2);
    CHECK(t[GateKind::AndOr] == GateTable{}[GateKind::AndOr]);
    CHECK(from_text("", parse_gate_table) == GateTable{});
}

TEST_CASE("gate table errors") {
    CHECK_THROWS_AS(from_text("[Nand]\njj_count = 2\n", parse_gate_table), ConfigError);
    CHECK_THROWS_AS(from_text("[AndOr]\nweight = 2\n", parse_gate_table), ConfigError);
    CHECK_THROWS_AS(from_text("[AndOr]\njj_count = many\n", parse_gate_table), ConfigError);
    CHECK_THROWS_AS(from_text("[AndOr]\njj_count = 2\n", parse_gate_table), ConfigError);  // seq_depth 4 > 2
    CHECK_THROWS_AS(from_text("[AndOr\n", parse_gate_table), ConfigError);
    CHECK_THROWS_AS(load_gate_table("/nonexistent/table.ini"), IoError);
}

TEST_CASE("scenario parsing") {
    const auto s = from_text("[scenario]\nn_devices = 1e6\nfrequency = 5e9\n", parse_scenario);
    CHECK(s.n_devices == 1e6);
    CHECK(s.frequency_hz == 5e9);
    CHECK(s.ic_avg_a == ScalingScenario{}.ic_avg_a);
    CHECK_THROWS_AS(from_text("[other]\nx = 1\n", parse_scenario), ConfigError);
    CHECK_THROWS_AS(from_text("[scenario]\nspeed = 1\n", parse_scenario), ConfigError);
    CHECK_THROWS_AS(from_text("[scenario]\nmargin_frac = 2\n", parse_scenario), ParameterError);
}

TEST_CASE("measurement descriptor") {
    const std::string text =
        "[measurement]\nf_clock = 6.2e9\nchop_active = 12000\nchop_zero = 12000\n"
        "[line:Q]\napplied_dbm = 0.0\nreturned_dbm = -4.0\nssb_db = -69.3\n"
        "[line:I]\np0_dbm = -2.4\nssb_db = -79.3\n"
        "[regions]\ncla = 0.42\n";
    const auto m = from_text(text, parse_measurement);
    CHECK(m.f_clock_hz == 6.2e9);
    REQUIRE(m.chop.has_value());
    CHECK(m.chop->first == 12000);
    CHECK(m.am_fraction == 0.5);
    REQUIRE(m.lines.size() == 2);
    const auto& q = m.lines[0].line == "Q" ? m.lines[0] : m.lines[1];
    CHECK(q.p0_dbm == doctest::Approx(-2.0));
    REQUIRE(m.regions.size() == 1);
    CHECK(m.regions[0].second == 0.42);

    CHECK_THROWS_AS(from_text("[line:Q]\np0_dbm = 0\n", parse_measurement), ConfigError);
    CHECK_THROWS_AS(from_text("[line:Q]\nssb_db = -60\n", parse_measurement), ConfigError);
    CHECK_THROWS_AS(from_text("[measurement]\nf_clock = 1e9\n", parse_measurement), ConfigError);
    CHECK_THROWS_AS(from_text("[line:Q]\np0_dbm = 0\nssb_db = -60\n[measurement]\nchop_active = 5\n",
                              parse_measurement),
                    ConfigError);
    CHECK_THROWS_AS(from_text("[junk]\n", parse_measurement), ConfigError);
    CHECK_THROWS_AS(load_measurement("/nonexistent/m.ini"), IoError);
}

TEST_CASE("sideband chain end to end") {
    MeasurementDescriptor m;
    m.f_clock_hz = 6.2e9;
    m.chop = {{12000.0, 12000.0}};
    m.lines = {{"Q", -2.0, -69.3}, {"I", -2.4, -79.3}};
    m.regions = {{"cla", 0.42}};
    const auto c = sideband_chain(m);
    REQUIRE(c.lines.size() == 2);
    CHECK(c.lines[0].estimate.watts == doctest::Approx(960.9e-9).epsilon(1e-3));
    CHECK(c.lines[1].estimate.watts == doctest::Approx(277.1e-9).epsilon(1e-3));
    CHECK(c.total_w == doctest::Approx(1.238e-6).epsilon(1e-3));
    CHECK(c.attribution.per_region_w.at("cla") == doctest::Approx(0.42 * c.total_w));
    REQUIRE(c.chop_fundamental_hz.has_value());
    CHECK(*c.chop_fundamental_hz == doctest::Approx(258333.3).epsilon(1e-6));
    const auto j = to_json(c);
    CHECK(j["lines"].size() == 2);
    CHECK(j["total_w"].get<double>() == c.total_w);

    m.lines.push_back({"Q", 0.0, -60.0});
    CHECK_THROWS_AS(sideband_chain(m), ConfigError);
}

TEST_CASE("vector files") {
    const auto v = from_text("# a, b\n0x01,ff\n\n7F , 0X80 # trailing\n",
                             [](std::istream& in) { return parse_vectors(in, 8); });
    REQUIRE(v.size() == 2);
    CHECK(v[0] == AdderVector{1, 0xFF});
    CHECK(v[1] == AdderVector{0x7F, 0x80});
    std::ostringstream out;
    write_vectors(out, v, 8);
    CHECK(from_text(out.str(), [](std::istream& in) { return parse_vectors(in, 8); }) == v);

    auto p8 = [](std::istream& in) { return parse_vectors(in, 8); };
    CHECK_THROWS_AS(from_text("100,1\n", p8), ParameterError);
    CHECK_THROWS_AS(from_text("1;2\n", p8), ConfigError);
    CHECK_THROWS_AS(from_text("1,2,3\n", p8), ConfigError);
    CHECK_THROWS_AS(from_text("zz,1\n", p8), ConfigError);
    CHECK_THROWS_AS(from_text("1,2\n", [](std::istream& in) { return parse_vectors(in, 0); }), ParameterError);
    CHECK_THROWS_AS(load_vectors("/nonexistent/v.txt", 8), IoError);
    CHECK(from_text("ffffffffffffffff,1\n", [](std::istream& in) { return parse_vectors(in, 64); })[0].a == ~0ULL);
}

TEST_CASE("serial program files") {
    const auto bits = from_text("1010_0011 # comment\n  11\n", parse_serial);
    CHECK(bits == std::vector<std::uint8_t>{1, 0, 1, 0, 0, 0, 1, 1, 1, 1});
    CHECK_THROWS_AS(from_text("10x1\n", parse_serial), ConfigError);
    CHECK_THROWS_AS(from_text("# nothing\n", parse_serial), ConfigError);
    CHECK_THROWS_AS(load_serial("/nonexistent/s.txt"), IoError);
}

TEST_CASE("spectrum CSV") {
    const std::vector<SpectrumPoint> pts = {{6.2e9, -2.0}, {6.200259e9, -71.3}};
    std::ostringstream out;
    write_spectrum_csv(out, pts);
    const auto back = from_text(out.str(), parse_spectrum_csv);
    REQUIRE(back.size() == 2);
    CHECK(back[1].frequency_hz == pts[1].frequency_hz);
    CHECK(back[1].power_dbm == pts[1].power_dbm);
    CHECK(from_text("6e9,-3\n", parse_spectrum_csv).size() == 1);  // no header
    CHECK_THROWS_AS(from_text("frequency_hz,power_dbm\n", parse_spectrum_csv), ConfigError);
    CHECK_THROWS_AS(from_text("frequency_hz,power_dbm\n1e9\n", parse_spectrum_csv), ConfigError);
}

TEST_CASE("addition check and trace CSV") {
    SimTrace t;
    t.width = 4;
    t.has_carry_out = true;
    t.inputs = {{3, 4}, {15, 1}, {9, 9}};
    t.sums = {7, 0, 2};
    t.carry_outs = {0, 1, 0};  // last one wrong: 9 + 9 = 18
    t.cycle_events = {5, 6, 7};
    const auto c = check_addition(t);
    CHECK(c.checked == 3);
    CHECK(c.failures == 1);
    CHECK(c.first_failure == 2);
    CHECK_FALSE(c.passed());

    std::ostringstream out;
    write_trace_csv(out, t);
    const std::string csv = out.str();
    CHECK(csv.rfind("cycle,a,b,sum,cout,events\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const auto j = trace_summary(t, c);
    CHECK(j["check"]["failures"] == 1);
    CHECK(j["check"]["first_failure_cycle"] == 2);
    CHECK(j["timed"] == false);
}

TEST_CASE("matched band finds the run around the centre") {
    std::vector<SParamPoint> s(5);
    const double mags[] = {0.5, 0.01, 0.001, 0.02, 0.5};
    for (std::size_t i = 0; i < 5; ++i) {
        s[i].frequency_hz = (i + 1) * 1e9;
        s[i].s11 = mags[i];
    }
    const auto b = matched_band(s, 3e9, 30.0);
    REQUIRE(b.has_value());
    CHECK(b->first == 2e9);
    CHECK(b->second == 4e9);
    CHECK_FALSE(matched_band(s, 1e9, 30.0).has_value());
    CHECK_FALSE(matched_band({}, 1e9, 30.0).has_value());
}

TEST_CASE("write_file reports unwritable paths") {
    CHECK_THROWS_AS(write_file("/nonexistent/dir/out.txt", "x"), IoError);
}
