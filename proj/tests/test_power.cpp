#include <doctest.h>

#include "rql/adder.hpp"
#include "rql/error.hpp"
#include "rql/power.hpp"

using namespace rql;

TEST_CASE("dynamic power oracles") {
    // the measured 8-bit adder operating point
    CHECK(dynamic_power(162e-6, 815, 6.21e9) == doctest::Approx(559.5e-9).epsilon(1e-3));
    CHECK(dynamic_power(162e-6, 815, 6.21e9) == doctest::Approx(560e-9).epsilon(0.01));
    // a two-million-junction chip at 10 GHz
    CHECK(dynamic_power(100e-6, 2e6, 10e9) == doctest::Approx(1.365e-3).epsilon(1e-3));
    CHECK(dynamic_power(100e-6, 2e6, 10e9) == doctest::Approx(1.4e-3).epsilon(0.03));
    CHECK(dynamic_power(0.0, 815, 6.21e9) == 0.0);
    CHECK_THROWS_AS(dynamic_power(-1e-6, 815, 6.21e9), ParameterError);
    CHECK_THROWS_AS(dynamic_power(1e-6, -1, 6.21e9), ParameterError);
}

TEST_CASE("dynamic power is linear in each argument") {
    const double p = dynamic_power(120e-6, 1000, 5e9);
    CHECK(dynamic_power(240e-6, 1000, 5e9) == doctest::Approx(2 * p));
    CHECK(dynamic_power(120e-6, 3000, 5e9) == doctest::Approx(3 * p));
    CHECK(dynamic_power(120e-6, 1000, 20e9) == doctest::Approx(4 * p));
    CHECK(switching_energy(120e-6) * 1000 * 5e9 == doctest::Approx(p));
}

TEST_CASE("a trace that fires every output reproduces the formula") {
    const Netlist nl = generate_adder({});
    const auto loads = nl.loads();
    SimTrace t;
    t.width = 8;
    t.inputs.resize(10);
    t.gate_events.resize(nl.gates.size());
    for (const auto& g : nl.gates) {
        std::uint64_t loaded = 0;
        for (const auto& pin : loads[g.id]) loaded += pin.empty() ? 0 : 1;
        t.gate_events[g.id] = loaded * t.cycles();
    }
    const auto st = netlist_stats(nl);
    const auto p = activity_power(t, nl, 6.21e9);
    CHECK(p.total_w == doctest::Approx(dynamic_power(*st.ic_avg_ua * 1e-6, st.jj_total, 6.21e9)).epsilon(1e-12));
    CHECK(p.per_line_w[0] + p.per_line_w[1] == doctest::Approx(p.total_w));
    CHECK(p.per_line_w[0] > 0.0);
    CHECK(p.per_line_w[1] > 0.0);
}

TEST_CASE("chopping the data to half duty roughly halves the power") {
    const Netlist nl = generate_adder({});
    const auto full_prog = prbs_bits(0xACE1, 24000);
    const auto chop = chopped_prbs(0xACE1, 1200, 1200, 10);
    const auto pf = activity_power(simulate_logic(nl, shift_register_harness(full_prog)), nl, 6.2e9);
    const auto pc = activity_power(simulate_logic(nl, shift_register_harness(chop.serial_bits)), nl, 6.2e9);
    CHECK(pf.total_w > 0.0);
    CHECK(pc.total_w / pf.total_w == doctest::Approx(0.5).epsilon(0.05));
    // random data keeps well below the every-output-fires bound
    const auto st = netlist_stats(nl);
    CHECK(pf.total_w < dynamic_power(*st.ic_avg_ua * 1e-6, st.jj_total, 6.2e9));
}

TEST_CASE("activity power argument checks") {
    const Netlist nl = generate_adder({});
    const auto t = simulate_logic(nl, std::vector<AdderVector>(4));
    CHECK(activity_power(t, nl, 1e9).total_w == 0.0);
    CHECK_THROWS_AS(activity_power(t, nl, 0.0), ParameterError);
    const Netlist other = generate_adder({.n_bits = 4});
    CHECK_THROWS_AS(activity_power(t, other, 1e9), ParameterError);
    CHECK(activity_power(SimTrace{.gate_events = t.gate_events}, nl, 1e9).cycles == 0);
}

TEST_CASE("measured power splits over regions") {
    const auto r = attribute_power({{"Q", 961e-9}, {"I", 277e-9}}, {{"cla", 0.42}, {"amp", 0.3}});
    CHECK(r.p_dynamic_w == doctest::Approx(1.238e-6));
    CHECK(r.per_line_w.at("Q") == 961e-9);
    CHECK(r.per_region_w.at("cla") == doctest::Approx(0.42 * 1.238e-6));
    CHECK(r.region_fraction.at("amp") == 0.3);
    CHECK_THROWS_AS(attribute_power({{"Q", 1.0}}, {{"x", 1.2}}), ParameterError);
    CHECK_THROWS_AS(attribute_power({{"Q", 1.0}}, {{"x", -0.1}}), ParameterError);
    CHECK_THROWS_AS(attribute_power({{"Q", 1.0}}, {{"x", 0.6}, {"y", 0.6}}), ParameterError);
}

TEST_CASE("clock budget for a two-million-junction chip") {
    const auto b = clock_budget(ScalingScenario{});
    CHECK(b.p_dissipated_w == doctest::Approx(1.365e-3).epsilon(1e-3));
    CHECK(b.p_applied_w == doctest::Approx(4.129e-3).epsilon(1e-3));
    CHECK(b.line_current_rms_a == doctest::Approx(9.087e-3).epsilon(1e-3));
    CHECK(b.line_current_rms_a == doctest::Approx(9e-3).epsilon(0.02));
    CHECK(b.timing_variation_ps == doctest::Approx(4.848).epsilon(1e-3));
    // 4 mW on 50 ohm
    CHECK(line_current_rms(4e-3, 50.0) == doctest::Approx(8.944e-3).epsilon(1e-3));
}

TEST_CASE("applied power grows as the tolerated excursion shrinks") {
    double prev = 0.0;
    for (double m : {0.5, 0.3, 0.2, 0.1, 0.05}) {
        const double p = applied_power_for(1.0, m);
        CHECK(p > 1.0);
        CHECK(p > prev);
        prev = p;
    }
    CHECK_THROWS_AS(applied_power_for(1.0, 0.0), ParameterError);
    CHECK_THROWS_AS(applied_power_for(1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(line_current_rms(-1.0, 50.0), ParameterError);
    CHECK_THROWS_AS(line_current_rms(1.0, 0.0), ParameterError);
}

TEST_CASE("scenario validation") {
    CHECK_NOTHROW(check_scenario(ScalingScenario{}));
    ScalingScenario s;
    s.n_devices = 0;
    CHECK_THROWS_AS(check_scenario(s), ParameterError);
    s = {};
    s.margin_frac = 1.5;
    CHECK_THROWS_AS(clock_budget(s), ParameterError);
    s = {};
    s.phase_chain_junctions = 0;
    CHECK_THROWS_AS(check_scenario(s), ParameterError);
}

TEST_CASE("clock feed and static comparison") {
    CHECK(clock_feed_current_rms(8, 2e-3, 32.0, 50.0) == doctest::Approx(3.2e-3).epsilon(1e-9));
    CHECK(clock_feed_current_rms(1, 0.0, 32.0, 50.0) == 0.0);
    CHECK_THROWS_AS(clock_feed_current_rms(0, 2e-3, 32.0, 50.0), ParameterError);
    CHECK_THROWS_AS(clock_feed_current_rms(8, 2e-3, 0.0, 50.0), ParameterError);
    CHECK(rsfq_static_equivalent() == doctest::Approx(520e-9));
}
