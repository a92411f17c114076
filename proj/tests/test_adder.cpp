#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "rql/adder.hpp"
#include "rql/error.hpp"
#include "rql/wavesim.hpp"

using namespace rql;

namespace {

std::vector<AdderVector> all_pairs(int width) {
    std::vector<AdderVector> v;
    for (std::uint64_t a = 0; a < (1ULL << width); ++a) {
        for (std::uint64_t b = 0; b < (1ULL << width); ++b) v.push_back({a, b});
    }
    return v;
}

std::size_t addition_failures(const Netlist& nl, std::span<const AdderVector> v) {
    const auto t = simulate_logic(nl, v);
    const std::uint64_t mask = nl.width >= 64 ? ~0ULL : (1ULL << nl.width) - 1;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::uint64_t s = v[i].a + v[i].b;
        bool ok = t.sums[i] == (s & mask);
        const std::uint64_t carry = nl.width == 64 ? (s < v[i].a ? 1U : 0U) : (s >> nl.width) & 1U;
        if (t.has_carry_out) ok = ok && t.carry_outs[i] == carry;
        bad += !ok;
    }
    return bad;
}

int max_pin_fanout(const Netlist& nl) {
    int m = 0;
    for (const auto& pins : nl.loads()) {
        for (const auto& l : pins) m = std::max(m, static_cast<int>(l.size()));
    }
    return m;
}

int count_kind(const Netlist& nl, GateKind k) {
    return static_cast<int>(std::count_if(nl.gates.begin(), nl.gates.end(), [&](const Gate& g) { return g.kind() == k; }));
}

}  // namespace

TEST_CASE("supported widths and stage counts") {
    for (int w : {2, 4, 8, 16, 32, 64}) CHECK(is_supported_width(w));
    for (int w : {0, 1, 3, 6, 12, 128, -8}) CHECK_FALSE(is_supported_width(w));
    CHECK(logic_stage_count(2) == 3);
    CHECK(logic_stage_count(8) == 5);
    CHECK(logic_stage_count(64) == 8);
    CHECK_THROWS_AS(logic_stage_count(6), ParameterError);
    CHECK_THROWS_AS(build_kogge_stone({.n_bits = 12}), ParameterError);
}

TEST_CASE("layout places idle phases before the last carry column by default") {
    const auto l = make_layout(8, 1);
    CHECK(l.n_logic_stages == 5);
    CHECK(l.idle_before_stage == 3);
    CHECK(l.total_phases() == 6);
    CHECK(l.phase_of_stage(2) == 2);
    CHECK(l.phase_of_stage(3) == 4);
    CHECK(l.phase_of_stage(4) == 5);
    CHECK_THROWS_AS(make_layout(8, 1, 0), ParameterError);
    CHECK_THROWS_AS(make_layout(8, 1, 5), ParameterError);
    CHECK_THROWS_AS(make_layout(8, -1), ParameterError);
}

TEST_CASE("2-bit adder: three stages and exhaustive addition") {
    const Netlist nl = generate_adder({.n_bits = 2, .idle_phases = 0});
    CHECK(nl.layout.n_logic_stages == 3);
    CHECK(nl.inputs.size() == 4);
    CHECK(nl.outputs.size() == 3);
    CHECK(latency(nl, 10e9).phases == 3);
    CHECK(validate(nl).empty());
    const auto v = all_pairs(2);
    CHECK(addition_failures(nl, v) == 0);
}

TEST_CASE("default 8-bit adder budget") {
    const Netlist nl = generate_adder({});
    const auto st = netlist_stats(nl);
    CHECK(st.jj_total == 815);
    REQUIRE(st.ic_avg_ua.has_value());
    CHECK(*st.ic_avg_ua == doctest::Approx(162.0));
    CHECK(st.max_fanout <= 4);
    CHECK(nl.has_carry_out());
    CHECK(latency(nl, 10e9).phases == 6);
    CHECK(validate(nl).empty());
}

TEST_CASE("chip mode drops the carry-out and its cone") {
    const Netlist full = generate_adder({});
    const Netlist chip = generate_adder({.chip_mode = true});
    CHECK_FALSE(chip.has_carry_out());
    CHECK(chip.outputs.size() == 8);
    CHECK(netlist_stats(chip).jj_total < netlist_stats(full).jj_total);
    CHECK(validate(chip).empty());
    const auto v = all_pairs(8);
    CHECK(addition_failures(chip, v) == 0);
}

TEST_CASE("generation is deterministic") {
    CHECK(generate_adder({.n_bits = 16}) == generate_adder({.n_bits = 16}));
}

TEST_CASE("every configuration validates and adds correctly") {
    std::mt19937_64 rng(11);
    for (int w : {2, 4, 8, 16, 32, 64}) {
        for (int idle : {0, 1, 2}) {
            for (bool chip : {false, true}) {
                for (double ptl : {0.0, 800.0}) {
                    CAPTURE(w);
                    CAPTURE(idle);
                    CAPTURE(chip);
                    CAPTURE(ptl);
                    if (ptl > 0.0 && idle == 0) continue;
                    const Netlist nl = generate_adder({.n_bits = w, .chip_mode = chip, .idle_phases = idle,
                                                       .ptl_length_um = ptl});
                    CHECK(validate(nl).empty());
                    CHECK(latency(nl, 10e9).phases == logic_stage_count(w) + idle);
                    const std::uint64_t mask = w == 64 ? ~0ULL : (1ULL << w) - 1;
                    std::vector<AdderVector> v(512);
                    for (auto& x : v) x = {rng() & mask, rng() & mask};
                    CHECK(addition_failures(nl, v) == 0);
                }
            }
        }
    }
}

TEST_CASE("a pin with five loads gets exactly one splitter") {
    Netlist nl;
    nl.width = 1;
    const GateId a = nl.add_gate(GateKind::Source, 0, "io", {}, "A0");
    nl.inputs = {a};
    for (int i = 0; i < 5; ++i) nl.outputs.push_back(nl.add_gate(GateKind::Sink, 1, "io", {{a, 0}}));
    const Netlist leg = legalize_fanout(nl, 4);
    CHECK(count_kind(leg, GateKind::Split) == 1);
    CHECK(max_pin_fanout(leg) <= 4);
    // every sink still traces back to the source
    for (GateId s : leg.outputs) {
        GateId g = s;
        while (leg.gate(g).kind() != GateKind::Source) g = leg.gate(g).inputs[0].gate;
        CHECK(g == a);
    }
}

TEST_CASE("fanout legalization: tighter limits still add correctly") {
    const Netlist raw = build_kogge_stone({});
    CHECK(max_pin_fanout(raw) > 2);
    const auto v = all_pairs(8);
    for (int f : {2, 3, 4}) {
        CAPTURE(f);
        Netlist nl = assign_phases(legalize_fanout(raw, f), make_layout(8, 1));
        CHECK(max_pin_fanout(nl) <= f);
        CHECK(validate(nl, f).empty());
        CHECK(addition_failures(nl, v) == 0);
    }
    CHECK_THROWS_AS(legalize_fanout(raw, 1), ParameterError);
}

TEST_CASE("phase assignment runs once") {
    const Netlist nl = generate_adder({});
    CHECK_THROWS_AS(assign_phases(nl, nl.layout), StructuralError);
}

TEST_CASE("validate reports each broken invariant") {
    using K = Diagnostic::Kind;
    auto has = [](const std::vector<Diagnostic>& d, K k) {
        return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.kind == k; });
    };
    const Netlist good = generate_adder({});

    SUBCASE("phase skip") {
        Netlist nl = good;
        auto it = std::find_if(nl.gates.begin(), nl.gates.end(), [](const Gate& g) { return g.kind() == GateKind::Sink; });
        it->phase += 3;
        CHECK(has(validate(nl), K::Monotonicity));
    }
    SUBCASE("backwards edge") {
        Netlist nl = good;
        auto it = std::find_if(nl.gates.begin(), nl.gates.end(), [](const Gate& g) { return g.stage == 4 && g.kind() == GateKind::AnotB; });
        it->phase = 0;
        CHECK(has(validate(nl), K::Monotonicity));
    }
    SUBCASE("logic in an idle phase") {
        Netlist nl = good;
        auto it = std::find_if(nl.gates.begin(), nl.gates.end(), [](const Gate& g) { return g.stage == 3 && g.kind() == GateKind::AndOr; });
        it->phase = nl.layout.idle_before_stage;
        CHECK(has(validate(nl), K::Idle));
    }
    SUBCASE("fanout") {
        const auto d = validate(good, 2);
        CHECK(has(d, K::Fanout));
    }
    SUBCASE("arity") {
        Netlist nl = good;
        auto it = std::find_if(nl.gates.begin(), nl.gates.end(), [](const Gate& g) { return g.kind() == GateKind::AndOr; });
        it->inputs.pop_back();
        CHECK(has(validate(nl), K::Arity));
    }
    SUBCASE("reference") {
        Netlist nl = good;
        nl.gates.back().inputs[0].gate = 100000;
        CHECK(has(validate(nl), K::Reference));
    }
    SUBCASE("cycle") {
        // a delay cell and its non-terminal driver read each other
        Netlist nl = good;
        auto it = std::find_if(nl.gates.begin(), nl.gates.end(), [&](const Gate& g) {
            return g.kind() == GateKind::Delay && nl.gate(g.inputs[0].gate).kind() != GateKind::Source;
        });
        REQUIRE(it != nl.gates.end());
        nl.gate(it->inputs[0].gate).inputs[0] = {it->id, 0};
        CHECK(has(validate(nl), K::Cycle));
    }
    SUBCASE("unassigned phases") {
        CHECK(has(validate(build_kogge_stone({})), K::Phase));
    }
    SUBCASE("passive line without a length") {
        Netlist nl = generate_adder({.ptl_length_um = 500.0});
        auto it = std::find_if(nl.gates.begin(), nl.gates.end(), [](const Gate& g) { return g.kind() == GateKind::PtlDriver; });
        REQUIRE(it != nl.gates.end());
        it->ptl_length_um = 0.0;
        CHECK(has(validate(nl), K::Annotation));
    }
}

TEST_CASE("latency arithmetic") {
    const auto six = latency_for_phases(6, 10e9);
    CHECK(six.cycles == 1.5);
    CHECK(six.picoseconds == doctest::Approx(150.0));
    CHECK(latency_for_phases(5, 10e9).cycles == 1.25);
    const auto wide = latency_for_phases(logic_stage_count(64), 20e9);
    CHECK(wide.cycles == 2.0);
    CHECK(wide.picoseconds == doctest::Approx(100.0));
    CHECK(latency(generate_adder({.n_bits = 64, .idle_phases = 0}), 20e9).picoseconds == doctest::Approx(100.0));
    CHECK_THROWS_AS(latency_for_phases(6, 0.0), ParameterError);
    CHECK_THROWS_AS(latency(build_kogge_stone({}), 10e9), StructuralError);
}

TEST_CASE("statistics are consistent") {
    const Netlist nl = generate_adder({});
    const auto st = netlist_stats(nl);
    int jj = 0;
    double ic = 0.0;
    for (const auto& g : nl.gates) {
        jj += g.spec.jj_count;
        ic += g.spec.jj_count * g.spec.ic_avg_ua;
    }
    CHECK(st.jj_total == jj);
    CHECK(st.ic_total_ua == doctest::Approx(ic));
    CHECK(st.line_ic(ClockLine::I) + st.line_ic(ClockLine::Q) == doctest::Approx(ic));
    double frac = 0.0;
    for (const auto& [r, f] : st.region_fraction) frac += f;
    CHECK(frac == doctest::Approx(1.0));
    CHECK(st.region_fraction.at("cla") > 0.0);
    CHECK(st.region_fraction.at("io") == 0.0);
    CHECK(st.gate_count == static_cast<int>(nl.gates.size()));

    const ExternalBlock amp{"amp", ClockLine::Q, 100, 200.0};
    const auto ext = netlist_stats(nl, std::span(&amp, 1));
    CHECK(ext.jj_total == jj + 100);
    CHECK(ext.line_ic(ClockLine::Q) == doctest::Approx(st.line_ic(ClockLine::Q) + 20000.0));
    CHECK(ext.region_fraction.at("amp") == doctest::Approx(20000.0 / (ic + 20000.0)));

    CHECK(is_core_region("cla"));
    CHECK_FALSE(is_core_region("io"));
}

TEST_CASE("empty netlist has no average critical current") {
    Netlist nl;
    const auto st = netlist_stats(nl);
    CHECK(st.jj_total == 0);
    CHECK_FALSE(st.ic_avg_ua.has_value());
}
