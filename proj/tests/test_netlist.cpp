#include <doctest.h>

#include <sstream>

#include "rql/adder.hpp"
#include "rql/error.hpp"
#include "rql/netlist.hpp"

using namespace rql;

namespace {

Netlist round_trip(const Netlist& nl) {
    std::stringstream ss;
    write_netlist(ss, nl);
    return read_netlist(ss);
}

// a, b -> AndOr -> AnotB -> sink: a one-bit half adder sum.
Netlist tiny() {
    Netlist nl;
    nl.width = 1;
    const GateId a = nl.add_gate(GateKind::Source, 0, "io", {}, "A0");
    const GateId b = nl.add_gate(GateKind::Source, 0, "io", {}, "B0");
    const GateId ao = nl.add_gate(GateKind::AndOr, 0, "gp", {{a, 0}, {b, 0}});
    const GateId x = nl.add_gate(GateKind::AnotB, 1, "sum", {{ao, kOrPin}, {ao, kAndPin}});
    const GateId s = nl.add_gate(GateKind::Sink, 2, "io", {{x, 0}}, "S0");
    nl.inputs = {a, b};
    nl.outputs = {s};
    return nl;
}

}  // namespace

TEST_CASE("add_gate takes device parameters from the table") {
    const Netlist nl = tiny();
    CHECK(nl.gates.size() == 5);
    CHECK(nl.gate(2).spec == nl.table[GateKind::AndOr]);
    CHECK(nl.gate(3).inputs[1] == PinRef{2, kAndPin});
}

TEST_CASE("topological order respects every edge") {
    const Netlist nl = tiny();
    const auto order = nl.topological_order();
    REQUIRE(order.size() == nl.gates.size());
    std::vector<int> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    for (const auto& g : nl.gates) {
        for (const auto& in : g.inputs) CHECK(pos[static_cast<std::size_t>(in.gate)] < pos[static_cast<std::size_t>(g.id)]);
    }
}

TEST_CASE("cycles and dangling references are structural errors") {
    Netlist nl = tiny();
    nl.gate(2).inputs[0] = {3, 0};  // AndOr reads the AnotB it feeds
    CHECK_THROWS_AS(nl.topological_order(), StructuralError);

    Netlist bad = tiny();
    bad.gate(3).inputs[0] = {42, 0};
    CHECK_THROWS_AS(bad.topological_order(), StructuralError);

    Netlist pin = tiny();
    pin.gate(4).inputs[0] = {3, 1};  // AnotB has one output
    CHECK_THROWS_AS(pin.topological_order(), StructuralError);
}

TEST_CASE("loads index receivers by driving pin") {
    const Netlist nl = tiny();
    const auto loads = nl.loads();
    REQUIRE(loads.size() == nl.gates.size());
    CHECK(loads[2][kOrPin] == std::vector<Load>{{3, 0}});
    CHECK(loads[2][kAndPin] == std::vector<Load>{{3, 1}});
    CHECK(loads[4].empty());
}

TEST_CASE("regions are sorted and unique") {
    CHECK(tiny().regions() == std::vector<std::string>{"gp", "io", "sum"});
}

TEST_CASE("text format round trips hand-built and generated netlists") {
    const Netlist t = tiny();
    CHECK(round_trip(t) == t);

    for (int w : {2, 8, 16}) {
        const Netlist nl = generate_adder({.n_bits = w});
        CHECK(round_trip(nl) == nl);
    }

    AdderOptions o;
    o.ptl_length_um = 123.456789012345;
    o.chip_mode = true;
    const Netlist ptl = generate_adder(o);
    const Netlist back = round_trip(ptl);
    CHECK(back == ptl);

    GateTable table;
    table.set({GateKind::AndOr, 12, 97.123456789, 4});
    const Netlist custom = generate_adder({}, table);
    CHECK(round_trip(custom) == custom);

    const Netlist unassigned = build_kogge_stone({});
    CHECK(round_trip(unassigned) == unassigned);
}

TEST_CASE("writing twice gives identical text") {
    const Netlist nl = generate_adder({});
    std::stringstream a, b;
    write_netlist(a, nl);
    write_netlist(b, round_trip(nl));
    CHECK(a.str() == b.str());
}

TEST_CASE("malformed netlist text is rejected") {
    std::stringstream empty;
    CHECK_THROWS_AS(read_netlist(empty), IoError);

    std::stringstream header("netlist 2\n");
    CHECK_THROWS_AS(read_netlist(header), IoError);

    std::stringstream good;
    write_netlist(good, tiny());
    std::string text = good.str();

    std::string kind = text;
    kind.replace(kind.find("AnotB", kind.find("\ngate ")), 5, "Nand2");
    std::stringstream k(kind);
    CHECK_THROWS_AS(read_netlist(k), IoError);

    std::string cut = text.substr(0, text.rfind("gate ") + 8);
    std::stringstream c(cut);
    CHECK_THROWS(read_netlist(c));
}

TEST_CASE("missing file is an I/O error") {
    CHECK_THROWS_AS(load_netlist("/nonexistent/dir/adder.rqlnet"), IoError);
}
