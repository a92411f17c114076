#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rql/core.hpp"

namespace rql {

using GateId = int;

/// One output pin of a gate; a net is identified by its driving pin.
struct PinRef {
    GateId gate = -1;
    std::uint8_t pin = 0;

    friend bool operator==(const PinRef&, const PinRef&) = default;
    friend auto operator<=>(const PinRef&, const PinRef&) = default;
};

struct Gate {
    GateId id = -1;
    GateSpec spec;
    /// Logic stage of the adder (0 = A/OR, last = XOR sum). Idle-phase cells
    /// carry -1.
    int stage = 0;
    /// Assigned clock phase, -1 until assign_phases runs.
    int phase = -1;
    std::string region;
    std::string name;
    std::vector<PinRef> inputs;
    /// Index of an input that is a long lateral wire eligible for a passive
    /// line, -1 if none.
    int long_input = -1;
    /// Physical length of the passive line driven by a PtlDriver.
    double ptl_length_um = 0.0;

    GateKind kind() const noexcept { return spec.kind; }

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// Stage-to-phase map of a wave-pipelined adder.
struct StageLayout {
    int n_bits = 8;
    int n_logic_stages = 5;
    int idle_phases = 0;
    /// Idle phases are inserted in front of this logic stage.
    int idle_before_stage = 0;

    int total_phases() const noexcept { return n_logic_stages + idle_phases; }
    int phase_of_stage(int stage) const noexcept {
        return stage >= idle_before_stage ? stage + idle_phases : stage;
    }

    friend bool operator==(const StageLayout&, const StageLayout&) = default;
};

/// Receivers of one output pin: (gate, input index).
struct Load {
    GateId gate = -1;
    std::size_t input = 0;

    friend bool operator==(const Load&, const Load&) = default;
};

class Netlist {
public:
    int width = 0;
    bool chip_mode = false;
    bool phases_assigned = false;
    double ptl_length_um = 0.0;
    StageLayout layout;
    GateTable table;
    std::vector<Gate> gates;
    /// Source gate ids, A0..A(n-1) then B0..B(n-1).
    std::vector<GateId> inputs;
    /// Sink gate ids, S0..S(n-1) then optionally Cout.
    std::vector<GateId> outputs;

    /// Appends a gate whose device parameters come from the netlist table.
    GateId add_gate(GateKind kind, int stage, std::string region,
                    std::vector<PinRef> inputs = {}, std::string name = {});

    const Gate& gate(GateId id) const { return gates.at(static_cast<std::size_t>(id)); }
    Gate& gate(GateId id) { return gates.at(static_cast<std::size_t>(id)); }

    /// loads()[g][pin] lists every input driven by that pin.
    std::vector<std::vector<std::vector<Load>>> loads() const;

    /// Kahn order; throws StructuralError on a cycle or a dangling reference.
    std::vector<GateId> topological_order() const;

    /// Sorted, de-duplicated region names.
    std::vector<std::string> regions() const;

    bool has_carry_out() const noexcept { return outputs.size() > static_cast<std::size_t>(width); }

    friend bool operator==(const Netlist&, const Netlist&) = default;
};

/// Text format, one record per line:
///
///   rqlnet 1
///   width <n> chip <0|1> ptl <um>
///   layout <n_bits> <logic_stages> <idle_phases> <idle_before> <assigned 0|1>
///   regions <name>...
///   spec <kind> <jj_count> <ic_avg_ua> <seq_depth>          (one per kind)
///   gate <id> <kind> <phase> <stage> <region> <jj> <ic> <seq> <long_input>
///        <ptl_um> <name|-> <n_inputs> <gate.pin>...
///   inputs <id>...
///   outputs <id>...
///
/// Floating-point fields are written with round-trip precision.
void write_netlist(std::ostream& out, const Netlist& netlist);
Netlist read_netlist(std::istream& in);

void save_netlist(const std::string& path, const Netlist& netlist);
Netlist load_netlist(const std::string& path);

}  // namespace rql
