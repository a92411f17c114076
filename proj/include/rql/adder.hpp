#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rql/netlist.hpp"

namespace rql {

struct AdderOptions {
    int n_bits = 8;
    /// Drop the carry-out and emit only S0..S(n-1), as on the fabricated chip.
    bool chip_mode = false;
    int idle_phases = 1;
    /// Logic stage that the idle phases precede; -1 selects the last CLA column.
    int idle_before_stage = -1;
    int max_fanout = 4;
    /// Length of the long lateral wires into the post-idle column. When
    /// positive they become passive lines instead of delay chains.
    double ptl_length_um = 0.0;
};

bool is_supported_width(int n_bits) noexcept;

/// log2(n_bits) + 2: A/OR, the CLA columns, and the XOR sum.
int logic_stage_count(int n_bits);

StageLayout make_layout(int n_bits, int idle_phases, int idle_before_stage = -1);

/// Radix-2 Kogge-Stone adder at logic-stage granularity. Only carries that
/// reach an output are built; every path that finishes early is padded with
/// Delay cells so each edge spans at most one stage. Phases are unassigned.
Netlist build_kogge_stone(const AdderOptions& options, const GateTable& table = GateTable{});

/// Inserts minimum-depth Split trees so no output pin drives more than
/// max_fanout inputs. Loads are distributed in (gate, input) order.
Netlist legalize_fanout(Netlist netlist, int max_fanout = 4);

/// Maps logic stages onto clock phases and fills the idle phases with Delay
/// cells (or passive-line pairs on the marked long wires).
Netlist assign_phases(Netlist netlist, const StageLayout& layout);

/// build_kogge_stone -> legalize_fanout -> assign_phases.
Netlist generate_adder(const AdderOptions& options, const GateTable& table = GateTable{});

struct Latency {
    int phases = 0;
    double cycles = 0.0;
    double picoseconds = 0.0;
};

Latency latency_for_phases(int phases, double frequency_hz);
Latency latency(const Netlist& netlist, double frequency_hz);

/// Device block that is not part of the netlist (amplifiers, shift register)
/// but shares the chip's clock lines.
struct ExternalBlock {
    std::string region;
    ClockLine line = ClockLine::Q;
    int jj_count = 0;
    double ic_avg_ua = 0.0;
};

struct NetlistStats {
    int gate_count = 0;
    int jj_total = 0;
    double ic_total_ua = 0.0;
    /// Junction-weighted mean critical current; empty when jj_total == 0.
    std::optional<double> ic_avg_ua;
    /// Critical-current sums on the I and Q lines (needs assigned phases).
    std::array<double, 2> line_ic_ua{};
    std::map<std::string, double> region_ic_ua;
    std::map<std::string, double> region_fraction;
    std::map<GateKind, int> kind_counts;
    int max_fanout = 0;

    double line_ic(ClockLine line) const { return line_ic_ua[static_cast<std::size_t>(line)]; }
};

NetlistStats netlist_stats(const Netlist& netlist, std::span<const ExternalBlock> external = {});

/// Region names of the adder's own circuitry (everything but the I/O terminals).
bool is_core_region(const std::string& region);

struct Diagnostic {
    enum class Kind { Reference, Arity, Cycle, Phase, Monotonicity, Fanout, Idle, Annotation };
    Kind kind;
    GateId gate = -1;
    std::string message;
};

std::string_view to_string(Diagnostic::Kind kind) noexcept;

/// Empty iff references, arity, acyclicity, phase monotonicity, idle-phase
/// content, PTL annotations and fanout all check out.
std::vector<Diagnostic> validate(const Netlist& netlist, int max_fanout = 4);

}  // namespace rql
