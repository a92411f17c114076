#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rql {

/// RQL cell kinds. AndOr and AnotB are the only logic primitives; the rest
/// are active interconnect, passive-line endpoints, and netlist terminals.
enum class GateKind : std::uint8_t {
    AndOr,
    AnotB,
    Split,
    Delay,
    PtlDriver,
    PtlReceiver,
    Source,
    Sink,
};

inline constexpr std::size_t kGateKindCount = 8;

inline constexpr std::array<GateKind, kGateKindCount> kAllGateKinds = {
    GateKind::AndOr,     GateKind::AnotB,       GateKind::Split,  GateKind::Delay,
    GateKind::PtlDriver, GateKind::PtlReceiver, GateKind::Source, GateKind::Sink,
};

std::string_view to_string(GateKind kind) noexcept;
std::optional<GateKind> parse_gate_kind(std::string_view name) noexcept;

std::size_t input_count(GateKind kind) noexcept;
std::size_t output_count(GateKind kind) noexcept;

// Output pin numbering.
inline constexpr std::uint8_t kOrPin = 0;
inline constexpr std::uint8_t kAndPin = 1;

/// Device budget of one cell: junction count, average critical current (uA)
/// and the number of junctions on its input-to-output path.
struct GateSpec {
    GateKind kind = GateKind::Source;
    int jj_count = 0;
    double ic_avg_ua = 0.0;
    int seq_depth = 0;

    friend bool operator==(const GateSpec&, const GateSpec&) = default;
};

/// Throws ConfigError if a gate spec breaks the device-budget invariants.
void check_gate_spec(const GateSpec& spec);

/// Per-kind device parameters. Defaults put the generated 8-bit adder at
/// 815 junctions of 162 uA.
class GateTable {
public:
    GateTable();

    static GateTable defaults() { return GateTable{}; }

    const GateSpec& operator[](GateKind kind) const noexcept {
        return specs_[static_cast<std::size_t>(kind)];
    }

    /// Replaces the entry for spec.kind after validating it.
    void set(const GateSpec& spec);

    friend bool operator==(const GateTable&, const GateTable&) = default;

private:
    std::array<GateSpec, kGateKindCount> specs_;
};

enum class ClockLine : std::uint8_t { I, Q };

std::string_view to_string(ClockLine line) noexcept;

/// One quarter-cycle of the four-phase clock. Phases 0 and 2 ride the
/// in-phase line (positive, negative half-wave), 1 and 3 the quadrature line.
struct PhaseSlot {
    int index = 0;
    int cycle = 0;
    int phase_in_cycle = 0;
    ClockLine line = ClockLine::I;
    int polarity = +1;

    static PhaseSlot from_index(int index);

    friend bool operator==(const PhaseSlot&, const PhaseSlot&) = default;
};

struct ClockConfig {
    double frequency_hz = 10e9;
    double bias_rel = 1.0;
    /// Extra acceptance time, as a fraction of the period, granted to PTL
    /// receivers beyond the quarter-period phase window.
    double receiver_window_frac = 0.0417;

    double period_ps() const noexcept { return 1e12 / frequency_hz; }
};

void check_clock(const ClockConfig& clock);

inline constexpr double kNominalJunctionDelayPs = 3.0;

/// Bias-dependent delay of one junction: d0 / bias_rel.
double junction_delay(double bias_rel, double d0_ps = kNominalJunctionDelayPs);

/// Spread of an n-junction chain delay between the low and high bias limits.
double chain_delay_spread(int junctions, double bias_lo, double bias_hi,
                          double d0_ps = kNominalJunctionDelayPs);

struct GateBudget {
    int jj_count = 0;
    double ic_total_ua = 0.0;
};

GateBudget gate_budget(const GateSpec& spec) noexcept;

/// Bit-parallel cell evaluation: each bit lane is an independent clock
/// cycle. Returns output words indexed by output pin.
std::array<std::uint64_t, 2> eval_gate_word(GateKind kind,
                                            std::span<const std::uint64_t> inputs);

/// Logical truth table of a cell. Throws StructuralError on arity mismatch.
std::vector<bool> eval_gate(GateKind kind, std::span<const bool> inputs);

/// XOR built from an AndOr feeding an AnotB: AnotB(Or(a,b), And(a,b)).
bool xor_composite(bool a, bool b);

}  // namespace rql
