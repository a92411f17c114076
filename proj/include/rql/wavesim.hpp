#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rql/netlist.hpp"

namespace rql {

/// One addend pair applied in one clock cycle.
struct AdderVector {
    std::uint64_t a = 0;
    std::uint64_t b = 0;

    friend bool operator==(const AdderVector&, const AdderVector&) = default;
};

struct TimingViolation {
    GateId gate = -1;
    int phase = 0;
    double arrival_ps = 0.0;
    double window_ps = 0.0;
};

/// Static arrival analysis of one phase-assigned netlist at one clock point.
struct TimingReport {
    /// Per gate: time after the start of its phase at which its output
    /// settles, assuming inputs from the previous phase launch at 0.
    std::vector<double> arrival_ps;
    std::vector<TimingViolation> violations;
    double worst_arrival_ps = 0.0;
    /// Longest junction count on any single-phase path.
    int worst_path_junctions = 0;
};

/// Per-node arrivals: sum of seq_depth x junction_delay(bias) along the
/// in-phase path, plus length / (100 um/ps) on passive lines. Ordinary cells
/// must settle within T/4; PTL receivers get T/4 + receiver_window_frac x T.
TimingReport analyze_timing(const Netlist& netlist, const ClockConfig& clock,
                            double d0_ps = kNominalJunctionDelayPs);

inline constexpr double kPtlSpeedUmPerPs = 100.0;

struct SimTrace {
    int width = 0;
    bool has_carry_out = false;
    /// Cycles between applying a vector and its sum leaving the last phase.
    int latency_cycles = 0;
    std::vector<AdderVector> inputs;
    std::vector<std::uint64_t> sums;
    std::vector<std::uint8_t> carry_outs;
    /// Logical ones emitted per gate, summed over all cycles (one event per
    /// loaded output pin per cycle).
    std::vector<std::uint64_t> gate_events;
    /// Events per input cycle, summed over gates.
    std::vector<std::uint64_t> cycle_events;
    /// Present in timed mode only.
    std::optional<std::vector<double>> arrival_ps;
    std::vector<TimingViolation> violations;

    std::size_t cycles() const noexcept { return inputs.size(); }
    long long output_cycle(std::size_t input_cycle) const noexcept {
        return static_cast<long long>(input_cycle) + latency_cycles;
    }
    std::uint64_t total_events() const noexcept;
};

/// Cycle-accurate logical simulation. Each vector enters at its own cycle
/// and emerges latency_cycles later; values equal combinational evaluation.
SimTrace simulate_logic(const Netlist& netlist, std::span<const AdderVector> vectors);

/// Logical simulation plus static timing. A cell that misses its window
/// emits nothing in that cycle, so violations show up as wrong sums.
SimTrace simulate_timed(const Netlist& netlist, const ClockConfig& clock,
                        std::span<const AdderVector> vectors,
                        double d0_ps = kNominalJunctionDelayPs);

/// Taps of a 2*width-stage serial shift register: A_i from stage i, B_i from
/// stage 2*width-1-i, stage k holding the bit shifted in k cycles ago. The
/// serial program repeats, so cycle t reads serial[(t - k) mod length].
/// cycles == 0 yields one pair per serial bit.
std::vector<AdderVector> shift_register_harness(std::span<const std::uint8_t> serial,
                                                std::size_t cycles = 0, int width = 8);

/// 16-bit Galois LFSR with feedback mask 0xB400 (x^16 + x^14 + x^13 + x^11 + 1),
/// maximal length 65535. Emits the low bit before each shift.
class Lfsr16 {
public:
    explicit Lfsr16(std::uint16_t seed);

    bool next() noexcept;
    std::uint16_t state() const noexcept { return state_; }

private:
    std::uint16_t state_;
};

std::vector<std::uint8_t> prbs_bits(std::uint16_t seed, std::size_t count);

/// Serial program, optionally chopped into alternating pseudo-random and
/// all-zero blocks.
struct InputProgram {
    std::vector<std::uint8_t> serial_bits;
    std::optional<std::pair<std::size_t, std::size_t>> chop;  // (active_len, zero_len)
};

/// `periods` repetitions of active_len LFSR bits followed by zero_len zeros.
InputProgram chopped_prbs(std::uint16_t seed, std::size_t active_len, std::size_t zero_len,
                          std::size_t periods = 1);

/// Clock-power ceiling (relative current) at which over-bias failure sets
/// in. Calibrated once so the default 8-bit adder has a 4.6 dB margin at
/// 10 GHz; not a prediction of the model.
inline constexpr double kDefaultBiasCeiling = 1.6303139063630163;

struct MarginOptions {
    double bias_ceiling = kDefaultBiasCeiling;
    double receiver_window_frac = 0.0417;
    double d0_ps = kNominalJunctionDelayPs;
};

struct MarginPoint {
    double frequency_hz = 0.0;
    double bias_min = 0.0;
    double bias_max = 0.0;
    double lower_db = 0.0;
    double upper_db = 0.0;
    double width_db = 0.0;
    bool operable = false;
};

struct MarginCurve {
    std::vector<MarginPoint> points;
};

/// Smallest bias in (lo, hi] with zero violations, by bisection on the
/// monotone pass/fail predicate. Empty if hi itself fails.
std::optional<double> min_passing_bias(const Netlist& netlist, double frequency_hz, double lo,
                                       double hi, const MarginOptions& options = {});

/// Lower limit: smallest grid bias with zero violations, refined between
/// the last failing and first passing grid points. Upper limit: the fixed
/// over-bias ceiling. Limits in dB are 20 log10(bias).
MarginCurve margin_sweep(const Netlist& netlist, std::span<const double> frequencies_hz,
                         std::span<const double> bias_grid, const MarginOptions& options = {});

/// Ceiling that makes the margin at frequency_hz exactly target_width_db.
double calibrate_bias_ceiling(const Netlist& netlist, double frequency_hz, double target_width_db,
                              const MarginOptions& options = {});

struct Activity {
    std::vector<std::uint64_t> per_gate;
    std::uint64_t total = 0;
};

Activity switching_activity(const SimTrace& trace);

}  // namespace rql
