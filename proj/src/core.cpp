#include "rql/core.hpp"

#include <cmath>
#include <string>

#include "rql/error.hpp"

namespace rql {

namespace {

constexpr std::array<std::string_view, kGateKindCount> kKindNames = {
    "AndOr", "AnotB", "Split", "Delay", "PtlDriver", "PtlReceiver", "Source", "Sink",
};

std::size_t kind_index(GateKind kind) noexcept { return static_cast<std::size_t>(kind); }

}  // namespace

std::string_view to_string(GateKind kind) noexcept { return kKindNames[kind_index(kind)]; }

std::optional<GateKind> parse_gate_kind(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kGateKindCount; ++i) {
        if (kKindNames[i] == name) return kAllGateKinds[i];
    }
    return std::nullopt;
}

std::size_t input_count(GateKind kind) noexcept {
    switch (kind) {
        case GateKind::AndOr:
        case GateKind::AnotB:
            return 2;
        case GateKind::Source:
            return 0;
        default:
            return 1;
    }
}

std::size_t output_count(GateKind kind) noexcept {
    switch (kind) {
        case GateKind::AndOr:
        case GateKind::Split:
            return 2;
        case GateKind::Sink:
            return 0;
        default:
            return 1;
    }
}

void check_gate_spec(const GateSpec& spec) {
    const std::string name{to_string(spec.kind)};
    if (spec.jj_count < 0 || spec.seq_depth < 0) {
        throw ConfigError(name + ": junction counts must be non-negative");
    }
    if (spec.seq_depth > spec.jj_count) {
        throw ConfigError(name + ": seq_depth exceeds jj_count");
    }
    if (spec.jj_count > 0 && !(spec.ic_avg_ua > 0.0)) {
        throw ConfigError(name + ": ic_avg must be positive for a cell with junctions");
    }
    if (spec.kind == GateKind::PtlReceiver && spec.seq_depth < 1) {
        throw ConfigError("PtlReceiver: seq_depth must be at least 1");
    }
    if ((spec.kind == GateKind::Source || spec.kind == GateKind::Sink) && spec.jj_count != 0) {
        throw ConfigError(name + ": terminals carry no junctions");
    }
}

GateTable::GateTable() {
    // jj_count, ic_avg (uA), seq_depth. With these counts the default 8-bit
    // adder (carry-out, one idle phase) holds 815 junctions. AndOr and AnotB
    // each put four junctions on the signal path, so two logic levels fill
    // the eight junctions available per phase at 10 GHz.
    specs_ = {
        GateSpec{GateKind::AndOr, 10, 162.0, 4},
        GateSpec{GateKind::AnotB, 9, 162.0, 4},
        GateSpec{GateKind::Split, 2, 162.0, 2},
        GateSpec{GateKind::Delay, 2, 162.0, 2},
        GateSpec{GateKind::PtlDriver, 2, 162.0, 2},
        GateSpec{GateKind::PtlReceiver, 2, 162.0, 2},
        GateSpec{GateKind::Source, 0, 0.0, 0},
        GateSpec{GateKind::Sink, 0, 0.0, 0},
    };
}

void GateTable::set(const GateSpec& spec) {
    check_gate_spec(spec);
    specs_[kind_index(spec.kind)] = spec;
}

std::string_view to_string(ClockLine line) noexcept { return line == ClockLine::I ? "I" : "Q"; }

PhaseSlot PhaseSlot::from_index(int index) {
    if (index < 0) throw StructuralError("phase index must be non-negative");
    PhaseSlot slot;
    slot.index = index;
    slot.cycle = index / 4;
    slot.phase_in_cycle = index % 4;
    slot.line = (slot.phase_in_cycle % 2 == 0) ? ClockLine::I : ClockLine::Q;
    slot.polarity = (slot.phase_in_cycle < 2) ? +1 : -1;
    return slot;
}

void check_clock(const ClockConfig& clock) {
    if (!(clock.frequency_hz > 0.0)) throw ParameterError("clock frequency must be positive");
    if (!(clock.bias_rel > 0.0)) throw DomainError("clock bias must be positive");
    if (!(clock.receiver_window_frac >= 0.0 && clock.receiver_window_frac <= 0.25)) {
        throw ParameterError("receiver_window_frac must lie in [0, 0.25]");
    }
}

double junction_delay(double bias_rel, double d0_ps) {
    if (!(bias_rel > 0.0)) throw DomainError("junction_delay: bias must be positive");
    return d0_ps / bias_rel;
}

double chain_delay_spread(int junctions, double bias_lo, double bias_hi, double d0_ps) {
    if (junctions < 0 || bias_lo > bias_hi) {
        throw ParameterError("chain_delay_spread needs junctions >= 0 and bias_lo <= bias_hi");
    }
    return junctions * (junction_delay(bias_lo, d0_ps) - junction_delay(bias_hi, d0_ps));
}

GateBudget gate_budget(const GateSpec& spec) noexcept {
    return {spec.jj_count, spec.jj_count * spec.ic_avg_ua};
}

std::array<std::uint64_t, 2> eval_gate_word(GateKind kind,
                                            std::span<const std::uint64_t> in) {
    if (in.size() != input_count(kind)) {
        throw StructuralError(std::string(to_string(kind)) + ": expected " +
                              std::to_string(input_count(kind)) + " inputs, got " +
                              std::to_string(in.size()));
    }
    switch (kind) {
        case GateKind::AndOr:
            return {in[0] | in[1], in[0] & in[1]};
        case GateKind::AnotB:
            return {in[0] & ~in[1], 0};
        case GateKind::Split:
            return {in[0], in[0]};
        case GateKind::Delay:
        case GateKind::PtlDriver:
        case GateKind::PtlReceiver:
        case GateKind::Sink:
            return {in[0], 0};
        case GateKind::Source:
            return {0, 0};
    }
    return {0, 0};
}

std::vector<bool> eval_gate(GateKind kind, std::span<const bool> inputs) {
    std::array<std::uint64_t, 2> words{};
    if (inputs.size() > words.size()) {
        throw StructuralError(std::string(to_string(kind)) + ": too many inputs");
    }
    for (std::size_t i = 0; i < inputs.size(); ++i) words[i] = inputs[i] ? 1u : 0u;
    const auto out = eval_gate_word(kind, std::span(words.data(), inputs.size()));
    std::vector<bool> bits(output_count(kind));
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (out[i] & 1u) != 0;
    return bits;
}

bool xor_composite(bool a, bool b) {
    const std::array<bool, 2> ab{a, b};
    const auto andor = eval_gate(GateKind::AndOr, ab);
    const std::array<bool, 2> anotb{andor[kOrPin], andor[kAndPin]};
    return eval_gate(GateKind::AnotB, anotb)[0];
}

}  // namespace rql
