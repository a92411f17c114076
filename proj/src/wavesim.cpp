#include "rql/wavesim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "rql/error.hpp"

namespace rql {

namespace {

struct Ports {
    std::vector<GateId> a, b, s;
    GateId cout = -1;
};

int parse_index(const std::string& name, char prefix) {
    if (name.size() < 2 || name[0] != prefix) return -1;
    int v = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
        if (name[i] < '0' || name[i] > '9') return -1;
        v = v * 10 + (name[i] - '0');
    }
    return v;
}

Ports resolve_ports(const Netlist& nl) {
    const int w = nl.width;
    if (w < 1 || w > 64) throw StructuralError("netlist width must be in [1, 64]");
    Ports p;
    p.a.assign(w, -1);
    p.b.assign(w, -1);
    p.s.assign(w, -1);
    for (GateId id : nl.inputs) {
        const Gate& g = nl.gate(id);
        if (g.kind() != GateKind::Source) throw StructuralError("input " + g.name + " is not a Source");
        if (const int i = parse_index(g.name, 'A'); i >= 0 && i < w) p.a[i] = id;
        else if (const int j = parse_index(g.name, 'B'); j >= 0 && j < w) p.b[j] = id;
        else throw StructuralError("unrecognised input name '" + g.name + "'");
    }
    for (GateId id : nl.outputs) {
        const Gate& g = nl.gate(id);
        if (g.kind() != GateKind::Sink) throw StructuralError("output " + g.name + " is not a Sink");
        if (g.name == "Cout") p.cout = id;
        else if (const int i = parse_index(g.name, 'S'); i >= 0 && i < w) p.s[i] = id;
        else throw StructuralError("unrecognised output name '" + g.name + "'");
    }
    for (int i = 0; i < w; ++i) {
        if (p.a[i] < 0 || p.b[i] < 0 || p.s[i] < 0) {
            throw StructuralError("netlist is missing adder port for bit " + std::to_string(i));
        }
    }
    return p;
}

int latency_cycles_of(const Netlist& nl) {
    int max_phase = -1;
    for (const auto& g : nl.gates) max_phase = std::max(max_phase, g.phase);
    if (!nl.phases_assigned || max_phase < 0) return 0;
    return (max_phase + 1 + 3) / 4;
}

// Runs the DAG 64 cycles at a time; `late` cells emit nothing.
SimTrace run(const Netlist& nl, std::span<const AdderVector> vectors,
             const std::vector<char>* late) {
    const Ports ports = resolve_ports(nl);
    const auto order = nl.topological_order();
    for (const auto& g : nl.gates) {
        if (g.inputs.size() != input_count(g.kind())) {
            throw StructuralError("gate " + std::to_string(g.id) + " has wrong arity");
        }
    }
    const int w = nl.width;
    const std::uint64_t word_mask = w == 64 ? ~0ULL : ((1ULL << w) - 1);
    for (const auto& v : vectors) {
        if ((v.a & ~word_mask) != 0 || (v.b & ~word_mask) != 0) {
            throw ParameterError("input vector wider than the " + std::to_string(w) + "-bit adder");
        }
    }

    const auto loads = nl.loads();
    std::vector<std::uint8_t> loaded_pins(nl.gates.size(), 0);  // bitmask of pins with loads
    for (std::size_t gi = 0; gi < loads.size(); ++gi) {
        for (std::size_t pin = 0; pin < loads[gi].size(); ++pin) {
            if (!loads[gi][pin].empty()) loaded_pins[gi] |= static_cast<std::uint8_t>(1u << pin);
        }
    }

    SimTrace tr;
    tr.width = w;
    tr.has_carry_out = ports.cout >= 0;
    tr.latency_cycles = latency_cycles_of(nl);
    tr.inputs.assign(vectors.begin(), vectors.end());
    tr.sums.assign(vectors.size(), 0);
    if (tr.has_carry_out) tr.carry_outs.assign(vectors.size(), 0);
    tr.gate_events.assign(nl.gates.size(), 0);
    tr.cycle_events.assign(vectors.size(), 0);

    std::vector<std::array<std::uint64_t, 2>> val(nl.gates.size());
    std::vector<std::uint64_t> sink_val(nl.gates.size(), 0);
    std::array<std::uint64_t, 2> in_buf{};

    for (std::size_t base = 0; base < vectors.size(); base += 64) {
        const std::size_t lanes = std::min<std::size_t>(64, vectors.size() - base);
        const std::uint64_t lane_mask = lanes == 64 ? ~0ULL : ((1ULL << lanes) - 1);
        for (auto& v : val) v = {0, 0};
        for (int i = 0; i < w; ++i) {
            std::uint64_t aw = 0, bw = 0;
            for (std::size_t l = 0; l < lanes; ++l) {
                aw |= ((vectors[base + l].a >> i) & 1ULL) << l;
                bw |= ((vectors[base + l].b >> i) & 1ULL) << l;
            }
            val[ports.a[i]][0] = aw;
            val[ports.b[i]][0] = bw;
        }
        // Lane-wise events for this batch, accumulated per gate and per lane.
        std::array<std::uint64_t, 64> lane_events{};
        for (GateId id : order) {
            const Gate& g = nl.gates[id];
            if (g.kind() != GateKind::Source) {
                for (std::size_t k = 0; k < g.inputs.size(); ++k) {
                    in_buf[k] = val[g.inputs[k].gate][g.inputs[k].pin];
                }
                auto out = eval_gate_word(g.kind(), std::span(in_buf.data(), g.inputs.size()));
                if (g.kind() == GateKind::Sink) {
                    sink_val[id] = out[0] & lane_mask;
                    continue;
                }
                if (late && (*late)[id]) out = {0, 0};
                val[id] = {out[0] & lane_mask, out[1] & lane_mask};
            }
            for (std::size_t pin = 0; pin < output_count(g.kind()); ++pin) {
                if (!(loaded_pins[id] & (1u << pin))) continue;
                std::uint64_t bits = val[id][pin];
                tr.gate_events[id] += static_cast<std::uint64_t>(std::popcount(bits));
                while (bits) {
                    lane_events[std::countr_zero(bits)] += 1;
                    bits &= bits - 1;
                }
            }
        }
        for (std::size_t l = 0; l < lanes; ++l) {
            std::uint64_t s = 0;
            for (int i = 0; i < w; ++i) s |= ((sink_val[ports.s[i]] >> l) & 1ULL) << i;
            tr.sums[base + l] = s;
            if (tr.has_carry_out) tr.carry_outs[base + l] = (sink_val[ports.cout] >> l) & 1ULL;
            tr.cycle_events[base + l] = lane_events[l];
        }
    }
    return tr;
}

}  // namespace

std::uint64_t SimTrace::total_events() const noexcept {
    std::uint64_t t = 0;
    for (auto e : gate_events) t += e;
    return t;
}

TimingReport analyze_timing(const Netlist& nl, const ClockConfig& clock, double d0_ps) {
    check_clock(clock);
    if (!nl.phases_assigned) throw StructuralError("timing analysis needs assigned phases");
    const double d = junction_delay(clock.bias_rel, d0_ps);
    const double quarter = clock.period_ps() / 4.0;
    const double receiver_window = quarter + clock.receiver_window_frac * clock.period_ps();

    TimingReport rep;
    rep.arrival_ps.assign(nl.gates.size(), 0.0);
    std::vector<int> depth(nl.gates.size(), 0);
    for (GateId id : nl.topological_order()) {
        const Gate& g = nl.gates[id];
        if (g.phase < 0) throw StructuralError("gate " + std::to_string(id) + " has no phase");
        double start = 0.0;
        int start_depth = 0;
        for (const auto& src : g.inputs) {
            const Gate& drv = nl.gate(src.gate);
            if (drv.phase != g.phase) continue;  // launched by this phase's clock edge
            double t = rep.arrival_ps[src.gate];
            if (drv.kind() == GateKind::PtlDriver) {
                if (!(drv.ptl_length_um > 0.0)) {
                    throw ConfigError("PtlDriver " + std::to_string(drv.id) + " has no line length");
                }
                t += drv.ptl_length_um / kPtlSpeedUmPerPs;
            }
            start = std::max(start, t);
            start_depth = std::max(start_depth, depth[src.gate]);
        }
        if (g.kind() == GateKind::PtlReceiver &&
            (g.inputs.size() != 1 || nl.gate(g.inputs[0].gate).kind() != GateKind::PtlDriver)) {
            throw ConfigError("PtlReceiver " + std::to_string(id) + " is not fed by a PtlDriver");
        }
        rep.arrival_ps[id] = start + g.spec.seq_depth * d;
        depth[id] = start_depth + g.spec.seq_depth;
        rep.worst_arrival_ps = std::max(rep.worst_arrival_ps, rep.arrival_ps[id]);
        rep.worst_path_junctions = std::max(rep.worst_path_junctions, depth[id]);
        const double window = g.kind() == GateKind::PtlReceiver ? receiver_window : quarter;
        if (rep.arrival_ps[id] > window * (1.0 + 1e-12)) {
            rep.violations.push_back({id, g.phase, rep.arrival_ps[id], window});
        }
    }
    std::sort(rep.violations.begin(), rep.violations.end(),
              [](const TimingViolation& a, const TimingViolation& b) { return a.gate < b.gate; });
    return rep;
}

SimTrace simulate_logic(const Netlist& netlist, std::span<const AdderVector> vectors) {
    return run(netlist, vectors, nullptr);
}

SimTrace simulate_timed(const Netlist& netlist, const ClockConfig& clock,
                        std::span<const AdderVector> vectors, double d0_ps) {
    TimingReport timing = analyze_timing(netlist, clock, d0_ps);
    std::vector<char> late(netlist.gates.size(), 0);
    for (const auto& v : timing.violations) late[v.gate] = 1;
    SimTrace tr = run(netlist, vectors, &late);
    tr.arrival_ps = std::move(timing.arrival_ps);
    tr.violations = std::move(timing.violations);
    return tr;
}

std::vector<AdderVector> shift_register_harness(std::span<const std::uint8_t> serial,
                                                std::size_t cycles, int width) {
    if (width < 1 || width > 32) throw ParameterError("harness width must be in [1, 32]");
    const std::size_t stages = 2 * static_cast<std::size_t>(width);
    if (serial.size() < stages) {
        throw ParameterError("serial program needs at least " + std::to_string(stages) + " bits");
    }
    const std::size_t len = serial.size();
    if (cycles == 0) cycles = len;
    std::vector<AdderVector> out(cycles);
    for (std::size_t t = 0; t < cycles; ++t) {
        auto stage = [&](std::size_t k) -> std::uint64_t {
            const std::size_t idx = (t % len + len - k % len) % len;
            return serial[idx] ? 1u : 0u;
        };
        AdderVector v;
        for (int i = 0; i < width; ++i) {
            v.a |= stage(static_cast<std::size_t>(i)) << i;
            v.b |= stage(stages - 1 - static_cast<std::size_t>(i)) << i;
        }
        out[t] = v;
    }
    return out;
}

Lfsr16::Lfsr16(std::uint16_t seed) : state_(seed) {
    if (seed == 0) throw ParameterError("LFSR seed must be non-zero");
}

bool Lfsr16::next() noexcept {
    const bool bit = (state_ & 1u) != 0;
    state_ = static_cast<std::uint16_t>(state_ >> 1);
    if (bit) state_ ^= 0xB400u;
    return bit;
}

std::vector<std::uint8_t> prbs_bits(std::uint16_t seed, std::size_t count) {
    Lfsr16 lfsr(seed);
    std::vector<std::uint8_t> bits(count);
    for (auto& b : bits) b = lfsr.next() ? 1 : 0;
    return bits;
}

InputProgram chopped_prbs(std::uint16_t seed, std::size_t active_len, std::size_t zero_len,
                          std::size_t periods) {
    if (active_len == 0 || zero_len == 0) throw ParameterError("chop lengths must be positive");
    if (periods == 0) throw ParameterError("chopped program needs at least one period");
    Lfsr16 lfsr(seed);
    InputProgram prog;
    prog.chop = std::make_pair(active_len, zero_len);
    prog.serial_bits.reserve((active_len + zero_len) * periods);
    for (std::size_t p = 0; p < periods; ++p) {
        for (std::size_t i = 0; i < active_len; ++i) prog.serial_bits.push_back(lfsr.next() ? 1 : 0);
        prog.serial_bits.insert(prog.serial_bits.end(), zero_len, 0);
    }
    return prog;
}

namespace {

bool passes(const Netlist& nl, double f, double bias, const MarginOptions& opt) {
    ClockConfig clock;
    clock.frequency_hz = f;
    clock.bias_rel = bias;
    clock.receiver_window_frac = opt.receiver_window_frac;
    return analyze_timing(nl, clock, opt.d0_ps).violations.empty();
}

}  // namespace

std::optional<double> min_passing_bias(const Netlist& nl, double f, double lo, double hi,
                                       const MarginOptions& opt) {
    if (!(lo > 0.0 && hi > lo)) throw ParameterError("bias bracket must satisfy 0 < lo < hi");
    if (!passes(nl, f, hi, opt)) return std::nullopt;
    for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (passes(nl, f, mid, opt) ? hi : lo) = mid;
    }
    return hi;
}

MarginCurve margin_sweep(const Netlist& nl, std::span<const double> freqs,
                         std::span<const double> grid, const MarginOptions& opt) {
    if (grid.empty()) throw ParameterError("bias grid is empty");
    if (freqs.empty()) throw ParameterError("frequency list is empty");
    if (!(opt.bias_ceiling > 0.0)) throw ParameterError("bias ceiling must be positive");
    std::vector<double> sorted(grid.begin(), grid.end());
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() > 0.0)) throw ParameterError("bias grid values must be positive");

    MarginCurve curve;
    for (double f : freqs) {
        if (!(f > 0.0)) throw ParameterError("frequencies must be positive");
        MarginPoint pt;
        pt.frequency_hz = f;
        pt.bias_max = opt.bias_ceiling;
        pt.upper_db = 20.0 * std::log10(opt.bias_ceiling);
        std::optional<double> bmin;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (!passes(nl, f, sorted[i], opt)) continue;
            bmin = i == 0 ? sorted[0] : min_passing_bias(nl, f, sorted[i - 1], sorted[i], opt);
            break;
        }
        if (bmin) {
            pt.bias_min = *bmin;
            pt.lower_db = 20.0 * std::log10(*bmin);
            pt.operable = *bmin <= opt.bias_ceiling;
        } else {
            pt.bias_min = std::nan("");
            pt.lower_db = std::nan("");
        }
        pt.width_db = pt.operable ? pt.upper_db - pt.lower_db : 0.0;
        curve.points.push_back(pt);
    }
    return curve;
}

double calibrate_bias_ceiling(const Netlist& nl, double f, double target_width_db,
                              const MarginOptions& opt) {
    const auto bmin = min_passing_bias(nl, f, 1e-6, 1e6, opt);
    if (!bmin) throw DomainError("netlist never meets timing at this frequency");
    return *bmin * std::pow(10.0, target_width_db / 20.0);
}

Activity switching_activity(const SimTrace& trace) {
    Activity a;
    a.per_gate = trace.gate_events;
    a.total = trace.total_events();
    return a;
}

}  // namespace rql
