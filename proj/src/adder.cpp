#include "rql/adder.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "rql/error.hpp"

namespace rql {

bool is_supported_width(int n_bits) noexcept {
    return n_bits >= 2 && n_bits <= 64 && std::has_single_bit(static_cast<unsigned>(n_bits));
}

int logic_stage_count(int n_bits) {
    if (!is_supported_width(n_bits)) {
        throw ParameterError("adder width must be a power of two in [2, 64], got " +
                             std::to_string(n_bits));
    }
    return std::countr_zero(static_cast<unsigned>(n_bits)) + 2;
}

StageLayout make_layout(int n_bits, int idle_phases, int idle_before_stage) {
    StageLayout layout;
    layout.n_bits = n_bits;
    layout.n_logic_stages = logic_stage_count(n_bits);
    if (idle_phases < 0) throw ParameterError("idle phase count must be non-negative");
    layout.idle_phases = idle_phases;
    const int last_cla = layout.n_logic_stages - 2;
    layout.idle_before_stage = idle_before_stage < 0 ? last_cla : idle_before_stage;
    if (layout.idle_before_stage < 1 || layout.idle_before_stage > layout.n_logic_stages - 1) {
        throw ParameterError("idle phases must be inserted between stage 1 and the sum stage");
    }
    return layout;
}

namespace {

// Inserts Delay chains so every edge spans at most one stage (and sinks read
// from their own stage). Chains are shared per driver pin.
void pad_stages(Netlist& nl) {
    std::map<PinRef, std::vector<PinRef>> chains;  // chain[k] sits at driver stage + 1 + k
    const std::size_t original = nl.gates.size();
    for (std::size_t gi = 0; gi < original; ++gi) {
        for (std::size_t k = 0; k < nl.gates[gi].inputs.size(); ++k) {
            const PinRef src = nl.gates[gi].inputs[k];
            const int sd = nl.gate(src.gate).stage;
            const int sc = nl.gates[gi].stage;
            if (sd > sc) throw StructuralError("edge runs backwards in stage order");
            const int target = nl.gates[gi].kind() == GateKind::Sink ? sc : sc - 1;
            if (sd >= target) continue;
            auto& chain = chains[src];
            while (static_cast<int>(chain.size()) < target - sd) {
                const PinRef prev = chain.empty() ? src : chain.back();
                const int stage = sd + 1 + static_cast<int>(chain.size());
                const GateId d = nl.add_gate(GateKind::Delay, stage, "pad", {prev});
                chain.push_back({d, 0});
            }
            nl.gates[gi].inputs[k] = chain[target - sd - 1];
        }
    }
}

// Maximum loads reachable from one pin through at most `depth` Split levels.
long long tree_capacity(int fanout, int depth) {
    long long cap = fanout;
    for (int d = 0; d < depth; ++d) cap = std::min<long long>(cap * 2 * fanout, 1LL << 40);
    return cap;
}

void build_split_tree(Netlist& nl, PinRef pin, std::span<const Load> loads, int fanout,
                      int depth) {
    const long long k = static_cast<long long>(loads.size());
    if (k <= fanout) {
        for (const Load& l : loads) nl.gate(l.gate).inputs[l.input] = pin;
        return;
    }
    const long long sub = tree_capacity(fanout, depth - 1);
    const long long splits = (k - fanout + (2 * sub - 1) - 1) / (2 * sub - 1);
    const long long direct = fanout - splits;
    for (long long i = 0; i < direct; ++i) nl.gate(loads[i].gate).inputs[loads[i].input] = pin;

    const Gate& driver = nl.gate(pin.gate);
    const int stage = driver.stage;
    const int phase = driver.phase;
    std::size_t pos = static_cast<std::size_t>(direct);
    for (long long s = 0; s < splits; ++s) {
        const long long remaining_splits = splits - s;
        const long long remaining = k - static_cast<long long>(pos);
        const long long take = std::min(2 * sub, (remaining + remaining_splits - 1) / remaining_splits);
        const GateId split = nl.add_gate(GateKind::Split, stage, "split", {pin});
        nl.gate(split).phase = phase;
        const long long first = (take + 1) / 2;
        build_split_tree(nl, {split, 0}, loads.subspan(pos, first), fanout, depth - 1);
        build_split_tree(nl, {split, 1}, loads.subspan(pos + first, take - first), fanout, depth - 1);
        pos += static_cast<std::size_t>(take);
    }
}

}  // namespace

Netlist build_kogge_stone(const AdderOptions& options, const GateTable& table) {
    const int n = options.n_bits;
    const int levels = logic_stage_count(n) - 2;  // CLA columns
    const int sum_stage = levels + 1;
    if (options.ptl_length_um < 0.0) throw ParameterError("PTL length must be non-negative");
    if (options.ptl_length_um > 0.0 && options.idle_phases < 1) {
        throw ParameterError("passive lines ride in the idle phase; idle_phases must be >= 1");
    }
    const StageLayout layout = make_layout(n, options.idle_phases, options.idle_before_stage);

    Netlist nl;
    nl.width = n;
    nl.chip_mode = options.chip_mode;
    nl.table = table;
    nl.layout = layout;
    nl.ptl_length_um = options.ptl_length_um;

    std::vector<GateId> a_src(n), b_src(n);
    for (int i = 0; i < n; ++i) a_src[i] = nl.add_gate(GateKind::Source, 0, "io", {}, "A" + std::to_string(i));
    for (int i = 0; i < n; ++i) b_src[i] = nl.add_gate(GateKind::Source, 0, "io", {}, "B" + std::to_string(i));
    nl.inputs = a_src;
    nl.inputs.insert(nl.inputs.end(), b_src.begin(), b_src.end());

    // A/OR stage: G = A.B on the And pin, P = A+B on the Or pin.
    std::vector<PinRef> g(n), p(n);
    for (int i = 0; i < n; ++i) {
        const GateId gp = nl.add_gate(GateKind::AndOr, 0, "gp", {{a_src[i], 0}, {b_src[i], 0}});
        g[i] = {gp, kAndPin};
        p[i] = {gp, kOrPin};
    }
    // Partial sums A xor B, in parallel with the first CLA column.
    std::vector<PinRef> psum(n);
    for (int i = 0; i < n; ++i) {
        psum[i] = {nl.add_gate(GateKind::AnotB, 1, "psum", {p[i], g[i]}), 0};
    }

    // Backward pass: which group generate/propagate signals each level needs.
    // Level k holds the (G, P) pairs after k CLA columns.
    std::vector<std::vector<char>> need_g(levels + 1, std::vector<char>(n, 0));
    std::vector<std::vector<char>> need_p(levels + 1, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) {
        // Final G[i:0] is the carry into bit i+1.
        need_g[levels][i] = (i < n - 1 || !options.chip_mode) ? 1 : 0;
    }
    for (int k = levels; k >= 1; --k) {
        const int span = 1 << (k - 1);
        for (int i = 0; i < n; ++i) {
            const int j = i - span;
            if (j >= 0) {
                if (need_g[k][i]) need_g[k - 1][i] = need_p[k - 1][i] = need_g[k - 1][j] = 1;
                if (need_p[k][i]) need_p[k - 1][i] = need_p[k - 1][j] = 1;
            } else {
                need_g[k - 1][i] |= need_g[k][i];
                need_p[k - 1][i] |= need_p[k][i];
            }
        }
    }

    const int post_idle_stage = options.idle_phases > 0 ? layout.idle_before_stage : -1;
    for (int k = 1; k <= levels; ++k) {
        const int span = 1 << (k - 1);
        std::vector<PinRef> next_g = g, next_p = p;
        for (int i = 0; i < n; ++i) {
            const int j = i - span;
            if (j < 0) continue;  // passes through; padding adds the delay cell
            if (need_g[k][i]) {
                // G_out = P_i G_j + G_i from an And-pruned and an Or-pruned AndOr.
                const GateId and_gate = nl.add_gate(GateKind::AndOr, k, "cla", {p[i], g[j]});
                const GateId or_gate = nl.add_gate(GateKind::AndOr, k, "cla", {{and_gate, kAndPin}, g[i]});
                if (k == post_idle_stage) nl.gate(and_gate).long_input = 1;
                next_g[i] = {or_gate, kOrPin};
            }
            if (need_p[k][i]) {
                const GateId p_gate = nl.add_gate(GateKind::AndOr, k, "cla", {p[i], p[j]});
                if (k == post_idle_stage) nl.gate(p_gate).long_input = 1;
                next_p[i] = {p_gate, kAndPin};
            }
        }
        g = std::move(next_g);
        p = std::move(next_p);
    }

    // Sum column: S_i = psum_i xor C_i with C_i = G[i-1:0]; S_0 = psum_0.
    std::vector<PinRef> sum(n);
    sum[0] = psum[0];
    for (int i = 1; i < n; ++i) {
        const GateId x = nl.add_gate(GateKind::AndOr, sum_stage, "sum", {psum[i], g[i - 1]});
        sum[i] = {nl.add_gate(GateKind::AnotB, sum_stage, "sum", {{x, kOrPin}, {x, kAndPin}}), 0};
    }
    for (int i = 0; i < n; ++i) {
        nl.outputs.push_back(nl.add_gate(GateKind::Sink, sum_stage, "io", {sum[i]}, "S" + std::to_string(i)));
    }
    if (!options.chip_mode) {
        nl.outputs.push_back(nl.add_gate(GateKind::Sink, sum_stage, "io", {g[n - 1]}, "Cout"));
    }

    pad_stages(nl);
    return nl;
}

Netlist legalize_fanout(Netlist nl, int max_fanout) {
    if (max_fanout < 2) throw ParameterError("max_fanout must be at least 2");
    const auto loads = nl.loads();
    const std::size_t original = nl.gates.size();
    for (std::size_t gi = 0; gi < original; ++gi) {
        for (std::size_t pin = 0; pin < loads[gi].size(); ++pin) {
            std::vector<Load> pin_loads = loads[gi][pin];
            if (static_cast<int>(pin_loads.size()) <= max_fanout) continue;
            std::sort(pin_loads.begin(), pin_loads.end(), [](const Load& a, const Load& b) {
                return a.gate != b.gate ? a.gate < b.gate : a.input < b.input;
            });
            int depth = 0;
            while (tree_capacity(max_fanout, depth) < static_cast<long long>(pin_loads.size())) ++depth;
            build_split_tree(nl, {static_cast<GateId>(gi), static_cast<std::uint8_t>(pin)}, pin_loads,
                             max_fanout, depth);
        }
    }
    return nl;
}

Netlist assign_phases(Netlist nl, const StageLayout& layout) {
    if (nl.phases_assigned) throw StructuralError("phases are already assigned");
    nl.topological_order();  // rejects cycles before anything is rewired

    int max_stage = 0;
    for (const auto& g : nl.gates) max_stage = std::max(max_stage, g.stage);
    if (max_stage + 1 != layout.n_logic_stages) {
        throw StructuralError("layout has " + std::to_string(layout.n_logic_stages) +
                              " logic stages but the netlist has " + std::to_string(max_stage + 1));
    }
    if (layout.idle_phases > 0 &&
        (layout.idle_before_stage < 1 || layout.idle_before_stage >= layout.n_logic_stages)) {
        throw ParameterError("idle insertion point out of range");
    }

    for (auto& g : nl.gates) g.phase = layout.phase_of_stage(g.stage);

    if (layout.idle_phases > 0) {
        const int boundary = layout.idle_before_stage;
        const int first_idle = boundary;  // phase index of the first idle phase
        const int last_idle = boundary + layout.idle_phases - 1;
        std::map<PinRef, PinRef> shared;  // driver pin -> end of its idle chain
        const std::size_t original = nl.gates.size();
        for (std::size_t gi = 0; gi < original; ++gi) {
            for (std::size_t k = 0; k < nl.gates[gi].inputs.size(); ++k) {
                const PinRef src = nl.gates[gi].inputs[k];
                if (!(nl.gate(src.gate).stage < boundary && nl.gates[gi].stage >= boundary)) continue;
                const bool long_wire = nl.ptl_length_um > 0.0 &&
                                       nl.gates[gi].long_input == static_cast<int>(k);
                if (long_wire) {
                    PinRef prev = src;
                    for (int ph = first_idle; ph < last_idle; ++ph) {
                        const GateId d = nl.add_gate(GateKind::Delay, -1, "idle", {prev});
                        nl.gate(d).phase = ph;
                        prev = {d, 0};
                    }
                    const GateId drv = nl.add_gate(GateKind::PtlDriver, -1, "ptl", {prev});
                    nl.gate(drv).phase = last_idle;
                    nl.gate(drv).ptl_length_um = nl.ptl_length_um;
                    const GateId rcv = nl.add_gate(GateKind::PtlReceiver, -1, "ptl", {{drv, 0}});
                    nl.gate(rcv).phase = last_idle;
                    nl.gates[gi].inputs[k] = {rcv, 0};
                    continue;
                }
                auto it = shared.find(src);
                if (it == shared.end()) {
                    PinRef prev = src;
                    for (int ph = first_idle; ph <= last_idle; ++ph) {
                        const GateId d = nl.add_gate(GateKind::Delay, -1, "idle", {prev});
                        nl.gate(d).phase = ph;
                        prev = {d, 0};
                    }
                    it = shared.emplace(src, prev).first;
                }
                nl.gates[gi].inputs[k] = it->second;
            }
        }
    }
    nl.layout = layout;
    nl.phases_assigned = true;
    return nl;
}

Netlist generate_adder(const AdderOptions& options, const GateTable& table) {
    Netlist nl = build_kogge_stone(options, table);
    nl = legalize_fanout(std::move(nl), options.max_fanout);
    return assign_phases(std::move(nl), make_layout(options.n_bits, options.idle_phases,
                                                    options.idle_before_stage));
}

Latency latency_for_phases(int phases, double frequency_hz) {
    if (!(frequency_hz > 0.0)) throw ParameterError("frequency must be positive");
    if (phases < 0) throw ParameterError("phase count must be non-negative");
    Latency l;
    l.phases = phases;
    l.cycles = phases / 4.0;
    l.picoseconds = l.cycles / frequency_hz * 1e12;
    return l;
}

Latency latency(const Netlist& nl, double frequency_hz) {
    if (!nl.phases_assigned) throw StructuralError("latency needs a phase-assigned netlist");
    int max_phase = -1;
    for (const auto& g : nl.gates) {
        if (g.phase < 0) throw StructuralError("gate " + std::to_string(g.id) + " has no phase");
        max_phase = std::max(max_phase, g.phase);
    }
    return latency_for_phases(max_phase + 1, frequency_hz);
}

bool is_core_region(const std::string& region) { return region != "io"; }

NetlistStats netlist_stats(const Netlist& nl, std::span<const ExternalBlock> external) {
    NetlistStats st;
    double weighted_ic = 0.0;
    for (const auto& g : nl.gates) {
        ++st.gate_count;
        ++st.kind_counts[g.kind()];
        const GateBudget b = gate_budget(g.spec);
        st.jj_total += b.jj_count;
        st.ic_total_ua += b.ic_total_ua;
        weighted_ic += b.ic_total_ua;
        st.region_ic_ua[g.region] += b.ic_total_ua;
        if (g.phase >= 0) {
            st.line_ic_ua[static_cast<std::size_t>(PhaseSlot::from_index(g.phase).line)] += b.ic_total_ua;
        }
    }
    for (const auto& blk : external) {
        const double ic = blk.jj_count * blk.ic_avg_ua;
        st.jj_total += blk.jj_count;
        st.ic_total_ua += ic;
        weighted_ic += ic;
        st.region_ic_ua[blk.region] += ic;
        st.line_ic_ua[static_cast<std::size_t>(blk.line)] += ic;
    }
    if (st.jj_total > 0) st.ic_avg_ua = weighted_ic / st.jj_total;
    for (const auto& [region, ic] : st.region_ic_ua) {
        st.region_fraction[region] = st.ic_total_ua > 0.0 ? ic / st.ic_total_ua : 0.0;
    }
    if (!nl.gates.empty()) {
        for (const auto& pins : nl.loads()) {
            for (const auto& l : pins) st.max_fanout = std::max(st.max_fanout, static_cast<int>(l.size()));
        }
    }
    return st;
}

std::string_view to_string(Diagnostic::Kind kind) noexcept {
    switch (kind) {
        case Diagnostic::Kind::Reference: return "reference";
        case Diagnostic::Kind::Arity: return "arity";
        case Diagnostic::Kind::Cycle: return "cycle";
        case Diagnostic::Kind::Phase: return "phase";
        case Diagnostic::Kind::Monotonicity: return "monotonicity";
        case Diagnostic::Kind::Fanout: return "fanout";
        case Diagnostic::Kind::Idle: return "idle";
        case Diagnostic::Kind::Annotation: return "annotation";
    }
    return "unknown";
}

std::vector<Diagnostic> validate(const Netlist& nl, int max_fanout) {
    using K = Diagnostic::Kind;
    std::vector<Diagnostic> out;
    const std::size_t n = nl.gates.size();
    bool refs_ok = true;
    for (const auto& g : nl.gates) {
        if (g.inputs.size() != input_count(g.kind())) {
            out.push_back({K::Arity, g.id,
                           std::string(to_string(g.kind())) + " has " + std::to_string(g.inputs.size()) +
                               " inputs, expected " + std::to_string(input_count(g.kind()))});
        }
        for (const auto& src : g.inputs) {
            if (src.gate < 0 || static_cast<std::size_t>(src.gate) >= n ||
                src.pin >= output_count(nl.gate(src.gate).kind())) {
                out.push_back({K::Reference, g.id, "input references a missing pin"});
                refs_ok = false;
            }
        }
    }
    if (!refs_ok) return out;

    try {
        nl.topological_order();
    } catch (const StructuralError& e) {
        out.push_back({K::Cycle, -1, e.what()});
    }

    bool phases_ok = nl.phases_assigned;
    for (const auto& g : nl.gates) {
        if (g.phase < 0) {
            out.push_back({K::Phase, g.id, "gate has no assigned phase"});
            phases_ok = false;
        }
    }
    if (!nl.phases_assigned && phases_ok && n > 0) {
        out.push_back({K::Phase, -1, "netlist phases are not assigned"});
        phases_ok = false;
    }
    if (phases_ok) {
        const int idle_lo = nl.layout.idle_before_stage;
        const int idle_hi = idle_lo + nl.layout.idle_phases;
        for (const auto& g : nl.gates) {
            for (const auto& src : g.inputs) {
                const int pd = nl.gate(src.gate).phase;
                if (g.phase < pd || g.phase > pd + 1) {
                    out.push_back({K::Monotonicity, g.id,
                                   "net from phase " + std::to_string(pd) + " to phase " +
                                       std::to_string(g.phase)});
                }
            }
            const bool idle_cell = g.kind() == GateKind::Delay || g.kind() == GateKind::PtlDriver ||
                                   g.kind() == GateKind::PtlReceiver || g.kind() == GateKind::Split;
            if (g.phase >= idle_lo && g.phase < idle_hi && !idle_cell) {
                out.push_back({K::Idle, g.id, std::string(to_string(g.kind())) + " placed in an idle phase"});
            }
        }
    }

    for (const auto& g : nl.gates) {
        if (g.kind() == GateKind::PtlDriver && !(g.ptl_length_um > 0.0)) {
            out.push_back({K::Annotation, g.id, "PtlDriver without a line length"});
        }
        if (g.kind() == GateKind::PtlReceiver && g.inputs.size() == 1 &&
            nl.gate(g.inputs[0].gate).kind() != GateKind::PtlDriver) {
            out.push_back({K::Annotation, g.id, "PtlReceiver not fed by a PtlDriver"});
        }
    }

    const auto loads = nl.loads();
    for (std::size_t gi = 0; gi < n; ++gi) {
        for (std::size_t pin = 0; pin < loads[gi].size(); ++pin) {
            if (static_cast<int>(loads[gi][pin].size()) > max_fanout) {
                out.push_back({K::Fanout, static_cast<GateId>(gi),
                               "pin " + std::to_string(pin) + " drives " +
                                   std::to_string(loads[gi][pin].size()) + " inputs (max " +
                                   std::to_string(max_fanout) + ")"});
            }
        }
    }
    return out;
}

}  // namespace rql
