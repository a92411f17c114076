#include "rql/netlist.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "rql/error.hpp"

namespace rql {

GateId Netlist::add_gate(GateKind kind, int stage, std::string region,
                         std::vector<PinRef> ins, std::string name) {
    Gate g;
    g.id = static_cast<GateId>(gates.size());
    g.spec = table[kind];
    g.stage = stage;
    g.region = std::move(region);
    g.name = std::move(name);
    g.inputs = std::move(ins);
    gates.push_back(std::move(g));
    return gates.back().id;
}

std::vector<std::vector<std::vector<Load>>> Netlist::loads() const {
    std::vector<std::vector<std::vector<Load>>> result(gates.size());
    for (const auto& g : gates) result[g.id].resize(output_count(g.kind()));
    for (const auto& g : gates) {
        for (std::size_t k = 0; k < g.inputs.size(); ++k) {
            const PinRef& src = g.inputs[k];
            if (src.gate < 0 || static_cast<std::size_t>(src.gate) >= gates.size()) {
                throw StructuralError("gate " + std::to_string(g.id) +
                                      " references missing gate " + std::to_string(src.gate));
            }
            if (src.pin >= output_count(gates[static_cast<std::size_t>(src.gate)].kind())) {
                throw StructuralError("gate " + std::to_string(g.id) + " reads missing pin " +
                                      std::to_string(src.gate) + "." + std::to_string(src.pin));
            }
            auto& pins = result[src.gate];
            if (src.pin >= pins.size()) {
                throw StructuralError("gate " + std::to_string(g.id) + " reads pin " +
                                      std::to_string(src.pin) + " of gate " +
                                      std::to_string(src.gate) + " which has " +
                                      std::to_string(pins.size()) + " outputs");
            }
            pins[src.pin].push_back({g.id, k});
        }
    }
    return result;
}

std::vector<GateId> Netlist::topological_order() const {
    const std::size_t n = gates.size();
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<GateId>> succ(n);
    for (const auto& g : gates) {
        for (const auto& src : g.inputs) {
            if (src.gate < 0 || static_cast<std::size_t>(src.gate) >= n) {
                throw StructuralError("gate " + std::to_string(g.id) +
                                      " references missing gate " + std::to_string(src.gate));
            }
            if (src.pin >= output_count(gates[static_cast<std::size_t>(src.gate)].kind())) {
                throw StructuralError("gate " + std::to_string(g.id) + " reads missing pin " +
                                      std::to_string(src.gate) + "." + std::to_string(src.pin));
            }
            succ[src.gate].push_back(g.id);
            ++indegree[g.id];
        }
    }
    // Min-heap keeps the order deterministic (lowest id first).
    std::priority_queue<GateId, std::vector<GateId>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push(static_cast<GateId>(i));
    }
    std::vector<GateId> order;
    order.reserve(n);
    while (!ready.empty()) {
        const GateId id = ready.top();
        ready.pop();
        order.push_back(id);
        for (GateId s : succ[id]) {
            if (--indegree[s] == 0) ready.push(s);
        }
    }
    if (order.size() != n) throw StructuralError("netlist contains a combinational cycle");
    return order;
}

std::vector<std::string> Netlist::regions() const {
    std::set<std::string> names;
    for (const auto& g : gates) names.insert(g.region);
    return {names.begin(), names.end()};
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok, int line) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw IoError("netlist line " + std::to_string(line) + ": bad number '" + tok + "'");
    }
    return v;
}

int parse_int(const std::string& tok, int line) {
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw IoError("netlist line " + std::to_string(line) + ": bad integer '" + tok + "'");
    }
    return v;
}

GateKind parse_kind(const std::string& tok, int line) {
    const auto kind = parse_gate_kind(tok);
    if (!kind) throw IoError("netlist line " + std::to_string(line) + ": unknown kind '" + tok + "'");
    return *kind;
}

class LineReader {
public:
    LineReader(std::vector<std::string> toks, int line) : toks_(std::move(toks)), line_(line) {}

    const std::string& next() {
        if (pos_ >= toks_.size()) {
            throw IoError("netlist line " + std::to_string(line_) + ": record truncated");
        }
        return toks_[pos_++];
    }
    int next_int() { return parse_int(next(), line_); }
    double next_double() { return parse_double(next(), line_); }
    bool done() const noexcept { return pos_ == toks_.size(); }
    int line() const noexcept { return line_; }

private:
    std::vector<std::string> toks_;
    std::size_t pos_ = 0;
    int line_;
};

}  // namespace

void write_netlist(std::ostream& out, const Netlist& nl) {
    out << "rqlnet 1\n";
    out << "width " << nl.width << " chip " << (nl.chip_mode ? 1 : 0) << " ptl "
        << fmt_double(nl.ptl_length_um) << '\n';
    out << "layout " << nl.layout.n_bits << ' ' << nl.layout.n_logic_stages << ' '
        << nl.layout.idle_phases << ' ' << nl.layout.idle_before_stage << ' '
        << (nl.phases_assigned ? 1 : 0) << '\n';
    out << "regions";
    for (const auto& r : nl.regions()) out << ' ' << r;
    out << '\n';
    for (GateKind kind : kAllGateKinds) {
        const GateSpec& s = nl.table[kind];
        out << "spec " << to_string(kind) << ' ' << s.jj_count << ' ' << fmt_double(s.ic_avg_ua)
            << ' ' << s.seq_depth << '\n';
    }
    for (const auto& g : nl.gates) {
        out << "gate " << g.id << ' ' << to_string(g.kind()) << ' ' << g.phase << ' ' << g.stage
            << ' ' << (g.region.empty() ? "-" : g.region) << ' ' << g.spec.jj_count << ' '
            << fmt_double(g.spec.ic_avg_ua) << ' ' << g.spec.seq_depth << ' ' << g.long_input
            << ' ' << fmt_double(g.ptl_length_um) << ' ' << (g.name.empty() ? "-" : g.name) << ' '
            << g.inputs.size();
        for (const auto& in : g.inputs) out << ' ' << in.gate << '.' << int(in.pin);
        out << '\n';
    }
    out << "inputs";
    for (GateId id : nl.inputs) out << ' ' << id;
    out << "\noutputs";
    for (GateId id : nl.outputs) out << ' ' << id;
    out << '\n';
}

Netlist read_netlist(std::istream& in) {
    Netlist nl;
    std::string text;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, text)) {
        ++line_no;
        if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
        std::istringstream ss(text);
        std::vector<std::string> toks;
        for (std::string t; ss >> t;) toks.push_back(t);
        if (toks.empty()) continue;
        LineReader r(std::move(toks), line_no);
        const std::string tag = r.next();
        if (!saw_header) {
            if (tag != "rqlnet" || r.next_int() != 1) throw IoError("not an rqlnet v1 file");
            saw_header = true;
            continue;
        }
        if (tag == "width") {
            nl.width = r.next_int();
            if (r.next() != "chip") throw IoError("netlist line " + std::to_string(line_no) + ": expected 'chip'");
            nl.chip_mode = r.next_int() != 0;
            if (r.next() != "ptl") throw IoError("netlist line " + std::to_string(line_no) + ": expected 'ptl'");
            nl.ptl_length_um = r.next_double();
        } else if (tag == "layout") {
            nl.layout.n_bits = r.next_int();
            nl.layout.n_logic_stages = r.next_int();
            nl.layout.idle_phases = r.next_int();
            nl.layout.idle_before_stage = r.next_int();
            nl.phases_assigned = r.next_int() != 0;
        } else if (tag == "regions") {
            while (!r.done()) r.next();  // informational; regions live on gates
        } else if (tag == "spec") {
            GateSpec s;
            s.kind = parse_kind(r.next(), line_no);
            s.jj_count = r.next_int();
            s.ic_avg_ua = r.next_double();
            s.seq_depth = r.next_int();
            nl.table.set(s);
        } else if (tag == "gate") {
            Gate g;
            g.id = r.next_int();
            if (g.id != static_cast<GateId>(nl.gates.size())) {
                throw IoError("netlist line " + std::to_string(line_no) + ": gate ids must be dense and ordered");
            }
            g.spec.kind = parse_kind(r.next(), line_no);
            g.phase = r.next_int();
            g.stage = r.next_int();
            g.region = r.next();
            if (g.region == "-") g.region.clear();
            g.spec.jj_count = r.next_int();
            g.spec.ic_avg_ua = r.next_double();
            g.spec.seq_depth = r.next_int();
            g.long_input = r.next_int();
            g.ptl_length_um = r.next_double();
            g.name = r.next();
            if (g.name == "-") g.name.clear();
            const int n_in = r.next_int();
            if (n_in < 0) throw IoError("netlist line " + std::to_string(line_no) + ": negative input count");
            for (int k = 0; k < n_in; ++k) {
                const std::string& ref = r.next();
                const auto dot = ref.find('.');
                if (dot == std::string::npos) {
                    throw IoError("netlist line " + std::to_string(line_no) + ": bad net '" + ref + "'");
                }
                PinRef p;
                p.gate = parse_int(ref.substr(0, dot), line_no);
                p.pin = static_cast<std::uint8_t>(parse_int(ref.substr(dot + 1), line_no));
                g.inputs.push_back(p);
            }
            nl.gates.push_back(std::move(g));
        } else if (tag == "inputs") {
            while (!r.done()) nl.inputs.push_back(r.next_int());
        } else if (tag == "outputs") {
            while (!r.done()) nl.outputs.push_back(r.next_int());
        } else {
            throw IoError("netlist line " + std::to_string(line_no) + ": unknown record '" + tag + "'");
        }
        if (!r.done()) {
            throw IoError("netlist line " + std::to_string(line_no) + ": trailing fields");
        }
    }
    if (!saw_header) throw IoError("empty netlist file");
    for (GateId id : nl.inputs) {
        if (id < 0 || static_cast<std::size_t>(id) >= nl.gates.size()) throw IoError("input references missing gate");
    }
    for (GateId id : nl.outputs) {
        if (id < 0 || static_cast<std::size_t>(id) >= nl.gates.size()) throw IoError("output references missing gate");
    }
    return nl;
}

void save_netlist(const std::string& path, const Netlist& netlist) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_netlist(out, netlist);
    if (!out) throw IoError("write failed for '" + path + "'");
}

Netlist load_netlist(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_netlist(in);
}

}  // namespace rql
